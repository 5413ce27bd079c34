"""Dimensionless parameterization and state containers.

Conventions used throughout the package: the total single-atom decay rate
sets the unit of time (Gamma = 1), the resonant wavelength sets the unit of
length (lambda0 = 1, so k0*z = 2*pi*z), and momenta are measured in units
of the photon recoil hbar*k0.  All rates and detunings are therefore pure
numbers.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError, InvalidStateError

TWO_PI = 2.0 * math.pi

_PARAM_FIELDS = (
    "n_atoms",
    "gamma_1d",
    "rabi",
    "pump_detuning",
    "recoil",
    "ext_damping",
)


@dataclass(frozen=True)
class SystemParams:
    """Physical parameters of the driven chain, in units of Gamma.

    Attributes
    ----------
    n_atoms : int
        Number of atoms N.
    gamma_1d : float
        Emission rate into the guided modes, 0 < gamma_1d <= 1.  The
        free-space rate is the derived quantity ``gamma_prime = 1 - gamma_1d``.
    rabi : float
        Pump Rabi frequency Omega.
    pump_detuning : float
        Pump detuning delta = omega_pump - omega_0.
    recoil : float
        Recoil frequency omega_r = hbar k0^2 / (2 m).  Must be small
        compared to 1 for the timescale separation the model relies on.
    ext_damping : float
        External momentum damping rate gamma_e used to reach steady states.
        A value of 0 means "no external damping" (routines that need it
        will either refuse or substitute a recommended value).
    """

    n_atoms: int
    gamma_1d: float
    rabi: float
    pump_detuning: float
    recoil: float
    ext_damping: float = 0.0

    def __post_init__(self):
        if int(self.n_atoms) != self.n_atoms or self.n_atoms < 1:
            raise ConfigError(f"n_atoms must be a positive integer, got {self.n_atoms}")
        if not 0.0 < self.gamma_1d <= 1.0:
            raise ConfigError(f"gamma_1d must lie in (0, 1], got {self.gamma_1d}")
        if self.recoil < 0.0:
            raise ConfigError(f"recoil must be non-negative, got {self.recoil}")
        if self.ext_damping < 0.0:
            raise ConfigError(f"ext_damping must be non-negative, got {self.ext_damping}")
        for name in ("rabi", "pump_detuning", "recoil", "ext_damping"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite")
        if self.recoil >= 0.1:
            warnings.warn(
                f"recoil = {self.recoil} is not small compared to Gamma; the "
                "adiabatic separation of internal and motional timescales is "
                "questionable",
                stacklevel=2,
            )

    @property
    def gamma_prime(self) -> float:
        """Free-space emission rate Gamma' = Gamma - Gamma_1D."""
        return 1.0 - self.gamma_1d

    @property
    def saturation(self) -> float:
        """Single-atom excited population s0 = Omega^2 / (delta^2 + 1/4)."""
        return self.saturation_at(self.pump_detuning)

    def saturation_at(self, delta: float) -> float:
        return self.rabi**2 / (delta**2 + 0.25)

    def detuned(self, delta: float) -> "SystemParams":
        """Copy of the parameters with a different pump detuning."""
        return replace(self, pump_detuning=delta)

    def with_saturation(self, s0: float) -> "SystemParams":
        """Copy with the Rabi frequency set so that ``saturation == s0``."""
        if s0 <= 0.0:
            raise ConfigError("target saturation must be positive")
        return replace(self, rabi=math.sqrt(s0 * (self.pump_detuning**2 + 0.25)))

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in _PARAM_FIELDS}

    @classmethod
    def from_dict(cls, data: dict) -> "SystemParams":
        """Build parameters from a flat mapping; unknown keys are rejected."""
        if not isinstance(data, dict):
            raise ConfigError("parameter document must be a JSON object")
        unknown = sorted(set(data) - set(_PARAM_FIELDS))
        if unknown:
            raise ConfigError(f"unknown parameter keys: {', '.join(unknown)}")
        missing = sorted(set(_PARAM_FIELDS) - set(data) - {"ext_damping"})
        if missing:
            raise ConfigError(f"missing parameter keys: {', '.join(missing)}")
        try:
            return cls(**{k: (int(v) if k == "n_atoms" else float(v)) for k, v in data.items()})
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid parameter value: {exc}") from exc

    @classmethod
    def from_json(cls, path) -> "SystemParams":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def default_params() -> SystemParams:
    """Parameter set used for the reference figures.

    N = 150, gamma_1d = 0.25, omega_r = 1e-3, and a pump amplitude giving
    s0 = 0.01 on resonance (Omega = 0.05), which keeps the chain far from
    saturation.  The detuning defaults to -15 and is usually overridden.
    """
    return SystemParams(
        n_atoms=150,
        gamma_1d=0.25,
        rabi=0.05,
        pump_detuning=-15.0,
        recoil=1e-3,
        ext_damping=0.0,
    )


def nondimensional_velocity_factor(params: SystemParams) -> float:
    """Conversion factor between momentum and velocity in reduced units.

    With z in lambda0, p in hbar*k0 and t in 1/Gamma, Newton's
    dz/dt = p/m becomes dz/dt = (omega_r / pi) * p: substituting
    hbar k0 / (m lambda0 Gamma) = 2 omega_r / (k0 lambda0 Gamma)
    = omega_r / (pi Gamma).
    """
    return params.recoil / math.pi


@dataclass
class ChainState:
    """Positions, momenta and coherences of the chain at one instant."""

    z: np.ndarray
    p: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        self.z = np.asarray(self.z, dtype=float)
        self.p = np.asarray(self.p, dtype=float)
        self.sigma = np.asarray(self.sigma, dtype=complex)

    @property
    def n(self) -> int:
        return self.z.size

    def validate(self):
        """Raise unless the state is finite, consistent and ordered."""
        if not (self.z.shape == self.p.shape == self.sigma.shape):
            raise InvalidStateError("z, p and sigma must have identical shapes")
        if not (np.all(np.isfinite(self.z)) and np.all(np.isfinite(self.p))
                and np.all(np.isfinite(self.sigma))):
            raise InvalidStateError("state contains non-finite entries")
        if self.z.size > 1 and not np.all(np.diff(self.z) > 0.0):
            raise InvalidStateError("positions must be strictly increasing")
        return self

    def copy(self) -> "ChainState":
        return ChainState(self.z.copy(), self.p.copy(), self.sigma.copy())

    @classmethod
    def at_rest(cls, z) -> "ChainState":
        """State with zero momentum and zero coherence at the given positions."""
        z = np.asarray(z, dtype=float)
        return cls(z, np.zeros_like(z), np.zeros(z.size, dtype=complex))


@dataclass(frozen=True)
class FractionalConfig:
    """Fractional positions f_j = z_j mod 1 with the convention f in (0, 1]."""

    f: np.ndarray = field(repr=False)

    def __post_init__(self):
        f = np.asarray(self.f, dtype=float)
        object.__setattr__(self, "f", f)
        if not np.all(np.isfinite(f)):
            raise InvalidStateError("fractional positions must be finite")
        if np.any(f <= 0.0) or np.any(f > 1.0):
            raise InvalidStateError("fractional positions must lie in (0, 1]")

    @property
    def n(self) -> int:
        return self.f.size


def fractional_positions(z) -> FractionalConfig:
    """Reduce positions to their observable fractional parts.

    Because the guided-mode interaction is periodic in the separations,
    only f_j = z_j - ceil(z_j - 1) matters; integer offsets n_j are
    unobservable.  Integer positions map to f = 1, keeping f in (0, 1].
    """
    z = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(z)):
        raise InvalidStateError("positions must be finite")
    f = z - np.ceil(z - 1.0)
    return FractionalConfig(f)
