"""Self-organization of laser-driven atoms along a 1D waveguide.

Library layout:

- ``model``        dimensionless parameters and state containers
- ``coherence``    guided-mode coupling matrix and steady-state coherences
- ``dynamics``     optical forces, time integration, relaxation
- ``continuation`` adiabatic detuning sweeps and phase-slip analysis
- ``analytics``    closed-form weak-scattering and spectral-model oracles
- ``phonons``      linearization (K, L) and complex normal modes
- ``optics``       probe spectra, Bloch dispersion, band gap
- ``cli``          reproducible file-based runs (``atomchain`` command)
"""

from .analytics import (
    cavity_model,
    effective_lattice_constant,
    potential_energy,
    weak_lattice,
    weak_max_antidamping,
    weak_phonon_spectrum,
    weak_stiffness_matrix,
)
from .coherence import (
    build_coupling_matrix,
    collective_emission_rates,
    excited_population,
    solve_instantaneous,
)
from .continuation import (
    PhaseSlipDescriptor,
    SweepRecord,
    SweepResult,
    adiabatic_sweep,
    crossover_detuning,
    detect_phase_slip,
    lattice_constant,
)
from .dynamics import (
    Trajectory,
    default_ext_damping,
    force,
    initial_state,
    integrate,
    relax_to_steady_state,
)
from .errors import (
    ConfigError,
    ConvergenceTimeout,
    DegenerateConfigurationError,
    DivergenceError,
    IllConditionedError,
    InvalidStateError,
    NumericalError,
    OrderingViolationError,
    ParameterDomainError,
    SimulationError,
)
from .model import (
    ChainState,
    FractionalConfig,
    SystemParams,
    default_params,
    fractional_positions,
    nondimensional_velocity_factor,
)
from .optics import (
    BlochResult,
    OpticalSpectrum,
    band_gap_edges,
    bloch_dispersion,
    chain_spectrum_spinmodel,
    chain_spectrum_transfer,
    default_probe_grid,
    single_atom_rt,
    spectrum_peak_stats,
)
from .phonons import PhononModes, damping_matrix, normal_modes, stiffness_matrix

__version__ = "0.1.0"
