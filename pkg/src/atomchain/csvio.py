"""Deterministic CSV output with provenance headers, and state-file IO.

Every file starts with a single '#'-prefixed provenance comment followed
by a plain header row.  Floats are written with shortest-roundtrip repr,
so identical inputs produce byte-identical files.
"""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .model import ChainState

ARTIFACT_VERSION = "0.1.0"

STATE_HEADER = ["j", "z", "p", "re_sigma", "im_sigma"]


def format_value(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return repr(float(x))


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def provenance_line(config: dict | None = None, seed: int | None = None, **extra) -> str:
    parts = [f"tool=atomchain version={ARTIFACT_VERSION}"]
    if config is not None:
        parts.append(f"config_sha256={config_hash(config)}")
    if seed is not None:
        parts.append(f"seed={seed}")
    parts.extend(f"{k}={v}" for k, v in extra.items())
    return "provenance: " + " ".join(parts)


def write_csv(path, header: list[str], rows, provenance: str = ""):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        if provenance:
            fh.write(f"# {provenance}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(v) for v in row])
    return path


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    """Read a CSV written by write_csv; returns (header, data rows)."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    if not rows:
        raise ConfigError(f"{path}: empty CSV")
    return rows[0], rows[1:]


def write_state(path, state: ChainState, provenance: str = ""):
    rows = (
        [j + 1, state.z[j], state.p[j], state.sigma[j].real, state.sigma[j].imag]
        for j in range(state.n)
    )
    return write_csv(path, STATE_HEADER, rows, provenance)


def read_state(path) -> ChainState:
    header, rows = read_csv(path)
    if header != STATE_HEADER:
        raise ConfigError(f"{path}: expected state columns {STATE_HEADER}, got {header}")
    if not rows:
        raise ConfigError(f"{path}: state file has no atoms")
    data = np.array([[float(v) for v in row] for row in rows])
    order = np.argsort(data[:, 0])
    data = data[order]
    return ChainState(data[:, 1], data[:, 2], data[:, 3] + 1j * data[:, 4]).validate()
