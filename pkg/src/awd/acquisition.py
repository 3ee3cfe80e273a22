"""Interrogators (virtual seismometers) and fixed-rate seismograms.

An interrogator samples the displacement field at a fixed position by
multilinear interpolation each solver step; the raw per-step series is
then resampled to the requested output rate by linear interpolation in
time, so the output rate is decoupled from the CFL-driven solver step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import interpolate
from .errors import ConfigurationError, OutOfDomainError


@dataclass(frozen=True)
class Interrogator:
    """A named probe position in domain coordinates."""

    position: tuple[float, ...]
    id: str

    def __post_init__(self):
        object.__setattr__(
            self, "position", tuple(float(x) for x in self.position)
        )


@dataclass(frozen=True, eq=False)
class Seismogram:
    """Displacement samples at a fixed rate, starting at t = 0."""

    interrogator_id: str
    rate: float
    samples: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.samples, dtype=np.float64)
        if vals.ndim != 1:
            raise ConfigurationError("seismogram samples must be one-dimensional")
        if not np.isfinite(vals).all():
            raise ConfigurationError("seismogram samples must be finite")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "samples", vals)

    @property
    def t0(self) -> float:
        return 0.0

    def times(self) -> np.ndarray:
        return np.arange(len(self.samples)) / self.rate


def sample_count(duration: float, rate: float) -> int:
    """Number of output samples for a duration at a rate: floor(T*rate) + 1."""
    return int(math.floor(duration * rate)) + 1


def probe(state, interrogator: Interrogator) -> float:
    """Displacement at the interrogator position (current time level)."""
    if not state.u_curr.grid.contains(interrogator.position):
        raise OutOfDomainError(
            f"interrogator {interrogator.id!r} at {interrogator.position} "
            f"is outside the domain"
        )
    return interpolate(state.u_curr, interrogator.position)


def resample(raw, dt: float, rate: float, duration: float,
             interrogator_id: str = "") -> Seismogram:
    """Resample per-step samples (spacing dt) onto the output grid k/rate.

    The solver must oversample the output: dt <= 1/rate.  Each output
    instant is linearly interpolated between the two bracketing steps;
    instants that land exactly on a step reproduce the raw value
    bit-identically.
    """
    if dt > 1.0 / rate:
        raise ConfigurationError(
            f"solver dt = {dt} exceeds the output sample period {1.0 / rate}; "
            f"the solver must oversample the output rate"
        )
    raw = np.asarray(raw, dtype=np.float64)
    n_out = sample_count(duration, rate)
    out = np.empty(n_out)
    n_raw = len(raw)
    for k in range(n_out):
        p = (k / rate) / dt
        j = min(int(math.floor(p)), n_raw - 2)
        if j < 0:
            j = 0
        theta = p - j
        out[k] = raw[j] * (1.0 - theta) + raw[j + 1] * theta
    return Seismogram(interrogator_id=interrogator_id, rate=rate, samples=out)
