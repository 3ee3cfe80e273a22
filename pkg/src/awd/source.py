"""Explosion-style point source: Gaussian spatial kernel, analytic wavelet.

The forcing term is separable,

    f(x, t) = amplitude * wavelet(t) * exp(-|x - epicenter|^2 / (2 sigma^2)),

with the wavelet unit-normalized (value 1 at its delay t0) so amplitude
scaling stays exactly linear.  Kernel values below 1e-12 of the peak are
truncated to zero; the resulting field differs from the untruncated one
by at most 1e-12 * amplitude anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Grid, ScalarField
from .errors import ConfigurationError

KERNEL_TRUNCATION = 1e-12


@dataclass(frozen=True)
class Wavelet:
    """Temporal source signature, unit-normalized at t = t0.

    * ``"ricker"``: (1 - 2 pi^2 f0^2 tau^2) exp(-pi^2 f0^2 tau^2), tau = t - t0.
    * ``"gaussian-pulse"``: exp(-tau^2 / (2 tau_w^2)).
    """

    kind: str
    f0: float = 0.0
    tau_w: float = 0.0
    t0: float = 0.0

    def __post_init__(self):
        if self.kind == "ricker":
            if not self.f0 > 0.0:
                raise ConfigurationError(
                    f"ricker wavelet needs f0 > 0, got {self.f0}"
                )
        elif self.kind == "gaussian-pulse":
            if not self.tau_w > 0.0:
                raise ConfigurationError(
                    f"gaussian-pulse wavelet needs tau_w > 0, got {self.tau_w}"
                )
        else:
            raise ConfigurationError(f"unknown wavelet kind {self.kind!r}")
        if self.t0 < 0.0:
            raise ConfigurationError(f"wavelet delay t0 must be >= 0, got {self.t0}")


def wavelet_value(w: Wavelet, t: float) -> float:
    """Evaluate the wavelet scaling factor at time t."""
    tau = t - w.t0
    if w.kind == "ricker":
        a = (math.pi * w.f0 * tau) ** 2
        return (1.0 - 2.0 * a) * math.exp(-a)
    return math.exp(-(tau * tau) / (2.0 * w.tau_w * w.tau_w))


@dataclass(frozen=True)
class SourceSpec:
    """Point disturbance: epicenter, amplitude, kernel width, wavelet."""

    epicenter: tuple[float, ...]
    amplitude: float = 1.0
    sigma: float = 3.0
    wavelet: Wavelet = Wavelet(kind="ricker", f0=5.0)

    def __post_init__(self):
        object.__setattr__(
            self, "epicenter", tuple(float(x) for x in self.epicenter)
        )
        if not math.isfinite(self.amplitude):
            raise ConfigurationError("source amplitude must be finite")
        if not self.sigma > 0.0:
            raise ConfigurationError(f"kernel radius must be positive, got {self.sigma}")

    def validate(self, grid: Grid) -> None:
        """Check grid-dependent invariants: margin and kernel resolvability."""
        if len(self.epicenter) != grid.ndim:
            raise ConfigurationError(
                f"epicenter has {len(self.epicenter)} coordinates, "
                f"grid is {grid.ndim}-D"
            )
        if self.sigma < max(grid.spacing):
            raise ConfigurationError(
                f"kernel radius {self.sigma} is below one grid spacing "
                f"{max(grid.spacing)}; kernel would not be resolvable"
            )
        for i, x in enumerate(self.epicenter):
            half = grid.extent[i] / 2.0
            margin = half - abs(x)
            if margin < 2.0 * self.sigma:
                raise ConfigurationError(
                    f"epicenter[{i}] = {x} is {margin} m from the boundary; "
                    f"margin must be >= 2 sigma = {2.0 * self.sigma} m"
                )


def spatial_kernel(spec: SourceSpec, grid: Grid) -> np.ndarray:
    """Unit-peak Gaussian kernel sampled on the grid, truncated at 1e-12."""
    coords = grid.coordinate_arrays()
    r2 = np.zeros(grid.shape)
    for i, c in enumerate(coords):
        d = c - spec.epicenter[i]
        r2 = r2 + d * d
    kernel = np.exp(-r2 / (2.0 * spec.sigma * spec.sigma))
    kernel[kernel < KERNEL_TRUNCATION] = 0.0
    return kernel


def force_field(spec: SourceSpec, grid: Grid, t: float) -> ScalarField:
    """External force at time t, sampled on the grid."""
    spec.validate(grid)
    w = wavelet_value(spec.wavelet, t)
    return ScalarField(grid, spec.amplitude * w * spatial_kernel(spec, grid))
