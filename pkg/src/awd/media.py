"""Propagation-speed fields: static presets and time-varying modulation.

Speeds are stored in m/s and must be strictly positive everywhere and at
every queried time.  The supremum of the speed over the whole simulation
window is available analytically per modulation kind, which is what the
CFL check consumes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Grid, ScalarField, constant_field
from .errors import ConfigurationError
from .seeding import SplitMix64

FRACTION_SUM_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class TimeModulation:
    """Time dependence of a speed field.

    kinds:
      * ``"sinusoid"``: multiplicative, ``c(x, t) = base(x) * (1 + a sin(2 pi t / period))``
        with amplitude ``a in [0, 1)`` so positivity is preserved.
      * ``"keyframes"``: pointwise linear interpolation between dated fields,
        clamped outside the keyframe range.
    """

    kind: str
    amplitude: float = 0.0
    period: float = 0.0
    keyframes: tuple[tuple[float, ScalarField], ...] = ()

    def __post_init__(self):
        if self.kind == "sinusoid":
            if not 0.0 <= self.amplitude < 1.0:
                raise ConfigurationError(
                    f"modulation.amplitude must be in [0, 1), got {self.amplitude}"
                )
            if not self.period > 0.0:
                raise ConfigurationError(
                    f"modulation.period must be positive, got {self.period}"
                )
        elif self.kind == "keyframes":
            if len(self.keyframes) < 1:
                raise ConfigurationError("modulation.keyframes must be non-empty")
            times = [t for t, _ in self.keyframes]
            if any(b <= a for a, b in zip(times, times[1:])):
                raise ConfigurationError(
                    "modulation.keyframes times must be strictly increasing"
                )
            for t, f in self.keyframes:
                if f.min() <= 0.0:
                    raise ConfigurationError(
                        f"keyframe field at t={t} has non-positive speeds"
                    )
        else:
            raise ConfigurationError(f"unknown modulation kind {self.kind!r}")


@dataclass(frozen=True, eq=False)
class SpeedField:
    """Propagation speed over a grid, optionally time-varying."""

    base: ScalarField
    modulation: TimeModulation | None = None
    name: str = "custom"

    def __post_init__(self):
        if self.base.min() <= 0.0:
            raise ConfigurationError(
                f"speeds must be strictly positive, minimum is {self.base.min()}"
            )
        if self.modulation is not None and self.modulation.kind == "keyframes":
            for t, f in self.modulation.keyframes:
                if f.grid != self.base.grid:
                    raise ConfigurationError(
                        f"keyframe field at t={t} is on a different grid"
                    )

    @property
    def grid(self) -> Grid:
        return self.base.grid

    @property
    def c_min(self) -> float:
        return self.base.min()

    @property
    def c_max(self) -> float:
        return self.base.max()

    @property
    def is_static(self) -> bool:
        return self.modulation is None

    def c_sup(self) -> float:
        """Supremum of speed over all times, per modulation kind."""
        if self.modulation is None:
            return self.c_max
        if self.modulation.kind == "sinusoid":
            return self.c_max * (1.0 + self.modulation.amplitude)
        return max(f.max() for _, f in self.modulation.keyframes)


def speed_at(medium: SpeedField, t: float) -> ScalarField:
    """Evaluate the speed field at time t (>= 0)."""
    if t < 0.0:
        raise ConfigurationError(f"time must be non-negative, got {t}")
    mod = medium.modulation
    if mod is None:
        return medium.base
    if mod.kind == "sinusoid":
        factor = 1.0 + mod.amplitude * math.sin(2.0 * math.pi * t / mod.period)
        return ScalarField(medium.grid, medium.base.values * factor)
    frames = mod.keyframes
    if t <= frames[0][0]:
        return frames[0][1]
    if t >= frames[-1][0]:
        return frames[-1][1]
    for (t0, f0), (t1, f1) in zip(frames, frames[1:]):
        if t0 <= t <= t1:
            theta = (t - t0) / (t1 - t0)
            return ScalarField(
                medium.grid, f0.values * (1.0 - theta) + f1.values * theta
            )
    raise AssertionError("unreachable: keyframe bracketing failed")


def constant_medium(grid: Grid, c: float) -> SpeedField:
    """Homogeneous medium with speed c (> 0) everywhere."""
    if not c > 0.0:
        raise ConfigurationError(f"speed must be positive, got {c}")
    return SpeedField(base=constant_field(grid, c), name="constant")


def gradient_medium(grid: Grid, c_top: float, c_bottom: float) -> SpeedField:
    """Speed ramping linearly along the last (depth) axis."""
    if not (c_top > 0.0 and c_bottom > 0.0):
        raise ConfigurationError(
            f"speeds must be positive, got c_top={c_top}, c_bottom={c_bottom}"
        )
    n = grid.points[-1]
    ramp = c_top + (c_bottom - c_top) * (np.arange(n) / (n - 1))
    shape = [1] * grid.ndim
    shape[-1] = n
    vals = np.broadcast_to(ramp.reshape(shape), grid.shape).copy()
    return SpeedField(base=ScalarField(grid, vals), name="gradient")


def layered_medium(
    grid: Grid,
    layers,
    tilt: float = 0.0,
    fold_amplitude: float = 0.0,
    fold_period: float = 0.0,
    seed: int = 0,
) -> SpeedField:
    """Depth-ordered layers with optional tilt and sinusoidal folding.

    ``layers`` is a list of ``(thickness_fraction, speed)`` pairs ordered
    from the top of the last axis downward; fractions must sum to 1.
    Folding perturbs each layer interface with a sinusoid along axis 0,
    with per-interface phase and amplitude jitter drawn from ``seed``,
    so the same inputs always rebuild the identical field.
    """
    layers = [(float(f), float(c)) for f, c in layers]
    if not layers:
        raise ConfigurationError("layers must be non-empty")
    total = math.fsum(f for f, _ in layers)
    if abs(total - 1.0) > FRACTION_SUM_TOL:
        raise ConfigurationError(
            f"layer thickness fractions must sum to 1, got {total}"
        )
    for i, (f, c) in enumerate(layers):
        if not f > 0.0:
            raise ConfigurationError(f"layers[{i}] thickness must be positive")
        if not c > 0.0:
            raise ConfigurationError(f"layers[{i}] speed must be positive, got {c}")

    depth_axis = grid.ndim - 1
    depth_extent = grid.extent[depth_axis]
    depth = grid.axis_coordinates(depth_axis) - grid.axis_min(depth_axis)
    dshape = [1] * grid.ndim
    dshape[depth_axis] = grid.points[depth_axis]
    depth = depth.reshape(dshape)

    across = grid.axis_coordinates(0)
    ashape = [1] * grid.ndim
    ashape[0] = grid.points[0]
    across = across.reshape(ashape)

    rng = SplitMix64(seed)
    speeds = np.array([c for _, c in layers])
    cum = np.cumsum([f for f, _ in layers])[:-1]  # interface depth fractions

    layer_index = np.zeros(grid.shape, dtype=np.int64)
    for frac in cum:
        phase = rng.next_double() * 2.0 * math.pi
        amp = fold_amplitude * (0.5 + rng.next_double())
        interface = frac * depth_extent + math.tan(tilt) * across
        if fold_period > 0.0 and fold_amplitude != 0.0:
            interface = interface + amp * np.sin(
                2.0 * math.pi * across / fold_period + phase
            )
        layer_index += depth >= interface
    vals = speeds[layer_index]
    return SpeedField(base=ScalarField(grid, vals), name="layered")
