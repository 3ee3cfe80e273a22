"""Spatial grids, scalar fields, and the discrete Laplacian.

Conventions fixed here and used by every other module:

* Uniform grids in 2 or 3 dimensions, at least 5 points per axis.
* Centered coordinates: axis ``i`` spans ``[-extent[i]/2, +extent[i]/2]``,
  so grid index ``k`` maps to ``-extent[i]/2 + k * spacing[i]`` with
  ``spacing[i] = extent[i] / (points[i] - 1)``.
* Field values are dense ``float64`` arrays in row-major axis order and
  are frozen (read-only) after construction, so fields can be shared
  across threads freely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, OutOfDomainError

MIN_POINTS_PER_AXIS = 5


@dataclass(frozen=True)
class Grid:
    """Uniform spatial discretization of a centered rectangular domain."""

    ndim: int
    points: tuple[int, ...]
    extent: tuple[float, ...]
    spacing: tuple[float, ...] = field(init=False)

    def __post_init__(self):
        if self.ndim not in (2, 3):
            raise ConfigurationError(f"grid.ndim must be 2 or 3, got {self.ndim}")
        if len(self.points) != self.ndim or len(self.extent) != self.ndim:
            raise ConfigurationError(
                f"grid.points/extent must have length {self.ndim}, "
                f"got {len(self.points)}/{len(self.extent)}"
            )
        for i, n in enumerate(self.points):
            if n < MIN_POINTS_PER_AXIS:
                raise ConfigurationError(
                    f"grid.points[{i}] = {n} is below the minimum of "
                    f"{MIN_POINTS_PER_AXIS} (boundary ring plus stencil interior)"
                )
        spacing = []
        for i, (n, ext) in enumerate(zip(self.points, self.extent)):
            h = ext / (n - 1)
            if not (h > 0.0 and math.isfinite(h)):
                raise ConfigurationError(
                    f"grid.extent[{i}] = {ext} yields non-positive or "
                    f"non-finite spacing"
                )
            spacing.append(h)
        object.__setattr__(self, "points", tuple(int(n) for n in self.points))
        object.__setattr__(self, "extent", tuple(float(e) for e in self.extent))
        object.__setattr__(self, "spacing", tuple(spacing))

    @property
    def shape(self) -> tuple[int, ...]:
        return self.points

    @property
    def n_points(self) -> int:
        return int(np.prod(self.points))

    def axis_min(self, axis: int) -> float:
        return -self.extent[axis] / 2.0

    def axis_coordinates(self, axis: int) -> np.ndarray:
        """Coordinates along one axis: -extent/2 + k * spacing."""
        return self.axis_min(axis) + self.spacing[axis] * np.arange(
            self.points[axis], dtype=np.float64
        )

    def coordinate_arrays(self) -> list[np.ndarray]:
        """Open (broadcastable) coordinate arrays, one per axis."""
        return list(
            np.meshgrid(
                *(self.axis_coordinates(i) for i in range(self.ndim)),
                indexing="ij",
                sparse=True,
            )
        )

    def contains(self, position) -> bool:
        if len(position) != self.ndim:
            return False
        return all(
            -self.extent[i] / 2.0 <= float(position[i]) <= self.extent[i] / 2.0
            for i in range(self.ndim)
        )


def make_grid(ndim: int, points, extent) -> Grid:
    """Build a grid; spacing is derived as extent / (points - 1) per axis."""
    return Grid(ndim=ndim, points=tuple(points), extent=tuple(extent))


def _freeze(values: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(values, dtype=np.float64)
    if out is values:
        out = values.copy()
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Dense float64 values over a grid, immutable after construction."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.shape != self.grid.shape:
            raise ConfigurationError(
                f"field values shape {vals.shape} does not match grid "
                f"shape {self.grid.shape}"
            )
        if not np.isfinite(vals).all():
            raise ConfigurationError("field values must be finite (no NaN/Inf)")
        object.__setattr__(self, "values", _freeze(vals))

    def min(self) -> float:
        return float(self.values.min())

    def max(self) -> float:
        return float(self.values.max())


def field_from_function(grid: Grid, fn) -> ScalarField:
    """Sample ``fn(*coordinate_arrays)`` onto the grid."""
    coords = grid.coordinate_arrays()
    vals = np.broadcast_to(fn(*coords), grid.shape).astype(np.float64)
    return ScalarField(grid=grid, values=vals)


def constant_field(grid: Grid, value: float) -> ScalarField:
    return ScalarField(grid=grid, values=np.full(grid.shape, float(value)))


def laplacian_values(grid: Grid, u: np.ndarray) -> np.ndarray:
    """Second-order central Laplacian of raw values; boundary ring is 0.

    The boundary ring carries no stencil value of its own — the solver's
    boundary policy decides what happens there.  Summation order is fixed
    (axis 0, 1[, 2]), so results are bit-identical across runs.
    """
    out = np.zeros_like(u)
    core = tuple(slice(1, -1) for _ in range(grid.ndim))
    for axis in range(grid.ndim):
        inv_h2 = 1.0 / (grid.spacing[axis] * grid.spacing[axis])
        lo = tuple(
            slice(0, -2) if a == axis else slice(1, -1) for a in range(grid.ndim)
        )
        hi = tuple(
            slice(2, None) if a == axis else slice(1, -1) for a in range(grid.ndim)
        )
        out[core] += (u[hi] - 2.0 * u[core] + u[lo]) * inv_h2
    return out


def laplacian(u: ScalarField) -> ScalarField:
    """Discrete Laplacian (5-point in 2D, 7-point in 3D) on interior points."""
    return ScalarField(grid=u.grid, values=laplacian_values(u.grid, u.values))


def _cell_and_fraction(grid: Grid, position) -> tuple[tuple[int, ...], np.ndarray]:
    pos = [float(p) for p in position]
    if len(pos) != grid.ndim:
        raise OutOfDomainError(
            f"position has {len(pos)} coordinates, grid is {grid.ndim}-D"
        )
    idx = []
    frac = np.empty(grid.ndim)
    for i, p in enumerate(pos):
        half = grid.extent[i] / 2.0
        if not (-half <= p <= half):
            raise OutOfDomainError(
                f"position[{i}] = {p} outside domain [{-half}, {half}]"
            )
        q = (p - grid.axis_min(i)) / grid.spacing[i]
        k = int(math.floor(q))
        k = min(max(k, 0), grid.points[i] - 2)
        idx.append(k)
        frac[i] = q - k
    return tuple(idx), frac


def interpolation_weights(grid: Grid, position) -> tuple[np.ndarray, np.ndarray]:
    """Flat corner indices and weights for interpolation at one position.

    Precompute these once when the same position is sampled repeatedly
    (interrogators probe every time step); ``apply_weights`` then performs
    the identical arithmetic to ``interpolate``.
    """
    idx, frac = _cell_and_fraction(grid, position)
    strides = np.cumprod((grid.points[1:] + (1,))[::-1])[::-1]
    flat = np.empty(1 << grid.ndim, dtype=np.intp)
    weights = np.empty(1 << grid.ndim, dtype=np.float64)
    for corner in range(1 << grid.ndim):
        w = 1.0
        off = 0
        for i in range(grid.ndim):
            if corner >> i & 1:
                w *= frac[i]
                off += (idx[i] + 1) * strides[i]
            else:
                w *= 1.0 - frac[i]
                off += idx[i] * strides[i]
        flat[corner] = off
        weights[corner] = w
    return flat, weights


def apply_weights(values: np.ndarray, flat: np.ndarray, weights: np.ndarray) -> float:
    # Sequential accumulation in corner order: deterministic and identical
    # between interpolate() and the per-step probe fast path.
    vals = values.ravel()[flat].tolist()
    acc = 0.0
    for v, w in zip(vals, weights.tolist()):
        acc += w * v
    return acc


def interpolate(u: ScalarField, position) -> float:
    """Multilinear interpolation of a field at a physical position.

    Bilinear in 2D, trilinear in 3D; exact on grid nodes and on fields
    that are multilinear within a cell.
    """
    flat, weights = interpolation_weights(u.grid, position)
    return apply_weights(u.values, flat, weights)
