"""Complex samples on a uniform grid with per-cell quadrature weights.

The grid subdivides a bounding box into n^d equal cells; samples live at
cell centers and integrals use the midpoint rule.  When a grid function is
attached to a box-union domain, each cell weight is the exact volume of the
cell's intersection with the domain, so restriction to the domain costs no
quadrature error for piecewise-constant data.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import InputError
from .geometry import Box, BoxUnionSet


def grid_centers(box: Box, n: int) -> list[np.ndarray]:
    """Per-axis cell-center coordinates for an n-per-axis grid on the box."""
    if n < 1:
        raise InputError(f"grid needs at least one cell per axis, got {n}")
    axes = []
    for a, b in zip(box.lo, box.hi):
        step = (b - a) / n
        axes.append(a + step * (np.arange(n) + 0.5))
    return axes


def cell_volumes(box: Box, n: int, omega: Optional[BoxUnionSet] = None) -> np.ndarray:
    """Cell weights: full cell volume, or |cell ∩ omega| when a domain is given."""
    d = box.dim
    steps = [(b - a) / n for a, b in zip(box.lo, box.hi)]
    if omega is None:
        full = float(np.prod(steps))
        return np.full((n,) * d, full)
    if omega.dim != d:
        raise InputError(f"domain dimension {omega.dim} != box dimension {box.dim}")
    weights = np.empty((n,) * d)
    for idx in np.ndindex(*weights.shape):
        lo = tuple(a + i * s for a, i, s in zip(box.lo, idx, steps))
        hi = tuple(a + (i + 1) * s for a, i, s in zip(box.lo, idx, steps))
        weights[idx] = omega.intersection_volume(Box(lo, hi))
    return weights


@dataclass(frozen=True)
class GridFunction:
    bounding_box: Box
    samples: np.ndarray      # complex, shape (n,)*dim
    cell_weights: np.ndarray  # real, same shape

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=complex)
        w = np.asarray(self.cell_weights, dtype=float)
        object.__setattr__(self, "samples", s)
        object.__setattr__(self, "cell_weights", w)
        d = self.bounding_box.dim
        if s.ndim != d or w.shape != s.shape:
            raise InputError(f"samples of shape {s.shape} do not fit a {d}-d grid")
        if len(set(s.shape)) != 1:
            raise InputError("grid must have the same number of cells per axis")
        if w.min() < 0:
            raise InputError("cell weights must be non-negative")
        if w.sum() > self.bounding_box.volume + 1e-9:
            raise InputError("cell weights exceed the bounding box volume")

    @property
    def dim(self) -> int:
        return self.bounding_box.dim

    @property
    def n_per_axis(self) -> int:
        return self.samples.shape[0]

    @property
    def spacing(self) -> tuple[float, ...]:
        n = self.n_per_axis
        return tuple((b - a) / n for a, b in zip(self.bounding_box.lo,
                                                 self.bounding_box.hi))

    def axes(self) -> list[np.ndarray]:
        return grid_centers(self.bounding_box, self.n_per_axis)

    def points(self) -> np.ndarray:
        """All cell centers as an (n^d, d) array in C order."""
        mesh = np.meshgrid(*self.axes(), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def integral(self) -> complex:
        return complex(np.sum(self.samples * self.cell_weights))

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.samples) ** 2 * self.cell_weights))

    def interpolate(self, points: np.ndarray) -> np.ndarray:
        """Multilinear interpolation of the samples; zero outside the box.

        Inside the box but beyond the outermost cell centers the edge sample
        value is held constant, which keeps indicator data exact.
        """
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[1] != self.dim:
            raise InputError(f"query points have dimension {pts.shape[1]}, grid has {self.dim}")
        lo = np.array(self.bounding_box.lo)
        hi = np.array(self.bounding_box.hi)
        inside = np.all((pts >= lo) & (pts < hi), axis=1)
        out = np.zeros(len(pts), dtype=complex)
        if not inside.any():
            return out
        q = pts[inside]
        if self.dim == 1:
            centers = self.axes()[0]
            vals = np.interp(q[:, 0], centers, self.samples.real) \
                + 1j * np.interp(q[:, 0], centers, self.samples.imag)
        else:
            from scipy.ndimage import map_coordinates
            step = np.array(self.spacing)
            coords = ((q - lo) / step - 0.5).T
            vals = map_coordinates(self.samples.real, coords, order=1, mode="nearest") \
                + 1j * map_coordinates(self.samples.imag, coords, order=1, mode="nearest")
        out[inside] = vals
        return out

    @staticmethod
    def from_callable(fn: Callable[[np.ndarray], np.ndarray], box: Box, n: int,
                      omega: Optional[BoxUnionSet] = None) -> "GridFunction":
        """Sample ``fn`` (vectorized over an (m, d) point array) at cell centers."""
        mesh = np.meshgrid(*grid_centers(box, n), indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=1)
        vals = np.asarray(fn(pts), dtype=complex).reshape((n,) * box.dim)
        return GridFunction(box, vals, cell_volumes(box, n, omega))

    @staticmethod
    def indicator(box: Box, n: int) -> "GridFunction":
        return GridFunction(box, np.ones((n,) * box.dim, dtype=complex),
                            cell_volumes(box, n))

    @staticmethod
    def on_domain(fn: Callable[[np.ndarray], np.ndarray], omega: BoxUnionSet,
                  n: int) -> "GridFunction":
        """Sample over the domain's bounding box with exact domain weights."""
        return GridFunction.from_callable(fn, omega.bounding_box(), n, omega=omega)
