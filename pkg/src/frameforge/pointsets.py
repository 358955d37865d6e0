"""Finitely described infinite point sets and weighted combs.

Every supported set family carries exact upper/lower Beurling densities in
closed form; a sliding-window counting estimator is provided as an
independent cross-check.  In one dimension each family reduces to a pair of
tail densities (far-left, far-right), and densities of weighted sums combine
additively per tail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import InputError
from .geometry import Box, Lattice

Vec = tuple[float, ...]


def _as_points(pts: Iterable[Sequence[float] | float], dim: int) -> tuple[Vec, ...]:
    out = []
    for p in pts:
        if isinstance(p, (int, float)):
            p = (float(p),)
        else:
            p = tuple(float(v) for v in p)
        if len(p) != dim:
            raise InputError(f"point {p} has dimension {len(p)}, expected {dim}")
        out.append(p)
    return tuple(out)


def _lexsort(pts: np.ndarray) -> np.ndarray:
    if len(pts) == 0:
        return pts
    return pts[np.lexsort(pts[:, ::-1].T)]


class StructuredPointSet:
    """Base class; subclasses describe one infinite (or finite) discrete set."""

    dim: int

    def points_in_box(self, box: Box) -> np.ndarray:
        """Exactly the points inside the half-open box, lexicographically sorted."""
        raise NotImplementedError

    def count_in_box(self, box: Box) -> float:
        return float(len(self.points_in_box(box)))

    def tail_densities(self) -> tuple[float, float]:
        """(far-left, far-right) asymptotic densities; 1-D only."""
        raise NotImplementedError

    def uniform_density(self) -> Optional[float]:
        """Common value of the upper and lower density, if the set has one."""
        return None

    def anchor_interval(self) -> tuple[float, float]:
        """1-D interval containing the non-periodic part of the structure."""
        raise NotImplementedError

    def min_period(self) -> Optional[float]:
        return None


@dataclass(frozen=True)
class LatticeCosets(StructuredPointSet):
    """Union of finitely many cosets of a full-rank lattice."""

    lattice: Lattice
    offsets: tuple[Vec, ...] = ((0.0,),)

    def __post_init__(self):
        offs = _as_points(self.offsets, self.lattice.dim)
        object.__setattr__(self, "offsets", offs)
        if not offs:
            raise InputError("lattice_cosets needs at least one offset")
        # offsets must be distinct modulo the lattice
        inv = np.linalg.inv(self.lattice.matrix)
        reduced = [np.asarray(o) @ inv.T for o in offs]
        for i in range(len(reduced)):
            for j in range(i + 1, len(reduced)):
                frac = reduced[i] - reduced[j]
                if np.max(np.abs(frac - np.round(frac))) < 1e-9:
                    raise InputError(f"offsets {offs[i]} and {offs[j]} coincide mod lattice")

    @property
    def dim(self) -> int:
        return self.lattice.dim

    def points_in_box(self, box: Box) -> np.ndarray:
        parts = []
        for o in self.offsets:
            shifted = Box(tuple(a - v for a, v in zip(box.lo, o)),
                          tuple(b - v for b, v in zip(box.hi, o)))
            pts = self.lattice.points_in_box(shifted)
            if len(pts):
                parts.append(pts + np.asarray(o))
        if not parts:
            return np.empty((0, self.dim))
        return _lexsort(np.vstack(parts))

    def uniform_density(self) -> float:
        return len(self.offsets) / self.lattice.covolume

    def tail_densities(self) -> tuple[float, float]:
        if self.dim != 1:
            raise InputError("tail densities are one-dimensional")
        rho = self.uniform_density()
        return (rho, rho)

    def anchor_interval(self) -> tuple[float, float]:
        vals = [o[0] for o in self.offsets] + [0.0, self.lattice.covolume]
        return (min(vals), max(vals))

    def min_period(self) -> float:
        return self.lattice.covolume


@dataclass(frozen=True)
class EventuallyPeriodic1D(StructuredPointSet):
    """Two arithmetic tails plus a finite core on the real line.

    Right tail: {right_start + n * right_period : n >= 0}; left tail:
    {left_start - n * left_period : n >= 0}; either may be absent.
    """

    right_period: Optional[float] = None
    right_start: float = 0.0
    left_period: Optional[float] = None
    left_start: float = 0.0
    core: tuple[float, ...] = ()

    dim = 1

    def __post_init__(self):
        core = tuple(sorted(float(c) for c in self.core))
        object.__setattr__(self, "core", core)
        for name in ("right_period", "left_period"):
            p = getattr(self, name)
            if p is not None and not p > 0:
                raise InputError(f"{name} must be positive or None, got {p}")
        if len(set(core)) != len(core):
            raise InputError("core points must be distinct")
        for c in core:
            if self._in_tail(c):
                raise InputError(f"core point {c} collides with a periodic tail")

    def _in_tail(self, x: float) -> bool:
        if self.right_period is not None:
            t = (x - self.right_start) / self.right_period
            if t > -1e-12 and abs(t - round(t)) < 1e-12:
                return True
        if self.left_period is not None:
            t = (self.left_start - x) / self.left_period
            if t > -1e-12 and abs(t - round(t)) < 1e-12:
                return True
        return False

    def points_in_box(self, box: Box) -> np.ndarray:
        if box.dim != 1:
            raise InputError("EventuallyPeriodic1D lives on the real line")
        lo, hi = box.lo[0], box.hi[0]
        parts = [np.array([c for c in self.core if lo <= c < hi])]
        if self.right_period is not None:
            p, s = self.right_period, self.right_start
            n0 = max(0, math.ceil((lo - s) / p - 1e-12))
            n1 = math.floor((hi - s) / p + 1e-12)
            x = s + p * np.arange(n0, n1 + 1)
            parts.append(x[(lo <= x) & (x < hi)])
        if self.left_period is not None:
            p, s = self.left_period, self.left_start
            n0 = max(0, math.ceil((s - hi) / p - 1e-12))
            n1 = math.floor((s - lo) / p + 1e-12)
            x = s - p * np.arange(n0, n1 + 1)
            parts.append(x[(lo <= x) & (x < hi)])
        pts = np.concatenate(parts)
        return np.sort(pts).reshape(-1, 1)

    def tail_densities(self) -> tuple[float, float]:
        d_left = 0.0 if self.left_period is None else 1.0 / self.left_period
        d_right = 0.0 if self.right_period is None else 1.0 / self.right_period
        return (d_left, d_right)

    def uniform_density(self) -> Optional[float]:
        d_left, d_right = self.tail_densities()
        return d_left if d_left == d_right else None

    def anchor_interval(self) -> tuple[float, float]:
        vals = list(self.core)
        if self.right_period is not None:
            vals.append(self.right_start)
        if self.left_period is not None:
            vals.append(self.left_start)
        if not vals:
            vals = [0.0]
        return (min(vals), max(vals))

    def min_period(self) -> Optional[float]:
        ps = [p for p in (self.right_period, self.left_period) if p is not None]
        return min(ps) if ps else None


@dataclass(frozen=True)
class FiniteSet(StructuredPointSet):
    """A finite point set; both Beurling densities vanish."""

    points: tuple[Vec, ...]
    dimension: int = 1

    def __post_init__(self):
        pts = _as_points(self.points, self.dimension)
        object.__setattr__(self, "points", pts)
        if len(set(pts)) != len(pts):
            raise InputError("finite set points must be distinct")

    @property
    def dim(self) -> int:
        return self.dimension

    def points_in_box(self, box: Box) -> np.ndarray:
        pts = np.array([p for p in self.points if box.contains(p)], dtype=float)
        return _lexsort(pts.reshape(-1, self.dim))

    def uniform_density(self) -> float:
        return 0.0

    def tail_densities(self) -> tuple[float, float]:
        return (0.0, 0.0)

    def anchor_interval(self) -> tuple[float, float]:
        xs = [p[0] for p in self.points] or [0.0]
        return (min(xs), max(xs))


@dataclass(frozen=True)
class FinitePerturbation(StructuredPointSet):
    """A structured set with finitely many points added and removed."""

    base: StructuredPointSet
    added: tuple[Vec, ...] = ()
    removed: tuple[Vec, ...] = ()

    def __post_init__(self):
        added = _as_points(self.added, self.base.dim)
        removed = _as_points(self.removed, self.base.dim)
        object.__setattr__(self, "added", added)
        object.__setattr__(self, "removed", removed)
        for p in added:
            if self._base_contains(p):
                raise InputError(f"added point {p} already belongs to the base set")
        for p in removed:
            if not self._base_contains(p):
                raise InputError(f"removed point {p} does not belong to the base set")

    def _base_contains(self, p: Vec) -> bool:
        eps = 1e-9
        probe = Box(tuple(v - eps for v in p), tuple(v + eps for v in p))
        return len(self.base.points_in_box(probe)) > 0

    @property
    def dim(self) -> int:
        return self.base.dim

    def points_in_box(self, box: Box) -> np.ndarray:
        pts = self.base.points_in_box(box)
        keep = [p for p in pts if not any(np.allclose(p, r, atol=1e-12) for r in self.removed)]
        extra = [p for p in self.added if box.contains(p)]
        allpts = np.array([tuple(p) for p in keep] + list(extra), dtype=float)
        return _lexsort(allpts.reshape(-1, self.dim))

    def uniform_density(self) -> Optional[float]:
        return self.base.uniform_density()

    def tail_densities(self) -> tuple[float, float]:
        return self.base.tail_densities()

    def anchor_interval(self) -> tuple[float, float]:
        a, b = self.base.anchor_interval()
        xs = [p[0] for p in self.added] + [p[0] for p in self.removed]
        if xs:
            a, b = min(a, *xs), max(b, *xs)
        return (a, b)

    def min_period(self) -> Optional[float]:
        return self.base.min_period()


def integers(dim: int = 1, scale: float = 1.0) -> LatticeCosets:
    """The scaled integer lattice as a structured set."""
    zero = tuple(0.0 for _ in range(dim))
    return LatticeCosets(Lattice.scaled_integers(scale, dim), (zero,))


@dataclass(frozen=True)
class WeightedComb:
    """Positive combination of Dirac combs over structured supports."""

    terms: tuple[tuple[float, StructuredPointSet], ...]

    def __post_init__(self):
        terms = tuple((float(w), s) for w, s in self.terms)
        object.__setattr__(self, "terms", terms)
        if not terms:
            raise InputError("a weighted comb needs at least one term")
        dims = {s.dim for _, s in terms}
        if len(dims) != 1:
            raise InputError(f"mixed support dimensions: {dims}")
        for w, _ in terms:
            if not w > 0:
                raise InputError(f"weights must be strictly positive, got {w}")

    @staticmethod
    def single(support: StructuredPointSet, weight: float = 1.0) -> "WeightedComb":
        return WeightedComb(((weight, support),))

    @property
    def dim(self) -> int:
        return self.terms[0][1].dim

    def mass_in_box(self, box: Box) -> float:
        return float(sum(w * s.count_in_box(box) for w, s in self.terms))

    def scaled(self, c: float) -> "WeightedComb":
        if not c > 0:
            raise InputError("scaling factor must be positive")
        return WeightedComb(tuple((c * w, s) for w, s in self.terms))

    def plus(self, other: "WeightedComb") -> "WeightedComb":
        return WeightedComb(self.terms + other.terms)


@dataclass(frozen=True)
class DensityReport:
    lower: float
    upper: float
    method: str  # "closed_form" | "windowed_estimate"
    estimator_trace: tuple[tuple[float, float, float], ...] = ()

    def __post_init__(self):
        if self.lower > self.upper + 1e-12:
            raise InputError(f"density report with lower {self.lower} > upper {self.upper}")


def density_closed_form(comb: WeightedComb) -> DensityReport:
    """Exact Beurling densities of a weighted comb of structured supports.

    In 1-D every supported family contributes a pair of tail densities and
    these add across terms; the upper density is the larger tail and the
    lower density the smaller one.  In higher dimension all supported
    families have equal upper and lower densities, which add.
    """
    if comb.dim == 1:
        try:
            d_left = sum(w * s.tail_densities()[0] for w, s in comb.terms)
            d_right = sum(w * s.tail_densities()[1] for w, s in comb.terms)
        except NotImplementedError:
            return density_windowed(comb, (100.0, 1000.0), 400)
        return DensityReport(min(d_left, d_right), max(d_left, d_right), "closed_form")
    rho = 0.0
    for w, s in comb.terms:
        u = s.uniform_density()
        if u is None:
            return density_windowed(comb, (100.0, 1000.0), 400)
        rho += w * u
    return DensityReport(rho, rho, "closed_form")


def density_windowed(comb: WeightedComb, h_list: Sequence[float],
                     x_samples: int = 400) -> DensityReport:
    """Sliding-window estimate of the Beurling densities.

    For each window size h the cube of side h is slid over a sampling grid
    covering one structural period cell plus 3h into each tail; the reported
    densities come from the largest h.
    """
    hs = sorted(float(h) for h in h_list)
    if not hs:
        raise InputError("h_list must be non-empty")
    if x_samples < 2:
        raise InputError("x_samples must be at least 2")
    d = comb.dim
    trace = []
    for h in hs:
        if d == 1:
            anchors = [s.anchor_interval() for _, s in comb.terms]
            a = min(x[0] for x in anchors) - 3.0 * h
            b = max(x[1] for x in anchors) + 3.0 * h
            periods = [s.min_period() for _, s in comb.terms]
            periods = [p for p in periods if p is not None]
            step = min(periods) / 4.0 if periods else (b - a) / x_samples
            n_steps = int(math.floor((b - a) / step)) + 1
            if n_steps > x_samples:
                xs = np.linspace(a, b, x_samples)
            else:
                xs = a + step * np.arange(n_steps)
            counts = np.array([comb.mass_in_box(Box((x - h / 2.0,), (x + h / 2.0,)))
                               for x in xs])
        else:
            per_axis = max(2, int(round(x_samples ** (1.0 / d))))
            axes = [np.linspace(-h, h, per_axis) for _ in range(d)]
            mesh = np.meshgrid(*axes, indexing="ij")
            xs = np.stack([m.ravel() for m in mesh], axis=1)
            counts = np.array([comb.mass_in_box(
                Box(tuple(v - h / 2.0 for v in x), tuple(v + h / 2.0 for v in x)))
                for x in xs])
        trace.append((h, float(counts.min()) / h ** d, float(counts.max()) / h ** d))
    lower, upper = trace[-1][1], trace[-1][2]
    return DensityReport(lower, upper, "windowed_estimate", tuple(trace))


def enumerate_in_box(support: StructuredPointSet, box: Box) -> np.ndarray:
    """Points of the structured set inside the half-open box, sorted."""
    return support.points_in_box(box)
