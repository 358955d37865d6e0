"""Exact geometry of finite unions of axis-aligned boxes.

Domains are stored in canonical form: a disjoint union of half-open boxes
[lo, hi).  Measures, translate overlaps, covering cubes and lattice packing
checks all reduce to arithmetic on box endpoints, so for dyadic-rational
input data every quantity in this module is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np

from .errors import InputError

Vec = tuple[float, ...]


def _as_vec(x: Sequence[float] | float) -> Vec:
    if isinstance(x, (int, float)):
        return (float(x),)
    return tuple(float(v) for v in x)


@dataclass(frozen=True)
class Box:
    """Axis-aligned half-open box [lo, hi); lo[i] < hi[i] on every axis."""

    lo: Vec
    hi: Vec

    def __post_init__(self):
        lo, hi = _as_vec(self.lo), _as_vec(self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if len(lo) != len(hi):
            raise InputError(f"box corners have different lengths: {lo} vs {hi}")
        if not lo:
            raise InputError("box must have at least one dimension")
        for a, b in zip(lo, hi):
            if not a < b:
                raise InputError(f"degenerate box: lo={lo}, hi={hi}")

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def volume(self) -> float:
        v = 1.0
        for a, b in zip(self.lo, self.hi):
            v *= b - a
        return v

    @property
    def sides(self) -> Vec:
        return tuple(b - a for a, b in zip(self.lo, self.hi))

    @property
    def center(self) -> Vec:
        return tuple((a + b) / 2.0 for a, b in zip(self.lo, self.hi))

    def contains(self, point: Sequence[float]) -> bool:
        p = _as_vec(point)
        return all(a <= x < b for a, x, b in zip(self.lo, p, self.hi))

    def translate(self, x: Sequence[float]) -> "Box":
        v = _as_vec(x)
        return Box(tuple(a + s for a, s in zip(self.lo, v)),
                   tuple(b + s for b, s in zip(self.hi, v)))

    def intersect(self, other: "Box") -> Optional["Box"]:
        lo = tuple(max(a, c) for a, c in zip(self.lo, other.lo))
        hi = tuple(min(b, d) for b, d in zip(self.hi, other.hi))
        if all(a < b for a, b in zip(lo, hi)):
            return Box(lo, hi)
        return None


def _sweep_1d(intervals: list[tuple[float, float]]) -> list[tuple[float, float]]:
    """Merge 1-D intervals by endpoint sweep; touching intervals coalesce."""
    ivs = sorted(intervals)
    out = []
    cur_lo, cur_hi = ivs[0]
    for lo, hi in ivs[1:]:
        if lo <= cur_hi:
            cur_hi = max(cur_hi, hi)
        else:
            out.append((cur_lo, cur_hi))
            cur_lo, cur_hi = lo, hi
    out.append((cur_lo, cur_hi))
    return out


def _canonical(boxes: list[tuple[Vec, Vec]], dim: int) -> list[tuple[Vec, Vec]]:
    if dim == 1:
        merged = _sweep_1d([(lo[0], hi[0]) for lo, hi in boxes])
        return [((a,), (b,)) for a, b in merged]
    # Recursive coordinate slicing: cut along axis 0 at every endpoint, then
    # canonicalize the (dim-1)-dimensional cross-section of each slab.
    cuts = sorted({lo[0] for lo, _ in boxes} | {hi[0] for _, hi in boxes})
    out: list[tuple[Vec, Vec]] = []
    pending: Optional[tuple[float, float, list[tuple[Vec, Vec]]]] = None

    def flush():
        nonlocal pending
        if pending is not None:
            a, b, rest = pending
            for rlo, rhi in rest:
                out.append(((a, *rlo), (b, *rhi)))
            pending = None

    for a, b in zip(cuts, cuts[1:]):
        covering = [(lo[1:], hi[1:]) for lo, hi in boxes if lo[0] <= a and b <= hi[0]]
        if not covering:
            flush()
            continue
        rest = _canonical(covering, dim - 1)
        if pending is not None and pending[1] == a and pending[2] == rest:
            pending = (pending[0], b, rest)
        else:
            flush()
            pending = (a, b, rest)
    flush()
    return out


def canonicalize(boxes: Iterable[Box]) -> "BoxUnionSet":
    """Reduce an arbitrary finite box collection to a canonical disjoint union."""
    boxes = list(boxes)
    if not boxes:
        raise InputError("a box union must contain at least one box")
    dim = boxes[0].dim
    for b in boxes:
        if b.dim != dim:
            raise InputError(f"mixed dimensions: {b.dim} vs {dim}")
    canon = _canonical([(b.lo, b.hi) for b in boxes], dim)
    return BoxUnionSet(dim=dim, boxes=tuple(Box(lo, hi) for lo, hi in canon))


@dataclass(frozen=True)
class BoxUnionSet:
    """Canonical disjoint union of half-open boxes; use ``canonicalize`` to build."""

    dim: int
    boxes: tuple[Box, ...]

    @staticmethod
    def from_boxes(boxes: Iterable[Box]) -> "BoxUnionSet":
        return canonicalize(boxes)

    @staticmethod
    def from_intervals(intervals: Iterable[tuple[float, float]]) -> "BoxUnionSet":
        return canonicalize([Box((a,), (b,)) for a, b in intervals])

    def measure(self) -> float:
        return float(sum(b.volume for b in self.boxes))

    def bounding_box(self) -> Box:
        lo = tuple(min(b.lo[i] for b in self.boxes) for i in range(self.dim))
        hi = tuple(max(b.hi[i] for b in self.boxes) for i in range(self.dim))
        return Box(lo, hi)

    def translate(self, x: Sequence[float]) -> "BoxUnionSet":
        return BoxUnionSet(self.dim, tuple(b.translate(x) for b in self.boxes))

    def contains(self, point: Sequence[float]) -> bool:
        return any(b.contains(point) for b in self.boxes)

    def intersect_box(self, box: Box) -> list[Box]:
        """Pieces of the set inside ``box`` (possibly empty)."""
        out = []
        for b in self.boxes:
            piece = b.intersect(box)
            if piece is not None:
                out.append(piece)
        return out

    def intersection_volume(self, box: Box) -> float:
        return float(sum(p.volume for p in self.intersect_box(box)))

    def _corner_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        los = np.array([b.lo for b in self.boxes], dtype=float)
        his = np.array([b.hi for b in self.boxes], dtype=float)
        return los, his


def measure(omega: BoxUnionSet) -> float:
    return omega.measure()


def _normalize_sign(x: np.ndarray) -> np.ndarray:
    # |omega ∩ (omega+x)| = |omega ∩ (omega-x)|; fixing the sign of the first
    # nonzero coordinate makes the computed value bitwise symmetric in x.
    for v in x:
        if v != 0.0:
            return -x if v < 0.0 else x
    return x


def translate_overlap(omega: BoxUnionSet, x: Sequence[float]) -> float:
    """Lebesgue measure of omega ∩ (omega + x), exact via pairwise box cuts."""
    xv = np.asarray(_as_vec(x), dtype=float)
    if xv.shape[0] != omega.dim:
        raise InputError(f"translate has dimension {xv.shape[0]}, set has {omega.dim}")
    xv = _normalize_sign(xv)
    los, his = omega._corner_arrays()
    lo2 = los[None, :, :] + xv
    hi2 = his[None, :, :] + xv
    widths = np.minimum(his[:, None, :], hi2) - np.maximum(los[:, None, :], lo2)
    np.clip(widths, 0.0, None, out=widths)
    return float(widths.prod(axis=2).sum())


def overlap_profile(omega: BoxUnionSet,
                    x_grid: Sequence[Sequence[float] | float]) -> list[tuple[Vec, float]]:
    """translate_overlap evaluated pointwise over a grid of shifts."""
    xs = list(x_grid)
    if not xs:
        raise InputError("overlap_profile needs a non-empty grid of shifts")
    return [(_as_vec(x), translate_overlap(omega, _as_vec(x))) for x in xs]


def cover_cube(omega: BoxUnionSet) -> Box:
    """Smallest axis-aligned cube containing omega, anchored at its lower corner."""
    bb = omega.bounding_box()
    side = max(bb.sides)
    return Box(bb.lo, tuple(a + side for a in bb.lo))


@dataclass(frozen=True)
class Lattice:
    """Full-rank lattice; columns of ``basis`` generate the group."""

    basis: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        b = tuple(tuple(float(v) for v in row) for row in self.basis)
        object.__setattr__(self, "basis", b)
        mat = np.array(b, dtype=float)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise InputError("lattice basis must be a square matrix")
        det = np.linalg.det(mat)
        if abs(det) < 1e-300:
            raise InputError("lattice basis is singular")

    @staticmethod
    def scaled_integers(c: float, dim: int = 1) -> "Lattice":
        return Lattice(tuple(tuple(c if i == j else 0.0 for j in range(dim))
                             for i in range(dim)))

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.basis, dtype=float)

    @property
    def covolume(self) -> float:
        return float(abs(np.linalg.det(self.matrix)))

    def dual(self) -> "Lattice":
        inv_t = np.linalg.inv(self.matrix).T
        return Lattice(tuple(tuple(row) for row in inv_t))

    def points_in_box(self, box: Box) -> np.ndarray:
        """All lattice points in the half-open box, shape (n, dim)."""
        if box.dim != self.dim:
            raise InputError(f"box dimension {box.dim} != lattice dimension {self.dim}")
        mat = self.matrix
        inv = np.linalg.inv(mat)
        corners = np.array(np.meshgrid(*[(a, b) for a, b in zip(box.lo, box.hi)],
                                       indexing="ij")).reshape(self.dim, -1).T
        pre = corners @ inv.T
        n_lo = np.floor(pre.min(axis=0) - 1e-9).astype(int)
        n_hi = np.ceil(pre.max(axis=0) + 1e-9).astype(int)
        grids = np.meshgrid(*[np.arange(a, b + 1) for a, b in zip(n_lo, n_hi)],
                            indexing="ij")
        ns = np.stack([g.ravel() for g in grids], axis=1)
        pts = ns @ mat.T
        lo = np.array(box.lo)
        hi = np.array(box.hi)
        mask = np.all((pts >= lo) & (pts < hi), axis=1)
        pts = pts[mask]
        order = np.lexsort(pts[:, ::-1].T) if len(pts) else slice(None)
        return pts[order]


class ResidueWitness(NamedTuple):
    gamma: Vec
    gamma_prime: Vec
    point: Vec
    overlap: float


class ResidueVerdict(NamedTuple):
    holds: bool
    witness: Optional[ResidueWitness]


def lattice_residue_check(omega: BoxUnionSet, lattice: Lattice) -> ResidueVerdict:
    """Decide whether omega meets each residue class of the lattice at most once.

    Equivalently: |omega ∩ (omega + delta)| = 0 for every nonzero lattice
    vector delta.  Since omega is bounded, only lattice vectors inside the
    difference of its bounding box with itself can produce overlap, so the
    check is a finite, exact enumeration.
    """
    if lattice.dim != omega.dim:
        raise InputError(f"lattice dimension {lattice.dim} != set dimension {omega.dim}")
    bb = omega.bounding_box()
    diff = Box(tuple(a - b for a, b in zip(bb.lo, bb.hi)),
               tuple(b - a + 1e-9 for a, b in zip(bb.lo, bb.hi)))
    for delta in lattice.points_in_box(diff):
        if np.all(delta == 0.0):
            continue
        ov = translate_overlap(omega, delta)
        if ov > 0.0:
            point = None
            for b in omega.boxes:
                for p in omega.translate(delta).boxes:
                    cut = b.intersect(p)
                    if cut is not None:
                        point = cut.center
                        break
                if point is not None:
                    break
            zero = tuple(0.0 for _ in range(omega.dim))
            gamma_prime = tuple(-float(v) for v in delta)
            return ResidueVerdict(False, ResidueWitness(zero, gamma_prime, point, ov))
    return ResidueVerdict(True, None)


class CantorTower(NamedTuple):
    omega: BoxUnionSet
    tail_measure: float


def cantor_tower(n_max: int, k: Optional[int] = None) -> CantorTower:
    """Truncation of the tower of shrinking intervals centered at the integers.

    The full family places [n - 2^{-|n|}, n + 2^{-|n|}] at every integer n; the
    truncation keeps |n| <= n_max and reports the discarded tail measure
    4 * 2^{-n_max}.  With ``k`` given, only [-1, 1] and the intervals with
    |n| > k are kept (the "holed" family).
    """
    if n_max < 2:
        raise InputError("n_max must be at least 2")
    if k is not None and not (4 <= k < n_max):
        raise InputError(f"holed variant needs 4 <= k < n_max, got k={k}, n_max={n_max}")
    intervals = []
    for n in range(-n_max, n_max + 1):
        if k is not None and n != 0 and abs(n) <= k:
            continue
        r = 2.0 ** (-abs(n))
        intervals.append((n - r, n + r))
    omega = BoxUnionSet.from_intervals(intervals)
    return CantorTower(omega, 4.0 * 2.0 ** (-n_max))
