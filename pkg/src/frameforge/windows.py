"""Window functions as small closed-form expression trees.

Supported forms: scalars, monomials x^a, reflected monomials (1-x)^a,
box indicators, and products of these.  Each node knows symbolically whether
it is essentially bounded on a domain inside [0, R]^d, which takes precedence
over grid values near integrable singularities.  Windows built from an
arbitrary callable are supported for probing but are not serializable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import InputError
from .geometry import Box, BoxUnionSet
from .gridfn import cell_volumes, grid_centers


class Expr:
    def eval(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def bounded_on(self, omega: BoxUnionSet) -> bool:
        raise NotImplementedError

    def sqrt(self) -> "Expr":
        raise InputError(f"cannot take an exact square root of {self.to_string()}")

    def to_string(self) -> str:
        raise NotImplementedError

    def support_box(self) -> Optional[Box]:
        """Box outside which the expression is identically zero, if known."""
        return None


@dataclass(frozen=True)
class Scalar(Expr):
    value: float

    def eval(self, pts):
        return np.full(len(pts), self.value, dtype=complex)

    def bounded_on(self, omega):
        return True

    def sqrt(self):
        if self.value < 0:
            raise InputError("cannot take the square root of a negative scalar")
        return Scalar(self.value ** 0.5)

    def to_string(self):
        return repr(self.value)


@dataclass(frozen=True)
class Monomial(Expr):
    """x^alpha in the first coordinate; singular at 0 when alpha < 0."""

    alpha: float

    def eval(self, pts):
        x = pts[:, 0].astype(complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = x ** self.alpha
        out[~np.isfinite(out)] = 0.0
        return out

    def bounded_on(self, omega):
        if self.alpha >= 0:
            return True
        bb = omega.bounding_box()
        return bb.lo[0] > 0  # singularity at 0 lies outside the domain

    def sqrt(self):
        return Monomial(self.alpha / 2.0)

    def to_string(self):
        return f"x^{self.alpha}"


@dataclass(frozen=True)
class ReflectedMonomial(Expr):
    """(1-x)^alpha in the first coordinate; singular at 1 when alpha < 0."""

    alpha: float

    def eval(self, pts):
        x = (1.0 - pts[:, 0]).astype(complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = x ** self.alpha
        out[~np.isfinite(out)] = 0.0
        return out

    def bounded_on(self, omega):
        if self.alpha >= 0:
            return True
        bb = omega.bounding_box()
        return bb.hi[0] < 1

    def sqrt(self):
        return ReflectedMonomial(self.alpha / 2.0)

    def to_string(self):
        return f"(1-x)^{self.alpha}"


@dataclass(frozen=True)
class Indicator(Expr):
    """Indicator of a half-open box; ``box=None`` means the whole domain."""

    box: Optional[Box] = None

    def eval(self, pts):
        if self.box is None:
            return np.ones(len(pts), dtype=complex)
        lo = np.array(self.box.lo)
        hi = np.array(self.box.hi)
        inside = np.all((pts >= lo) & (pts < hi), axis=1)
        return inside.astype(complex)

    def bounded_on(self, omega):
        return True

    def sqrt(self):
        return self

    def to_string(self):
        if self.box is None:
            return "indicator"
        parts = [str(v) for v in self.box.lo] + [str(v) for v in self.box.hi]
        return "indicator(" + ",".join(parts) + ")"

    def support_box(self):
        return self.box


@dataclass(frozen=True)
class Product(Expr):
    factors: tuple[Expr, ...]

    def eval(self, pts):
        out = np.ones(len(pts), dtype=complex)
        for f in self.factors:
            out = out * f.eval(pts)
        return out

    def bounded_on(self, omega):
        return all(f.bounded_on(omega) for f in self.factors)

    def sqrt(self):
        return Product(tuple(f.sqrt() for f in self.factors))

    def to_string(self):
        return "*".join(f.to_string() for f in self.factors)

    def support_box(self):
        box = None
        for f in self.factors:
            b = f.support_box()
            if b is None:
                continue
            box = b if box is None else box.intersect(b)
        return box


@dataclass(frozen=True)
class CallableExpr(Expr):
    """Escape hatch for windows without a closed form (not serializable)."""

    fn: Callable[[np.ndarray], np.ndarray]
    label: str
    bounded: bool = True
    support: Optional[Box] = None

    def eval(self, pts):
        return np.asarray(self.fn(pts), dtype=complex)

    def bounded_on(self, omega):
        return self.bounded

    def to_string(self):
        raise InputError(f"window '{self.label}' has no closed-form serialization")

    def support_box(self):
        return self.support


_MONOMIAL_RE = re.compile(r"^x\^(-?\d+(?:\.\d+)?)$")
_REFLECTED_RE = re.compile(r"^\(1-x\)\^(-?\d+(?:\.\d+)?)$")
_INDICATOR_RE = re.compile(r"^indicator(?:\(([^)]*)\))?$")
_SCALAR_RE = re.compile(r"^-?\d+(?:\.\d+)?$")


def parse_expr(text: str) -> Expr:
    """Parse a window expression such as ``x^1.0``, ``indicator(0,0.5)`` or
    ``2.0*(1-x)^0.5``."""
    factors = []
    for part in text.replace(" ", "").split("*"):
        if not part:
            raise InputError(f"empty factor in window expression {text!r}")
        m = _MONOMIAL_RE.match(part)
        if m:
            factors.append(Monomial(float(m.group(1))))
            continue
        m = _REFLECTED_RE.match(part)
        if m:
            factors.append(ReflectedMonomial(float(m.group(1))))
            continue
        m = _INDICATOR_RE.match(part)
        if m:
            if m.group(1) is None:
                factors.append(Indicator(None))
            else:
                vals = [float(v) for v in m.group(1).split(",")]
                if len(vals) % 2 != 0:
                    raise InputError(f"indicator needs lo and hi corners: {part!r}")
                d = len(vals) // 2
                factors.append(Indicator(Box(tuple(vals[:d]), tuple(vals[d:]))))
            continue
        if _SCALAR_RE.match(part):
            factors.append(Scalar(float(part)))
            continue
        raise InputError(f"cannot parse window factor {part!r}")
    return factors[0] if len(factors) == 1 else Product(tuple(factors))


@dataclass(frozen=True)
class Window:
    """A labelled window function on a domain."""

    label: str
    expr: Expr

    @staticmethod
    def from_string(text: str, label: Optional[str] = None) -> "Window":
        return Window(label if label is not None else text, parse_expr(text))

    @staticmethod
    def from_callable(fn: Callable[[np.ndarray], np.ndarray], label: str,
                      bounded: bool = True, support: Optional[Box] = None) -> "Window":
        return Window(label, CallableExpr(fn, label, bounded, support))

    @staticmethod
    def indicator(box: Optional[Box] = None, label: str = "indicator") -> "Window":
        return Window(label, Indicator(box))

    def eval(self, pts: np.ndarray) -> np.ndarray:
        return self.expr.eval(np.atleast_2d(np.asarray(pts, dtype=float)))

    def bounded_on(self, omega: BoxUnionSet) -> bool:
        return self.expr.bounded_on(omega)

    def support_box(self) -> Optional[Box]:
        return self.expr.support_box()

    def to_string(self) -> str:
        return self.expr.to_string()

    def l2_norm_sq_on(self, omega: BoxUnionSet, grid_n: int = 1024) -> float:
        """Quadrature of |g|^2 over the domain (midpoint rule, exact weights)."""
        bb = omega.bounding_box()
        mesh = np.meshgrid(*grid_centers(bb, grid_n), indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=1)
        vals = np.abs(self.eval(pts)) ** 2
        w = cell_volumes(bb, grid_n, omega).ravel()
        return float(np.sum(vals * w))

    def times_sqrt(self, weight_expr: Expr) -> "Window":
        """The window multiplied by the square root of a non-negative weight."""
        root = weight_expr.sqrt()
        if isinstance(self.expr, Product):
            new = Product(self.expr.factors + (root,))
        else:
            new = Product((self.expr, root))
        return Window(f"{self.label}*sqrt", new)
