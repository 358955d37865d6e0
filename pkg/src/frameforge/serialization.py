"""File schemas (JSON) and CSV emission.

Domains, point sets and windowed systems round-trip through plain JSON
dictionaries; a domain may also be named by a generator tag such as
``cantor_tower:12`` or ``cantor_tower:12:5``.  CSV cells use ``repr`` for
floats, so identical inputs produce byte-identical artifacts.
"""

from __future__ import annotations

import json
import os
from typing import Any, Optional, Sequence, Union

import numpy as np

from .errors import InputError
from .framebounds import ContinuousFreqMeasure, FreqSpec, WindowedSystem
from .geometry import Box, BoxUnionSet, Lattice, canonicalize, cantor_tower
from .gridfn import GridFunction
from .pointsets import (
    EventuallyPeriodic1D,
    FinitePerturbation,
    FiniteSet,
    LatticeCosets,
    StructuredPointSet,
)
from .windows import Window


def domain_to_dict(omega: BoxUnionSet) -> dict:
    return {"dim": omega.dim,
            "boxes": [list(b.lo) + list(b.hi) for b in omega.boxes]}


def domain_from_dict(data: dict) -> BoxUnionSet:
    try:
        dim = int(data["dim"])
        boxes = []
        for row in data["boxes"]:
            row = [float(v) for v in row]
            if len(row) != 2 * dim:
                raise InputError(f"box row {row} does not match dim={dim}")
            boxes.append(Box(tuple(row[:dim]), tuple(row[dim:])))
    except (KeyError, TypeError) as exc:
        raise InputError(f"bad domain description: missing field {exc}") from exc
    return canonicalize(boxes)


def load_domain(descriptor: Union[str, dict]) -> tuple[BoxUnionSet, Optional[float]]:
    """Resolve a domain descriptor: inline dict, generator tag, or file path.

    Returns the domain and, for truncated generators, the tail measure."""
    if isinstance(descriptor, dict):
        return domain_from_dict(descriptor), None
    text = descriptor.strip()
    if text.startswith("cantor_tower:"):
        parts = text.split(":")
        if len(parts) not in (2, 3):
            raise InputError(f"bad generator tag {text!r}; use "
                             "cantor_tower:n_max or cantor_tower:n_max:k")
        try:
            n_max = int(parts[1])
            k = int(parts[2]) if len(parts) == 3 else None
        except ValueError as exc:
            raise InputError(f"bad generator tag {text!r}: {exc}") from exc
        tower = cantor_tower(n_max, k)
        return tower.omega, tower.tail_measure
    if os.path.exists(text):
        with open(text) as fh:
            return domain_from_dict(json.load(fh)), None
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        raise InputError(f"domain descriptor {text!r} is neither a generator "
                         "tag, an existing file, nor inline JSON") from None
    return domain_from_dict(data), None


def pointset_to_dict(s: StructuredPointSet) -> dict:
    if isinstance(s, LatticeCosets):
        return {"kind": "lattice_cosets",
                "basis": [list(row) for row in s.lattice.basis],
                "offsets": [list(o) for o in s.offsets]}
    if isinstance(s, EventuallyPeriodic1D):
        return {"kind": "eventually_periodic_1d",
                "right_period": s.right_period, "right_start": s.right_start,
                "left_period": s.left_period, "left_start": s.left_start,
                "core": list(s.core)}
    if isinstance(s, FiniteSet):
        return {"kind": "finite_set", "dim": s.dim,
                "points": [list(p) for p in s.points]}
    if isinstance(s, FinitePerturbation):
        return {"kind": "finite_perturbation", "base": pointset_to_dict(s.base),
                "added": [list(p) for p in s.added],
                "removed": [list(p) for p in s.removed]}
    raise InputError(f"cannot serialize point set of type {type(s).__name__}")


def pointset_from_dict(data: dict) -> StructuredPointSet:
    try:
        kind = data["kind"]
    except (KeyError, TypeError) as exc:
        raise InputError("point set description needs a 'kind' field") from exc
    if kind == "lattice_cosets":
        lattice = Lattice(tuple(tuple(float(v) for v in row)
                                for row in data["basis"]))
        offsets = tuple(tuple(float(v) for v in o) for o in data["offsets"])
        return LatticeCosets(lattice, offsets)
    if kind == "eventually_periodic_1d":
        return EventuallyPeriodic1D(
            right_period=data.get("right_period"),
            right_start=float(data.get("right_start", 0.0)),
            left_period=data.get("left_period"),
            left_start=float(data.get("left_start", 0.0)),
            core=tuple(float(c) for c in data.get("core", ())))
    if kind == "finite_set":
        return FiniteSet(tuple(tuple(float(v) for v in p)
                               for p in data["points"]),
                         dimension=int(data.get("dim", 1)))
    if kind == "finite_perturbation":
        return FinitePerturbation(
            pointset_from_dict(data["base"]),
            added=tuple(tuple(float(v) for v in p) for p in data.get("added", ())),
            removed=tuple(tuple(float(v) for v in p) for p in data.get("removed", ())))
    raise InputError(f"unknown point set kind {kind!r}")


def _freq_to_dict(freq: FreqSpec) -> dict:
    if isinstance(freq, ContinuousFreqMeasure):
        out: dict[str, Any] = {"kind": "continuous"}
        if freq.density is not None:
            box = freq.density.bounding_box
            out["box"] = list(box.lo) + list(box.hi)
            out["n"] = freq.density.n_per_axis
            out["density"] = [float(v) for v in freq.density.samples.real.ravel()]
        out["atoms"] = [list(p) + [w] for p, w in freq.atoms]
        return out
    return pointset_to_dict(freq)


def _freq_from_dict(data: dict) -> FreqSpec:
    if data.get("kind") == "continuous":
        density = None
        if "box" in data:
            row = [float(v) for v in data["box"]]
            d = len(row) // 2
            box = Box(tuple(row[:d]), tuple(row[d:]))
            n = int(data["n"])
            samples = np.array(data["density"], dtype=complex).reshape((n,) * d)
            from .gridfn import cell_volumes
            density = GridFunction(box, samples, cell_volumes(box, n))
        atoms = tuple((tuple(float(v) for v in row[:-1]), float(row[-1]))
                      for row in data.get("atoms", ()))
        return ContinuousFreqMeasure(density=density, atoms=atoms)
    return pointset_from_dict(data)


def system_to_dict(system: WindowedSystem) -> dict:
    return {"omega": domain_to_dict(system.omega),
            "pairs": [{"window": w.to_string(), "freq": _freq_to_dict(f)}
                      for w, f in system.pairs]}


def system_from_dict(data: dict) -> WindowedSystem:
    try:
        omega, _ = load_domain(data["omega"])
        pairs = tuple((Window.from_string(p["window"]), _freq_from_dict(p["freq"]))
                      for p in data["pairs"])
    except (KeyError, TypeError) as exc:
        raise InputError(f"bad system description: missing field {exc}") from exc
    return WindowedSystem(omega, pairs)


def load_system(path_or_dict: Union[str, dict]) -> WindowedSystem:
    if isinstance(path_or_dict, dict):
        return system_from_dict(path_or_dict)
    with open(path_or_dict) as fh:
        return system_from_dict(json.load(fh))


def save_system(system: WindowedSystem, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(system_to_dict(system), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _cell(value: Any) -> str:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (np.floating,)):
        return repr(float(value))
    return str(value)


def format_csv(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def write_csv(path: str, header: Sequence[str], rows: Sequence[Sequence[Any]]) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(format_csv(header, rows))


def box_label(box: Box) -> str:
    lo = ",".join(repr(float(v)) for v in box.lo)
    hi = ",".join(repr(float(v)) for v in box.hi)
    return f"[{lo};{hi})"


DENSITY_TRACE_HEADER = ("h", "inf_density", "sup_density")
FRAME_BOUNDS_HEADER = ("system", "grid_n", "trunc", "A_est", "B_est", "tight_ratio")
CERTIFICATE_HEADER = ("x0", "residual", "trials")
GABOR_HEADER = ("p", "q", "M", "A53", "B53", "verdict", "zz_min", "zz_max")
