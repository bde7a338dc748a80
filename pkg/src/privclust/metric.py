"""Instances, clusterings and constraint feasibility for every problem variant.

Distances are exact rationals. Each :class:`Instance` additionally carries an
integer-scaled copy of its distance matrix (all entries multiplied by the least
common denominator) which the solvers use for fast exact comparisons.
"""

from __future__ import annotations

import dataclasses
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import InfeasibleInstanceError, InvalidInstanceError, MalformedSolutionError

__all__ = [
    "Instance",
    "Clustering",
    "ConstraintSet",
    "Violation",
    "Verdict",
    "FairQuotas",
    "to_fraction",
    "candidate_radii",
    "eval_radius",
    "check_feasible",
    "fair_structure",
    "fair_quotas",
    "euclidean_matrix",
    "metric_closure",
    "check_privacy_bounds",
    "rounded_lower_bound",
]


def to_fraction(value) -> Fraction:
    """Convert ints, Fractions, decimal strings ("0.25"), ratio strings ("1/4") or floats."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InvalidInstanceError(f"not a number: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise InvalidInstanceError(f"non-finite distance {value!r}")
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidInstanceError(f"cannot parse rational {value!r}") from exc
    if isinstance(value, (np.integer,)):
        return Fraction(int(value))
    if isinstance(value, (np.floating,)):
        return to_fraction(float(value))
    raise InvalidInstanceError(f"cannot interpret {value!r} as a rational")


def _scale_matrix(dist: Sequence[Sequence[Fraction]]) -> tuple[tuple[tuple[int, ...], ...], int]:
    denom = 1
    for row in dist:
        for x in row:
            denom = math.lcm(denom, x.denominator)
    imat = tuple(tuple(int(x * denom) for x in row) for row in dist)
    return imat, denom


def _check_metric(imat: Sequence[Sequence[int]]) -> None:
    n = len(imat)
    if any(len(row) != n for row in imat):
        raise InvalidInstanceError("distance matrix is not square")
    biggest = max((max(row) for row in imat), default=0)
    if biggest < 2**61:
        arr = np.asarray(imat, dtype=np.int64)
    else:
        arr = np.asarray(imat, dtype=object)
    if (arr < 0).any():
        raise InvalidInstanceError("negative distance")
    if (np.diagonal(arr) != 0).any():
        raise InvalidInstanceError("nonzero self-distance")
    if (arr != arr.T).any():
        raise InvalidInstanceError("distance matrix is not symmetric")
    for z in range(n):
        via = arr[:, z][:, None] + arr[z, :][None, :]
        bad = np.argwhere(arr > via)
        if len(bad):
            x, y = (int(v) for v in bad[0])
            raise InvalidInstanceError(f"triangle inequality fails for ({x}, {z}, {y})")


@dataclass(frozen=True)
class Instance:
    """A clustering instance over the element set ``ids``.

    ``points`` and ``locations`` index into ``ids``; the center flavor uses the
    same indices for both. ``capacities`` is ``None``, an int (uniform), or a
    mapping from location index to capacity. ``colors`` maps point index to a
    color name and ``color_ell`` maps color name to a per-color lower bound.
    """

    ids: tuple[str, ...]
    dist: tuple[tuple[Fraction, ...], ...]
    points: tuple[int, ...]
    locations: tuple[int, ...]
    k: int = 1
    ell: int = 0
    outliers: int = 0
    capacities: int | Mapping[int, int] | None = None
    colors: Mapping[int, str] | None = None
    color_ell: Mapping[str, int] | None = None
    opening_cost: Fraction | None = None
    imat: tuple[tuple[int, ...], ...] = field(default=None, compare=False, repr=False)
    scale: int = field(default=1, compare=False, repr=False)

    def __post_init__(self):
        if self.imat is None:
            imat, scale = _scale_matrix(self.dist)
            object.__setattr__(self, "imat", imat)
            object.__setattr__(self, "scale", scale)

    # construction -------------------------------------------------------

    @classmethod
    def from_matrix(
        cls,
        matrix,
        *,
        ids: Sequence[str] | None = None,
        points: Sequence[int] | None = None,
        locations: Sequence[int] | None = None,
        validate: bool = True,
        **params,
    ) -> "Instance":
        """Build an instance from a square distance matrix.

        Without ``points``/``locations`` every element is both a point and a
        location (the center flavor).
        """
        dist = tuple(tuple(to_fraction(x) for x in row) for row in matrix)
        n = len(dist)
        if ids is None:
            ids = tuple(f"x{i}" for i in range(n))
        pts = tuple(range(n)) if points is None else tuple(int(p) for p in points)
        locs = pts if locations is None else tuple(int(q) for q in locations)
        if "opening_cost" in params and params["opening_cost"] is not None:
            params["opening_cost"] = to_fraction(params["opening_cost"])
        inst = cls(ids=tuple(str(i) for i in ids), dist=dist, points=pts, locations=locs, **params)
        if validate:
            inst.validate()
        return inst

    @classmethod
    def from_coordinates(cls, coords, *, denominator: int = 10**6, **kwargs) -> "Instance":
        return cls.from_matrix(euclidean_matrix(coords, denominator), **kwargs)

    def validate(self, check_metric: bool = True) -> "Instance":
        n = len(self.ids)
        if len(set(self.ids)) != n:
            raise InvalidInstanceError("duplicate element ids")
        if len(self.dist) != n:
            raise InvalidInstanceError("matrix size does not match ids")
        if not self.points:
            raise InvalidInstanceError("instance needs at least one point")
        if not self.locations:
            raise InvalidInstanceError("instance needs at least one location")
        for seq, what in ((self.points, "point"), (self.locations, "location")):
            if len(set(seq)) != len(seq):
                raise InvalidInstanceError(f"duplicate {what} index")
            if any(not 0 <= i < n for i in seq):
                raise InvalidInstanceError(f"{what} index out of range")
        if self.k < 0 or self.ell < 0 or self.outliers < 0:
            raise InvalidInstanceError("k, ell and outliers must be nonnegative")
        if self.capacities is not None:
            locs = set(self.locations)
            if isinstance(self.capacities, int):
                caps = {q: self.capacities for q in locs}
            else:
                caps = dict(self.capacities)
                if set(caps) != locs:
                    raise InvalidInstanceError("capacities must cover exactly the locations")
            if any(c <= 0 for c in caps.values()):
                raise InvalidInstanceError("capacities must be positive")
            if any(self.ell > c for c in caps.values()):
                raise InvalidInstanceError("lower bound exceeds a capacity (need ell <= u(x))")
        if self.colors is not None:
            if set(self.colors) != set(self.points):
                raise InvalidInstanceError("colors must cover exactly the points")
        if self.color_ell is not None:
            if self.colors is None:
                raise InvalidInstanceError("per-color bounds need colors")
            if any(v < 0 for v in self.color_ell.values()):
                raise InvalidInstanceError("per-color bounds must be nonnegative")
        if self.opening_cost is not None and self.opening_cost < 0:
            raise InvalidInstanceError("opening cost must be nonnegative")
        if check_metric:
            _check_metric(self.imat)
        return self

    def restrict(self, points: Iterable[int] | None = None, locations: Iterable[int] | None = None, **changes) -> "Instance":
        """Sub-instance sharing the metric; colors are narrowed to the new points."""
        if points is not None:
            changes["points"] = tuple(sorted(points))
            if self.colors is not None and "colors" not in changes:
                changes["colors"] = {p: self.colors[p] for p in changes["points"]}
        if locations is not None:
            changes["locations"] = tuple(sorted(locations))
            if isinstance(self.capacities, Mapping) and "capacities" not in changes:
                changes["capacities"] = {q: self.capacities[q] for q in changes["locations"]}
        return dataclasses.replace(self, **changes)

    # queries -------------------------------------------------------------

    def d(self, a: int, b: int) -> Fraction:
        return self.dist[a][b]

    def capacity(self, loc: int) -> int | None:
        if self.capacities is None:
            return None
        if isinstance(self.capacities, int):
            return self.capacities
        return self.capacities[loc]

    @property
    def uniform_capacity(self) -> bool:
        return self.capacities is None or isinstance(self.capacities, int) or len(set(self.capacities.values())) <= 1

    @property
    def center_flavor(self) -> bool:
        """True when every point may host a center (``P`` is a subset of ``L``)."""
        return set(self.points) <= set(self.locations)

    def color_counts(self, points: Iterable[int] | None = None) -> dict[str, int]:
        if self.colors is None:
            raise InvalidInstanceError("instance has no colors")
        pts = self.points if points is None else points
        return dict(Counter(self.colors[p] for p in pts))

    def to_rational(self, scaled: int) -> Fraction:
        return Fraction(scaled, self.scale)

    def name(self, i: int) -> str:
        return self.ids[i]


def rounded_lower_bound(ell: int, block: int) -> int:
    """Smallest multiple of ``block`` that is at least ``ell``."""
    return block * -(-ell // block)


def check_privacy_bounds(inst: Instance, ell: int | None = None) -> None:
    """Reject lower bounds no clustering can meet.

    A private solution may open fewer than ``k`` centers and may leave outlier
    budget unused, so the only counting obstruction is a single cluster: when
    some point must be served, a cluster needs ``ell`` of the ``|P|`` points.
    """
    ell = inst.ell if ell is None else ell
    n = len(inst.points)
    if n > inst.outliers and ell > n:
        raise InfeasibleInstanceError(f"lower bound {ell} exceeds the {n} points")
    if n > inst.outliers and inst.k == 0:
        raise InfeasibleInstanceError("k = 0 but points must be served")


# ---------------------------------------------------------------------------
# clusterings


@dataclass(frozen=True)
class Clustering:
    """Centers (one location index per cluster slot), point-to-slot assignment, outliers.

    A location may appear in several slots. ``groups`` optionally records a
    partition of the assigned points into fair subsets, each inside one slot.
    """

    centers: tuple[int, ...]
    assignment: Mapping[int, int]
    outliers: frozenset[int] = frozenset()
    radius: Fraction = Fraction(0)
    groups: tuple[frozenset[int], ...] | None = None

    @classmethod
    def build(
        cls,
        inst: Instance,
        centers: Sequence[int],
        clusters: Sequence[Iterable[int]],
        outliers: Iterable[int] = (),
        groups: Sequence[Iterable[int]] | None = None,
        prune: bool = True,
    ) -> "Clustering":
        """Assemble from per-slot point lists; empty slots are dropped when ``prune``."""
        members = [tuple(c) for c in clusters]
        if len(members) != len(centers):
            raise MalformedSolutionError("one point list per center is required")
        keep = [i for i, m in enumerate(members) if m or not prune]
        assignment: dict[int, int] = {}
        for slot, i in enumerate(keep):
            for p in members[i]:
                if p in assignment:
                    raise MalformedSolutionError(f"point {inst.name(p)} assigned twice")
                assignment[p] = slot
        new_centers = tuple(centers[i] for i in keep)
        radius = 0
        for p, slot in assignment.items():
            radius = max(radius, inst.imat[p][new_centers[slot]])
        grp = None if groups is None else tuple(sorted((frozenset(g) for g in groups), key=min))
        return cls(
            centers=new_centers,
            assignment=assignment,
            outliers=frozenset(outliers),
            radius=inst.to_rational(radius),
            groups=grp,
        )

    def clusters(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in self.centers]
        for p, slot in self.assignment.items():
            out[slot].append(p)
        return tuple(tuple(sorted(m)) for m in out)

    def sizes(self) -> tuple[int, ...]:
        sz = [0] * len(self.centers)
        for slot in self.assignment.values():
            sz[slot] += 1
        return tuple(sz)

    def labels(self, inst: Instance) -> list[int]:
        """Slot label per point in ``inst.points`` order, -1 for outliers."""
        return [self.assignment.get(p, -1) for p in inst.points]


def eval_radius(inst: Instance, sol: Clustering) -> Fraction:
    """Largest distance from an assigned point to its center (0 if nothing is assigned)."""
    outliers = set(sol.outliers)
    best = 0
    for p in inst.points:
        if p in outliers:
            continue
        slot = sol.assignment.get(p)
        if slot is None:
            raise MalformedSolutionError(f"point {inst.name(p)} is neither assigned nor an outlier")
        if not 0 <= slot < len(sol.centers):
            raise MalformedSolutionError(f"point {inst.name(p)} assigned to unknown center slot {slot}")
        best = max(best, inst.imat[p][sol.centers[slot]])
    return inst.to_rational(best)


def candidate_radii(inst: Instance) -> list[Fraction]:
    """Sorted distinct point-to-location distances."""
    return [inst.to_rational(v) for v in _candidate_ints(inst)]


def _candidate_ints(inst: Instance) -> list[int]:
    vals = {inst.imat[p][q] for p in inst.points for q in inst.locations}
    return sorted(vals)


# ---------------------------------------------------------------------------
# constraint sets and feasibility

_SIDE_SHAPES = {
    frozenset(),
    frozenset({"outliers"}),
    frozenset({"capacities"}),
    frozenset({"fairness"}),
    frozenset({"fairness", "capacities"}),
}


@dataclass(frozen=True)
class ConstraintSet:
    privacy: bool = False
    outliers: bool = False
    capacities: bool = False
    fairness: bool = False
    strong_privacy: bool = False

    def __post_init__(self):
        side = frozenset(n for n in ("outliers", "capacities", "fairness") if getattr(self, n))
        if self.strong_privacy:
            if side or self.privacy:
                raise InvalidInstanceError("strong privacy is only supported on its own")
        elif side not in _SIDE_SHAPES:
            raise InvalidInstanceError(f"unsupported constraint combination {sorted(side)}")

    def without_privacy(self) -> "ConstraintSet":
        return dataclasses.replace(self, privacy=False, strong_privacy=False)

    @property
    def active(self) -> tuple[str, ...]:
        return tuple(f.name for f in dataclasses.fields(self) if getattr(self, f.name))


@dataclass(frozen=True)
class Violation:
    kind: str
    cluster: int | None
    detail: str

    def __str__(self) -> str:
        where = "" if self.cluster is None else f" (cluster {self.cluster})"
        return f"{self.kind}{where}: {self.detail}"


@dataclass(frozen=True)
class Verdict:
    violations: tuple[Violation, ...]

    @property
    def feasible(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.feasible


def check_feasible(inst: Instance, cs: ConstraintSet, sol: Clustering) -> Verdict:
    """Check every active constraint and report all violations."""
    v: list[Violation] = []
    pts = set(inst.points)
    locs = set(inst.locations)
    outliers = set(sol.outliers)

    if len(sol.centers) > inst.k:
        v.append(Violation("budget", None, f"{len(sol.centers)} centers opened, k = {inst.k}"))
    for slot, c in enumerate(sol.centers):
        if c not in locs:
            v.append(Violation("assignment", slot, f"center {c} is not a location"))
    if not outliers <= pts:
        v.append(Violation("assignment", None, "outliers must be points"))
    for p, slot in sol.assignment.items():
        if p not in pts:
            v.append(Violation("assignment", None, f"element {p} is not a point"))
        elif p in outliers:
            v.append(Violation("assignment", slot, f"point {inst.name(p)} is both assigned and an outlier"))
        if not 0 <= slot < len(sol.centers):
            v.append(Violation("assignment", None, f"point {p} assigned to unknown slot {slot}"))
    for p in inst.points:
        if p not in outliers and p not in sol.assignment:
            v.append(Violation("assignment", None, f"point {inst.name(p)} is unassigned"))

    if cs.outliers:
        if len(outliers) > inst.outliers:
            v.append(Violation("outliers", None, f"{len(outliers)} outliers, budget {inst.outliers}"))
    elif outliers:
        v.append(Violation("outliers", None, f"{len(outliers)} outliers but outliers are disabled"))

    members: list[list[int]] = [[] for _ in sol.centers]
    for p, slot in sol.assignment.items():
        if 0 <= slot < len(members):
            members[slot].append(p)

    if cs.privacy:
        for slot, m in enumerate(members):
            if len(m) < inst.ell:
                v.append(Violation("privacy", slot, f"cluster has {len(m)} < {inst.ell} points"))
    if cs.capacities:
        for slot, m in enumerate(members):
            cap = inst.capacity(sol.centers[slot]) if sol.centers[slot] in locs else None
            if cap is not None and len(m) > cap:
                v.append(Violation("capacity", slot, f"cluster has {len(m)} > {cap} points"))
    if cs.fairness:
        totals = inst.color_counts()
        colors = sorted(totals)
        for slot, m in enumerate(members):
            here = Counter(inst.colors[p] for p in m)
            bad = [
                (c, e)
                for i, c in enumerate(colors)
                for e in colors[i + 1:]
                if here[c] * totals[e] != here[e] * totals[c]
            ]
            if bad:
                c, e = bad[0]
                v.append(Violation("fairness", slot, f"ratio {c}:{e} is {here[c]}:{here[e]}, global {totals[c]}:{totals[e]}"))
    if cs.strong_privacy:
        bounds = inst.color_ell or {}
        for slot, m in enumerate(members):
            here = Counter(inst.colors[p] for p in m)
            for c in sorted(bounds):
                if here[c] < bounds[c]:
                    v.append(Violation("strong_privacy", slot, f"color {c}: {here[c]} < {bounds[c]}"))

    if not any(x.kind == "assignment" for x in v):
        actual = eval_radius(inst, sol)
        if actual != sol.radius:
            v.append(Violation("radius", None, f"stored radius {sol.radius} != recomputed {actual}"))
    return Verdict(tuple(v))


# ---------------------------------------------------------------------------
# fairness quotas


@dataclass(frozen=True)
class FairQuotas:
    quotas: Mapping[str, int]
    block: int


def fair_quotas(counts: Mapping[str, int]) -> FairQuotas:
    """Per-color quota ``|c(P)| / gcd`` and their sum, the fair block size."""
    if not counts:
        raise InvalidInstanceError("no colors")
    if any(n <= 0 for n in counts.values()):
        raise InvalidInstanceError("every color class must be nonempty")
    g = reduce(math.gcd, counts.values())
    quotas = {c: counts[c] // g for c in sorted(counts)}
    return FairQuotas(quotas=quotas, block=sum(quotas.values()))


def fair_structure(inst: Instance) -> FairQuotas:
    return fair_quotas(inst.color_counts())


# ---------------------------------------------------------------------------
# euclidean front end


def metric_closure(matrix: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    """All-pairs shortest paths; restores the triangle inequality after rounding."""
    d = [list(row) for row in matrix]
    n = len(d)
    for z in range(n):
        dz = d[z]
        for x in range(n):
            dxz = d[x][z]
            row = d[x]
            for y in range(n):
                alt = dxz + dz[y]
                if alt < row[y]:
                    row[y] = alt
    return d


def euclidean_matrix(coords, denominator: int = 10**6) -> list[list[Fraction]]:
    """Euclidean distances rounded to multiples of ``1/denominator``, then metrically closed."""
    arr = np.asarray(coords, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    diff = arr[:, None, :] - arr[None, :, :]
    raw = np.sqrt((diff**2).sum(axis=-1))
    n = len(arr)
    d = [[Fraction(int(round(raw[i, j] * denominator)), denominator) for j in range(n)] for i in range(n)]
    for i in range(n):
        d[i][i] = Fraction(0)
        for j in range(i):
            d[i][j] = d[j][i]
    return metric_closure(d)
