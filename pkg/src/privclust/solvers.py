"""Underlying clustering algorithms that the privacy framework treats as black boxes.

All routines work on the integer-scaled matrix ``inst.imat``; ties between
equidistant candidates always go to the lowest element index.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Callable, Sequence

from .errors import ContractViolation, InfeasibleInstanceError, InvalidInstanceError, SizeCapError
from .flow import bounded_flow
from .metric import Clustering, ConstraintSet, Instance, _candidate_ints, check_feasible, fair_structure

__all__ = [
    "ConstrainedSolver",
    "gonzalez_kcenter",
    "hs_ksupplier",
    "outliers_kcenter",
    "soft_capacitated_kcenter",
    "exact_solver",
    "ExactLimits",
]


def _nearest(D, p: int, centers: Sequence[int]) -> int:
    """Position in ``centers`` of the closest center to ``p``; ties to the lowest element index."""
    best = None
    for slot, c in enumerate(centers):
        key = (D[p][c], c)
        if best is None or key < best[0]:
            best = (key, slot)
    return best[1]


def _assign_nearest(inst: Instance, centers: Sequence[int], points: Sequence[int], outliers=()) -> Clustering:
    clusters: list[list[int]] = [[] for _ in centers]
    for p in points:
        clusters[_nearest(inst.imat, p, centers)].append(p)
    return Clustering.build(inst, centers, clusters, outliers=outliers)


def gonzalez_kcenter(inst: Instance, k: int | None = None) -> Clustering:
    """Farthest-first traversal started at the lowest-index point."""
    k = inst.k if k is None else k
    if k <= 0:
        raise InvalidInstanceError("k must be positive")
    if not inst.center_flavor:
        raise InvalidInstanceError("farthest-first traversal needs every point to be a location")
    D = inst.imat
    pts = sorted(inst.points)
    centers = [pts[0]]
    near = {p: D[p][pts[0]] for p in pts}
    while len(centers) < k:
        far = min(pts, key=lambda p: (-near[p], p))
        if near[far] == 0:
            break
        centers.append(far)
        for p in pts:
            near[p] = min(near[p], D[p][far])
    return _assign_nearest(inst, centers, pts)


def hs_ksupplier(inst: Instance, k: int | None = None) -> Clustering:
    """Threshold 3-approximation for k-supplier.

    For each candidate radius ``tau``: a maximal set of points pairwise more
    than ``2 tau`` apart, each opening its nearest location (which must lie
    within ``tau``); the first ``tau`` needing at most ``k`` openings wins.
    """
    k = inst.k if k is None else k
    if k <= 0:
        raise InvalidInstanceError("k must be positive")
    D = inst.imat
    pts = sorted(inst.points)
    locs = sorted(inst.locations)
    for tau in _candidate_ints(inst):
        seeds: list[int] = []
        for p in pts:
            if all(D[p][s] > 2 * tau for s in seeds):
                seeds.append(p)
                if len(seeds) > k:
                    break
        if len(seeds) > k:
            continue
        opened = []
        for s in seeds:
            q = min(locs, key=lambda x: (D[s][x], x))
            if D[s][q] > tau:
                break
            opened.append(q)
        else:
            sol = _assign_nearest(inst, opened, pts)
            if sol.radius * inst.scale <= 3 * tau:
                return sol
    raise ContractViolation("no threshold accepted, impossible for k >= 1")


def outliers_kcenter(inst: Instance, k: int | None = None, o: int | None = None) -> Clustering:
    """Greedy disk cover for k-center with outliers.

    Per candidate radius ``tau``, ``k`` times: open the point whose
    ``tau``-disk holds the most uncovered points and discard everything within
    ``3 tau`` of it. The first ``tau`` leaving at most ``o`` points uncovered
    wins; those points become the outliers.
    """
    k = inst.k if k is None else k
    o = inst.outliers if o is None else o
    if k <= 0:
        raise InvalidInstanceError("k must be positive")
    if not inst.center_flavor:
        raise InvalidInstanceError("greedy disk cover opens centers at points")
    D = inst.imat
    pts = sorted(inst.points)
    for tau in _candidate_ints(inst):
        uncovered = set(pts)
        centers: list[int] = []
        for _ in range(k):
            if not uncovered:
                break
            best = min(pts, key=lambda v: (-sum(1 for u in uncovered if D[v][u] <= tau), v))
            centers.append(best)
            uncovered -= {u for u in uncovered if D[best][u] <= 3 * tau}
        if len(uncovered) <= o:
            covered = [p for p in pts if p not in uncovered]
            return _assign_nearest(inst, centers, covered, outliers=uncovered)
    raise ContractViolation("no threshold accepted, impossible for k >= 1")


# ---------------------------------------------------------------------------
# soft capacities


def _hop_within(D, pts, src, tau, limit):
    """Hop distances (at most ``limit``) from ``src`` in the graph joining points within ``tau``."""
    dist = {src: 0}
    frontier = [src]
    for h in range(1, limit + 1):
        nxt = []
        for u in frontier:
            for v in pts:
                if v not in dist and D[u][v] <= tau:
                    dist[v] = h
                    nxt.append(v)
        frontier = nxt
    return dist


def _monarch_slots(D, pts: list[int], tau: int, cap: int):
    """Monarch/empire decomposition at threshold ``tau``; returns (slot centers, slot members).

    Monarchs are pairwise at least three hops apart; each new monarch sits
    exactly three hops from an earlier one, its parent. Every point joins the
    domain of a monarch within two hops. Domains are packed bottom-up: a monarch
    fills full slots at itself with its children's leftovers first and hands
    fewer than ``cap`` of its own points to its parent; roots open the ceiling.
    """
    two_hop: dict[int, dict[int, int]] = {}
    monarchs: list[int] = []
    parent: dict[int, int | None] = {}
    marked: set[int] = set()
    while len(marked) < len(pts):
        choice = None
        for u in pts:
            if u in marked:
                continue
            if any(D[u][w] <= tau for w in marked):
                hops = _hop_within(D, pts, u, tau, 3)
                par = min((m for m in monarchs if hops.get(m) == 3), default=None)
                if par is not None:
                    choice = (u, par)
                    break
        if choice is None:
            u = min(x for x in pts if x not in marked)
            choice = (u, None)
        m, par = choice
        monarchs.append(m)
        parent[m] = par
        two_hop[m] = _hop_within(D, pts, m, tau, 2)
        marked |= set(two_hop[m])

    domain: dict[int, list[int]] = {m: [] for m in monarchs}
    for v in pts:
        home = min((m for m in monarchs if v in two_hop[m]), key=lambda m: (two_hop[m][v], m))
        domain[home].append(v)

    carry: dict[int, list[int]] = {m: [] for m in monarchs}
    centers: list[int] = []
    members: list[list[int]] = []
    for m in reversed(monarchs):
        own = sorted(domain[m], key=lambda v: (D[v][m], v))
        incoming = carry[m]
        par = parent[m]
        if par is None:
            load = incoming + own
            passed: list[int] = []
        else:
            rem = (len(incoming) + len(own)) % cap
            if rem > len(own):
                rem = len(own)
            by_parent = sorted(own, key=lambda v: (D[v][par], v))
            passed = by_parent[:rem]
            kept = set(passed)
            load = incoming + [v for v in own if v not in kept]
            carry[par].extend(passed)
        for i in range(0, len(load), cap):
            centers.append(m)
            members.append(load[i:i + cap])
    return centers, members


def soft_capacitated_kcenter(inst: Instance, k: int | None = None, cap: int | None = None) -> Clustering:
    """Soft uniform capacitated k-center: at most ``k`` slots, each serving at most ``cap`` points.

    Slots may share a location. Thresholds are scanned upward and the first
    one whose monarch packing needs at most ``k`` slots is returned.
    """
    k = inst.k if k is None else k
    if cap is None:
        if not isinstance(inst.capacities, int):
            raise InvalidInstanceError("soft capacitated k-center needs a uniform capacity")
        cap = inst.capacities
    if not inst.center_flavor:
        raise InvalidInstanceError("soft capacitated k-center opens slots at points")
    pts = sorted(inst.points)
    if k * cap < len(pts):
        raise InfeasibleInstanceError(f"{k} slots of capacity {cap} cannot hold {len(pts)} points")
    for tau in _candidate_ints(inst):
        centers, members = _monarch_slots(inst.imat, pts, tau, cap)
        if len(centers) <= k:
            return Clustering.build(inst, centers, members)
    raise ContractViolation("no threshold accepted")


# ---------------------------------------------------------------------------
# exact small-instance solver


@dataclass(frozen=True)
class ExactLimits:
    max_points: int = 12
    max_locations: int = 8
    max_k: int = 4


def _compositions(total: int, parts: int, lo: Sequence[int], hi: Sequence[int]):
    if parts == 0:
        if total == 0:
            yield ()
        return
    first_hi = min(hi[0], total - sum(lo[1:]))
    for x in range(lo[0], first_hi + 1):
        for rest in _compositions(total - x, parts - 1, lo[1:], hi[1:]):
            yield (x,) + rest


class _Feasibility:
    """Decides whether a fixed center set can serve the points within a radius."""

    def __init__(self, inst: Instance, cs: ConstraintSet, o: int):
        self.inst = inst
        self.cs = cs
        self.o = o
        self.pts = sorted(inst.points)
        self.D = inst.imat
        if cs.fairness or cs.strong_privacy:
            self.by_color: dict[str, list[int]] = {}
            for p in self.pts:
                self.by_color.setdefault(inst.colors[p], []).append(p)
        if cs.fairness:
            self.quotas = fair_structure(inst)

    def _flow(self, points, centers, r, lo, hi, need):
        D = self.D
        arcs = []
        for p in points:
            arcs.append(("s", ("p", p), 0, 1))
            for slot, c in enumerate(centers):
                if D[p][c] <= r:
                    arcs.append((("p", p), ("c", slot), 0, 1))
        for slot in range(len(centers)):
            arcs.append((("c", slot), "t", lo[slot], hi[slot]))
        flow = bounded_flow(arcs, "s", "t", need)
        if flow is None:
            return None
        out = {}
        for (u, v), f in flow.items():
            if f and u != "s" and v != "t":
                out[u[1]] = v[1]
        return out

    def __call__(self, centers: Sequence[int], r: int) -> dict[int, int] | None:
        inst, cs, D = self.inst, self.cs, self.D
        n = len(self.pts)
        m = len(centers)
        if cs.strong_privacy:
            bounds = inst.color_ell or {}
            out: dict[int, int] = {}
            for col, group in self.by_color.items():
                b = bounds.get(col, 0)
                got = self._flow(group, centers, r, [b] * m, [len(group)] * m, len(group))
                if got is None:
                    return None
                out.update(got)
            return out
        if cs.fairness:
            q = self.quotas
            blocks = n // q.block
            lo = [1] * m
            hi = [blocks] * m
            for slot, c in enumerate(centers):
                if cs.privacy:
                    lo[slot] = max(lo[slot], -(-inst.ell // q.block))
                if cs.capacities:
                    hi[slot] = min(hi[slot], inst.capacity(c) // q.block)
            for mult in _compositions(blocks, m, lo, hi):
                out = {}
                for col, group in self.by_color.items():
                    demand = [x * q.quotas[col] for x in mult]
                    got = self._flow(group, centers, r, demand, demand, len(group))
                    if got is None:
                        break
                    out.update(got)
                else:
                    return out
            return None
        if not cs.privacy and not cs.capacities:
            out = {}
            for p in self.pts:
                slot = _nearest(D, p, centers)
                if D[p][centers[slot]] <= r:
                    out[p] = slot
            return out if n - len(out) <= self.o else None
        lo = [inst.ell if cs.privacy else 0] * m
        hi = [inst.capacity(c) if cs.capacities else n for c in centers]
        if cs.privacy:
            for c in centers:
                if sum(1 for p in self.pts if D[p][c] <= r) < inst.ell:
                    return None
        return self._flow(self.pts, centers, r, lo, hi, n - self.o)


def exact_solver(
    inst: Instance,
    cs: ConstraintSet,
    k: int | None = None,
    o: int | None = None,
    limits: ExactLimits = ExactLimits(),
) -> Clustering | None:
    """Optimal clustering by enumerating center sets of size at most ``k``.

    For each center set the smallest feasible candidate radius is found by
    binary search (feasibility is monotone in the radius); a set is only
    searched when it beats the best radius found so far. Returns ``None`` when
    no feasible clustering exists.
    """
    k = inst.k if k is None else k
    o = (inst.outliers if o is None else o) if cs.outliers else 0
    n = len(inst.points)
    if n > limits.max_points or len(inst.locations) > limits.max_locations or k > limits.max_k:
        raise SizeCapError(
            f"exact solver caps |P| <= {limits.max_points}, |L| <= {limits.max_locations}, k <= {limits.max_k}; "
            f"got {n}, {len(inst.locations)}, {k}"
        )
    if n <= o:
        return Clustering.build(inst, [], [], outliers=inst.points)
    if k <= 0:
        return None
    if cs.fairness:
        quotas = fair_structure(inst)
        if n % quotas.block:
            raise InvalidInstanceError("color counts are inconsistent with their quotas")
    if cs.privacy and inst.ell > n:
        return None
    feasible = _Feasibility(inst, cs, o)
    radii = _candidate_ints(inst)
    best = None  # (radius index, centers, assignment)
    locs = sorted(inst.locations)
    for size in range(1, min(k, len(locs)) + 1):
        for centers in combinations(locs, size):
            hi = len(radii) - 1 if best is None else best[0] - 1
            if hi < 0:
                break
            got = feasible(centers, radii[hi])
            if got is None:
                continue
            lo = 0
            while lo < hi:
                mid = (lo + hi) // 2
                trial = feasible(centers, radii[mid])
                if trial is None:
                    lo = mid + 1
                else:
                    hi, got = mid, trial
            best = (hi, centers, got)
    if best is None:
        return None
    _, centers, assignment = best
    clusters: list[list[int]] = [[] for _ in centers]
    for p, slot in assignment.items():
        clusters[slot].append(p)
    outliers = [p for p in inst.points if p not in assignment]
    # every opened center is a real cluster under privacy, so never prune there
    return Clustering.build(inst, centers, clusters, outliers=outliers, prune=not cs.privacy)


# ---------------------------------------------------------------------------
# black-box interface


@dataclass(frozen=True)
class ConstrainedSolver:
    """An underlying algorithm with its declared approximation factor.

    ``shape`` lists the side constraints (outliers, capacities, fairness) the
    solver respects; privacy is never part of it. ``factor`` may depend on the
    instance (fair solvers).
    """

    name: str
    factor: Fraction | Callable[[Instance], Fraction]
    shape: frozenset[str]
    run: Callable[[Instance, ConstraintSet], Clustering | None]
    center_only: bool = False

    def alpha(self, inst: Instance) -> Fraction:
        return Fraction(self.factor(inst)) if callable(self.factor) else Fraction(self.factor)

    def supports(self, cs: ConstraintSet) -> bool:
        return set(cs.without_privacy().active) <= self.shape

    def solve(self, inst: Instance, cs: ConstraintSet | None = None) -> Clustering | None:
        cs = ConstraintSet() if cs is None else cs.without_privacy()
        if not self.supports(cs):
            raise InvalidInstanceError(f"solver {self.name} does not handle {cs.active}")
        budget = inst.outliers if cs.outliers else 0
        if len(inst.points) <= budget:
            return Clustering.build(inst, [], [], outliers=inst.points)
        if inst.k <= 0:
            return None
        sol = self.run(inst, cs)
        if sol is not None:
            verdict = check_feasible(inst, cs, sol)
            if not verdict.feasible:
                raise ContractViolation(f"solver {self.name} returned an infeasible clustering: {verdict.violations}")
        return sol
