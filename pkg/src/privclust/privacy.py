"""Adding a lower bound on cluster sizes to a constrained clustering.

For every candidate threshold ``tau`` the underlying solver's clustering is
repaired with a max-flow that moves points (or fair subsets) by at most
``2 tau`` from clusters above the bound to clusters below it. When the flow
cannot fill every deficit, the residual cut isolates a region that any good
solution covers with fewer clusters; that region is re-solved with one cluster
less and the repair is retried.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .errors import ContractViolation, InfeasibleInstanceError, InvalidInstanceError
from .flow import FlowNetwork, FlowResult, max_flow, residual_unreachable
from .metric import (
    Clustering,
    ConstraintSet,
    Instance,
    _candidate_ints,
    check_feasible,
    check_privacy_bounds,
    fair_structure,
    rounded_lower_bound,
    to_fraction,
)
from .registry import get_solver
from .solvers import ConstrainedSolver, exact_solver

__all__ = [
    "VARIANTS",
    "ThresholdGraph",
    "CutAnalysis",
    "build_threshold_graph",
    "reassign_from_flow",
    "analyze_cut",
    "attempt_threshold",
    "solve_private",
    "solve_private_outliers",
    "solve_private_capacitated",
    "solve_private_fair",
    "solve_private_fair_capacitated",
    "solve_strongly_private",
    "contract_fairlets",
]

Unit = tuple[int, ...]

# variant -> (side constraints handed to the underlying solver, full constraint set of the output)
VARIANTS: dict[str, tuple[ConstraintSet, ConstraintSet]] = {
    "privacy": (ConstraintSet(), ConstraintSet(privacy=True)),
    "outliers": (ConstraintSet(outliers=True), ConstraintSet(privacy=True, outliers=True)),
    "capacities": (ConstraintSet(capacities=True), ConstraintSet(privacy=True, capacities=True)),
    "fair": (ConstraintSet(fairness=True), ConstraintSet(privacy=True, fairness=True)),
    "strong": (ConstraintSet(), ConstraintSet(strong_privacy=True)),
}


# ---------------------------------------------------------------------------
# fair sets inside clusters


def _greedy_fair_sets(inst: Instance, members: Sequence[int], quotas: Mapping[str, int]) -> list[Unit]:
    by_color: dict[str, list[int]] = {c: [] for c in quotas}
    for p in sorted(members):
        by_color[inst.colors[p]].append(p)
    counts = {c: len(v) // quotas[c] for c, v in by_color.items()}
    m = next(iter(counts.values()), 0)
    if any(n != m or len(by_color[c]) != n * quotas[c] for c, n in counts.items()):
        raise ContractViolation(f"cluster {sorted(members)} is not fair")
    return [
        tuple(sorted(p for c in sorted(quotas) for p in by_color[c][j * quotas[c]:(j + 1) * quotas[c]]))
        for j in range(m)
    ]


def _fair_units(inst: Instance, sol: Clustering, quotas: Mapping[str, int]) -> list[list[Unit]]:
    """Fair sets per cluster: the clustering's own groups when they fit, else a greedy split by id."""
    clusters = sol.clusters()
    per: list[list[Unit]] = [[] for _ in clusters]
    if sol.groups is not None:
        ok = True
        for g in sol.groups:
            slots = {sol.assignment.get(p) for p in g}
            here = Counter(inst.colors[p] for p in g)
            if len(slots) != 1 or None in slots or dict(here) != dict(quotas):
                ok = False
                break
            per[slots.pop()].append(tuple(sorted(g)))
        if ok and sum(len(u) for units in per for u in units) == len(sol.assignment):
            return per
    return [_greedy_fair_sets(inst, c, quotas) for c in clusters]


# ---------------------------------------------------------------------------
# threshold graph


@dataclass(frozen=True)
class ThresholdGraph:
    """A threshold flow network with the bookkeeping needed to read moves off a flow.

    Unit ``j`` (node ``("w", j)``) is a single point or a fair subset, owned by
    cluster ``owner[j]`` or by the outlier node when the owner is ``None``.
    ``sizes`` counts each cluster in points of the graph's concern (all points,
    or only one color for per-color graphs); ``bound`` is the lower bound in the
    same units and ``block`` the number of points per unit.
    """

    network: FlowNetwork
    tau: Fraction
    bound: int
    block: int
    units: tuple[Unit, ...]
    owner: tuple[int | None, ...]
    sizes: tuple[int, ...]
    cluster_points: tuple[tuple[int, ...], ...]
    outliers: tuple[int, ...] = ()
    color: str | None = None

    @staticmethod
    def cluster_node(i: int):
        return ("v", i)

    @staticmethod
    def unit_node(j: int):
        return ("w", j)

    def moves(self, fr: FlowResult) -> list[tuple[int, int]]:
        """(unit, target cluster) for every unit arc carrying flow."""
        out = []
        for (u, v), f in fr.flow.items():
            if f and isinstance(u, tuple) and u[0] == "w" and isinstance(v, tuple) and v[0] == "v":
                out.append((u[1], v[1]))
        return sorted(out)


def _graph_units(inst: Instance, sol: Clustering, variant: str, color: str | None):
    clusters = sol.clusters()
    if variant == "fair":
        fq = fair_structure(inst)
        per = _fair_units(inst, sol, fq.quotas)
        sizes = [len(c) for c in clusters]
        return per, sizes, fq.block, rounded_lower_bound(inst.ell, fq.block)
    if variant == "strong":
        bounds = inst.color_ell or {}
        per = [[(p,) for p in c if inst.colors[p] == color] for c in clusters]
        return per, [len(u) for u in per], 1, bounds.get(color, 0)
    return [[(p,) for p in c] for c in clusters], [len(c) for c in clusters], 1, inst.ell


def build_threshold_graph(
    inst: Instance,
    sol: Clustering,
    tau,
    variant: str = "privacy",
    *,
    color: str | None = None,
    anchors: Sequence[Sequence[int]] | None = None,
) -> ThresholdGraph:
    """Threshold graph of ``sol`` at ``tau`` for one variant.

    Clusters above the bound get a source arc for their surplus, clusters below
    it a sink arc for their deficit (both divided by the block size). A unit may
    move to another cluster when some point of it lies within ``2 tau`` of some
    point of that cluster's current membership. The outlier variant adds a node
    feeding the current outliers, with source capacity ``o``.

    ``anchors`` optionally restricts, per cluster, which members count when
    measuring distances to that cluster (all members by default).
    """
    if variant not in VARIANTS:
        raise InvalidInstanceError(f"unknown variant {variant!r}")
    if variant == "strong" and color is None:
        raise InvalidInstanceError("per-color graphs need a color")
    tau = to_fraction(tau)
    limit = 2 * tau * inst.scale
    D = inst.imat
    clusters = sol.clusters()
    per, sizes, block, bound = _graph_units(inst, sol, variant, color)
    near = clusters if anchors is None else tuple(tuple(a) for a in anchors)

    nodes: list = ["s"] + [ThresholdGraph.cluster_node(i) for i in range(len(clusters))]
    arcs: list[tuple] = []
    for i, size in enumerate(sizes):
        if size > bound:
            arcs.append(("s", ("v", i), (size - bound) // block))
        elif size < bound:
            arcs.append((("v", i), "t", (bound - size) // block))

    units: list[Unit] = []
    owner: list[int | None] = []
    for i, us in enumerate(per):
        for u in us:
            units.append(u)
            owner.append(i)
    outliers = tuple(sorted(sol.outliers))
    if variant == "outliers":
        nodes.append("v_out")
        arcs.append(("s", "v_out", inst.outliers))
        for p in outliers:
            units.append((p,))
            owner.append(None)

    for j, (u, own) in enumerate(zip(units, owner)):
        w = ("w", j)
        nodes.append(w)
        arcs.append(("v_out" if own is None else ("v", own), w, 1))
        for i, members in enumerate(near):
            if i != own and members and min(D[p][q] for p in u for q in members) <= limit:
                arcs.append((w, ("v", i), 1))
    nodes.append("t")
    net = FlowNetwork.build(arcs, nodes=nodes, max_capacity=len(inst.points) + inst.outliers)
    return ThresholdGraph(
        network=net,
        tau=tau,
        bound=bound,
        block=block,
        units=tuple(units),
        owner=tuple(owner),
        sizes=tuple(sizes),
        cluster_points=clusters,
        outliers=outliers,
        color=color,
    )


def _apply_moves(inst: Instance, sol: Clustering, moves: Sequence[tuple[Unit, int | None, int]]) -> Clustering:
    members = [list(c) for c in sol.clusters()]
    outliers = set(sol.outliers)
    for unit, src, dst in moves:
        for p in unit:
            if src is None:
                outliers.discard(p)
            else:
                members[src].remove(p)
            members[dst].append(p)
    return Clustering.build(inst, sol.centers, members, outliers=outliers, groups=sol.groups)


def reassign_from_flow(inst: Instance, sol: Clustering, tg: ThresholdGraph, fr: FlowResult) -> Clustering:
    """Move every unit whose arc to another cluster carries flow."""
    if not fr.saturates_sink:
        raise ContractViolation("some deficit arc is unsaturated; analyse the cut instead")
    return _apply_moves(inst, sol, [(tg.units[j], tg.owner[j], i) for j, i in tg.moves(fr)])


# ---------------------------------------------------------------------------
# residual cut


@dataclass(frozen=True)
class CutAnalysis:
    unreachable: frozenset
    clusters: tuple[int, ...]
    points: frozenset[int]
    adjacent: frozenset[int]
    outliers: frozenset[int]

    @property
    def k2(self) -> int:
        return len(self.clusters)

    @property
    def current_outliers(self) -> int:
        return len(self.outliers)

    def is_special(self, members: Sequence[int]) -> bool:
        """Touches the cut region, or consists only of current outliers."""
        members = list(members)
        return any(p in self.points for p in members) or (bool(members) and all(p in self.outliers for p in members))


def analyze_cut(tg: ThresholdGraph, fr: FlowResult) -> CutAnalysis:
    """Residual-unreachable region of a flow that leaves some deficit unfilled.

    Asserts the structural properties of the cut and the counting bound: the
    units inside the region plus those adjacent to it are fewer than
    ``k'' * bound``.
    """
    if fr.saturates_sink:
        raise ContractViolation("all deficit arcs are saturated; nothing to analyse")
    V = residual_unreachable(tg.network, fr)
    arcs = tg.network.arcs
    flow = fr.flow
    in_v = [i for i in range(len(tg.cluster_points)) if ("v", i) in V]

    for j, own in enumerate(tg.owner):
        w = ("w", j)
        for i in range(len(tg.cluster_points)):
            if (w, ("v", i)) not in arcs:
                continue
            if ("v", i) in V and w not in V:
                raise ContractViolation(f"unit {j} reaches cut cluster {i} from outside the cut")
            if w in V and flow[(w, ("v", i))] > 0 and ("v", i) not in V:
                raise ContractViolation(f"unit {j} in the cut sends flow out of it")
        if own is not None and w in V and ("v", own) not in V and flow[(("v", own), w)] != 1:
            raise ContractViolation(f"adjacent unit {j} is not moved")

    cut_set = set(in_v)
    pts = frozenset(p for i in in_v for p in tg.cluster_points[i])
    adjacent = frozenset(
        p for j, own in enumerate(tg.owner) if own is not None and own not in cut_set and ("w", j) in V for p in tg.units[j]
    )

    bound_units = tg.bound // tg.block
    inside = sum(1 for own in tg.owner if own in cut_set)
    adj_units = sum(1 for j, own in enumerate(tg.owner) if own is not None and own not in cut_set and ("w", j) in V)
    from_out = 0
    after = []
    for i in in_v:
        gained = sum(flow[(w, v)] for (w, v) in arcs if v == ("v", i) and w != "s")
        lost = sum(flow[(v, w)] for (v, w) in arcs if v == ("v", i) and w != "t")
        after.append(tg.sizes[i] // tg.block + gained - lost)
        from_out += sum(
            flow[(("w", j), ("v", i))]
            for j, own in enumerate(tg.owner)
            if own is None and (("w", j), ("v", i)) in arcs
        )
    if any(n > bound_units for n in after) or not any(n < bound_units for n in after):
        raise ContractViolation("cut clusters are not all at or below the bound")
    if inside + adj_units + from_out != sum(after) or sum(after) >= len(in_v) * bound_units:
        raise ContractViolation("counting bound of the cut fails")
    return CutAnalysis(
        unreachable=V,
        clusters=tuple(in_v),
        points=pts,
        adjacent=adjacent,
        outliers=frozenset(tg.outliers),
    )


# ---------------------------------------------------------------------------
# the per-threshold loop


@dataclass
class _Framework:
    inst: Instance
    variant: str
    solver: ConstrainedSolver
    trace: list | None = None
    cache: dict = field(default_factory=dict)
    parked: set = field(default_factory=set)
    just_parked: list = field(default_factory=list)
    tau: Fraction = Fraction(0)

    def __post_init__(self):
        self.side, self.full = VARIANTS[self.variant]
        if not self.solver.supports(self.side):
            raise InvalidInstanceError(f"solver {self.solver.name} cannot handle the {self.variant} variant")
        self.alpha = self.solver.alpha(self.inst)
        if self.variant == "outliers":
            self.max_iter = (self.inst.k + 1) * (self.inst.outliers + 1) - 1
        else:
            self.max_iter = self.inst.k
        if self.variant == "fair":
            self.quotas = fair_structure(self.inst).quotas
        if self.variant == "strong":
            self.colors = sorted(c for c, b in (self.inst.color_ell or {}).items() if b > 0)

    def log(self, **rec):
        if self.trace is not None:
            self.trace.append(rec)

    def call(self, points, k: int, o: int) -> Clustering | None:
        key = (tuple(sorted(points)), k, o)
        if key not in self.cache:
            sub = self.inst.restrict(points=key[0], k=k, outliers=o)
            self.cache[key] = self.solver.solve(sub, self.side)
        return self.cache[key]

    def anchors(self, sol: Clustering) -> list[tuple[int, ...]] | None:
        if not self.parked:
            return None
        return [tuple(p for p in c if p not in self.parked) for c in sol.clusters()]

    def core_radius(self, sol: Clustering) -> Fraction:
        D = self.inst.imat
        worst = max(
            (D[p][sol.centers[i]] for p, i in sol.assignment.items() if p not in self.parked),
            default=0,
        )
        return self.inst.to_rational(worst)

    def graphs(self, sol: Clustering, tau: Fraction) -> list[ThresholdGraph]:
        anchors = self.anchors(sol)
        if self.variant == "strong":
            return [build_threshold_graph(self.inst, sol, tau, "strong", color=c, anchors=anchors) for c in self.colors]
        return [build_threshold_graph(self.inst, sol, tau, self.variant, anchors=anchors)]

    def prepare(self, sol: Clustering) -> Clustering:
        if self.variant != "fair":
            return sol
        per = _fair_units(self.inst, sol, self.quotas)
        groups = [u for us in per for u in us]
        return Clustering.build(self.inst, sol.centers, sol.clusters(), outliers=sol.outliers, groups=groups)

    def splice(self, sol: Clustering, cut: CutAnalysis, repl: Clustering) -> Clustering:
        drop = set(cut.clusters)
        keep = [i for i in range(len(sol.centers)) if i not in drop]
        old = sol.clusters()
        new = repl.clusters()
        if self.variant == "outliers" and not all(cut.is_special(c) for c in new):
            raise ContractViolation("a replacement cluster is not special")
        centers = [sol.centers[i] for i in keep] + list(repl.centers)
        members = [old[i] for i in keep] + list(new)
        outliers = repl.outliers if self.variant == "outliers" else sol.outliers
        self.parked &= {p for i in keep for p in old[i]}
        groups = None
        if self.variant == "fair":
            kept_pts = {p for i in keep for p in old[i]}
            groups = [g for g in sol.groups if next(iter(g)) in kept_pts]
            per = _fair_units(self.inst, repl, self.quotas)
            groups += [u for us in per for u in us]
        return Clustering.build(self.inst, centers, members, outliers=outliers, groups=groups)

    def recompute(self, sol: Clustering, cut: CutAnalysis, limit: Fraction) -> Clustering | None:
        if self.variant == "outliers":
            region = cut.points | cut.outliers
            tries = []
            if cut.current_outliers >= 1:
                tries.append((cut.k2, cut.current_outliers - 1))
            tries.append((cut.k2 - 1, self.inst.outliers))
        else:
            region = cut.points
            tries = [(cut.k2 - 1, 0)]
        for kk, oo in tries:
            repl = self.call(region, kk, oo)
            if repl is not None and repl.radius <= limit:
                return self.splice(sol, cut, repl)
        if self.variant == "outliers" and cut.k2 >= 1:
            return self.park_and_recompute(sol, cut, limit)
        return None

    def park_and_recompute(self, sol: Clustering, cut: CutAnalysis, limit: Fraction) -> Clustering | None:
        """Fallback when both re-solves fail: park outliers next to untouched clusters, re-solve the rest.

        A current outlier lying within ``2 tau`` of a cluster outside the cut is
        attached to the nearest such cluster; the cut region is then re-solved
        with one cluster less against the remaining outliers. Parked points never
        anchor later moves, so every point stays within ``alpha tau + 2 tau`` of
        its center.
        """
        drop = set(cut.clusters)
        anchors = self.anchors(sol) or sol.clusters()
        D = self.inst.imat
        limit2 = 2 * self.tau * self.inst.scale
        hosts: dict[int, int] = {}
        for q in sorted(cut.outliers):
            near = [
                (min(D[q][x] for x in anchors[i]), i)
                for i in range(len(anchors))
                if i not in drop and anchors[i]
            ]
            near = [(d, i) for d, i in near if d <= limit2]
            if near:
                hosts[q] = min(near)[1]
        if not hosts:
            return None
        region = cut.points | (cut.outliers - set(hosts))
        repl = self.call(region, cut.k2 - 1, self.inst.outliers)
        if repl is None or repl.radius > limit:
            return None
        old = sol.clusters()
        keep = [i for i in range(len(sol.centers)) if i not in drop]
        members = [list(old[i]) + [q for q, h in hosts.items() if h == i] for i in keep] + [list(c) for c in repl.clusters()]
        if not all(cut.is_special(c) for c in repl.clusters()):
            raise ContractViolation("a replacement cluster is not special")
        centers = [sol.centers[i] for i in keep] + list(repl.centers)
        kept_pts = {p for i in keep for p in old[i]}
        self.parked = (self.parked & kept_pts) | set(hosts)
        self.just_parked = sorted(self.inst.name(q) for q in hosts)
        return Clustering.build(self.inst, centers, members, outliers=repl.outliers)

    def attempt(self, tau: Fraction) -> Clustering | None:
        inst = self.inst
        limit = self.alpha * tau
        base = self.call(inst.points, inst.k, inst.outliers if self.side.outliers else 0)
        if base is None or base.radius > limit:
            self.log(tau=str(tau), iteration=0, clusters=None if base is None else len(base.centers),
                     outliers=None if base is None else len(base.outliers), k2=None, result="rejected")
            return None
        sol = self.prepare(base)
        self.tau = tau
        self.parked = set()
        it = 0
        while True:
            pairs = [(tg, max_flow(tg.network)) for tg in self.graphs(sol, tau)]
            short = [(tg, fr) for tg, fr in pairs if not fr.saturates_sink]
            if not short:
                moves = []
                for tg, fr in pairs:
                    moves += [(tg.units[j], tg.owner[j], i) for j, i in tg.moves(fr)]
                moved = [p for u, _, _ in moves for p in u]
                if len(moved) != len(set(moved)):
                    raise ContractViolation("per-color moves overlap")
                out = _apply_moves(inst, sol, moves)
                grow = 3 if self.variant == "fair" else 1
                if out.radius > grow * self.core_radius(sol) + 2 * tau:
                    raise ContractViolation(f"radius {out.radius} exceeds {grow}r + 2tau after reassignment")
                verdict = check_feasible(inst, self.full, out)
                if not verdict.feasible:
                    raise ContractViolation(f"repaired clustering is infeasible: {verdict.violations}")
                self.log(tau=str(tau), iteration=it, clusters=len(out.centers), outliers=len(out.outliers),
                         k2=None, result="accepted")
                return out
            tg, fr = short[0]
            cut = analyze_cut(tg, fr)
            it += 1
            if it > self.max_iter:
                raise ContractViolation(f"iteration {it} exceeds the bound {self.max_iter}")
            self.just_parked = []
            new = self.recompute(sol, cut, limit)
            extra = {"parked": self.just_parked} if self.just_parked else {}
            self.log(tau=str(tau), iteration=it, clusters=len(sol.centers), outliers=len(sol.outliers),
                     k2=cut.k2, result="recomputed" if new is not None else "rejected", **extra)
            if new is None:
                return None
            before = (len(sol.centers), len(sol.outliers))
            after = (len(new.centers), len(new.outliers))
            if self.variant == "outliers" and not after < before:
                raise ContractViolation(f"no progress: {before} -> {after}")
            if self.variant != "outliers" and not after[0] < before[0]:
                raise ContractViolation(f"no progress: {before[0]} -> {after[0]} clusters")
            sol = new

    def run(self) -> Clustering:
        best = None
        scale = self.inst.scale
        for t in _candidate_ints(self.inst):
            tau = Fraction(t, scale)
            if best is not None and tau >= best.radius:
                break
            got = self.attempt(tau)
            if got is not None and (best is None or got.radius < best.radius):
                best = got
        if best is None:
            raise InfeasibleInstanceError(f"no threshold admits a feasible {self.variant} clustering")
        return best


def _resolve(solver, default: str) -> ConstrainedSolver:
    if solver is None:
        return get_solver(default)
    if isinstance(solver, str):
        return get_solver(solver)
    return solver


def _precheck(inst: Instance, variant: str) -> None:
    if variant in ("privacy", "outliers", "capacities"):
        check_privacy_bounds(inst)
    if variant == "capacities" and inst.capacities is None:
        raise InvalidInstanceError("capacitated variant needs capacities")
    if variant == "fair":
        if inst.colors is None:
            raise InvalidInstanceError("fair variant needs colors")
        b = fair_structure(inst).block
        if rounded_lower_bound(inst.ell, b) > len(inst.points):
            raise InfeasibleInstanceError(f"rounded lower bound {rounded_lower_bound(inst.ell, b)} exceeds |P|")
    if variant == "strong":
        if inst.colors is None or inst.color_ell is None:
            raise InvalidInstanceError("strongly private variant needs colors and per-color bounds")
        counts = inst.color_counts()
        for c, b in inst.color_ell.items():
            if b > counts.get(c, 0):
                raise InfeasibleInstanceError(f"color {c} needs {b} points per cluster but has {counts.get(c, 0)}")
    if inst.k <= 0 and len(inst.points) > (inst.outliers if variant == "outliers" else 0):
        raise InfeasibleInstanceError("k = 0 but points must be served")


def attempt_threshold(inst: Instance, variant: str, solver, tau, trace: list | None = None) -> Clustering | None:
    """Run the repair loop at a single threshold; ``None`` means the threshold is rejected."""
    _precheck(inst, variant)
    fw = _Framework(inst, variant, _resolve(solver, _default_underlying(inst, variant)), trace)
    return fw.attempt(to_fraction(tau))


def _default_underlying(inst: Instance, variant: str) -> str:
    center = inst.center_flavor
    return {
        "privacy": "gonzalez" if center else "hs",
        "outliers": "outliers-greedy" if center else "exact",
        "capacities": "exact",
        "fair": "fair-fairlet-center" if center else "fair-fairlet-supplier",
        "strong": "gonzalez" if center else "hs",
    }[variant]


def _solve(inst: Instance, variant: str, solver, trace) -> Clustering:
    _precheck(inst, variant)
    fw = _Framework(inst, variant, _resolve(solver, _default_underlying(inst, variant)), trace)
    return fw.run()


def solve_private(inst: Instance, solver=None, trace: list | None = None) -> Clustering:
    """Private k-center / k-supplier without further constraints."""
    return _solve(inst, "privacy", solver, trace)


def solve_private_outliers(inst: Instance, solver=None, trace: list | None = None) -> Clustering:
    """Private clustering with at most ``inst.outliers`` discarded points; factor ``alpha + 2``."""
    return _solve(inst, "outliers", solver, trace)


def solve_private_capacitated(inst: Instance, solver=None, trace: list | None = None) -> Clustering:
    """Private clustering under hard capacities; factor ``alpha + 2``."""
    return _solve(inst, "capacities", solver, trace)


def solve_private_fair(inst: Instance, solver=None, trace: list | None = None) -> Clustering:
    """Private fair clustering; the lower bound is rounded up to a multiple of the block size."""
    return _solve(inst, "fair", solver, trace)


def solve_strongly_private(inst: Instance, solver=None, trace: list | None = None) -> Clustering:
    """Clustering with a lower bound per color in every cluster; factor ``alpha + 2``."""
    return _solve(inst, "strong", solver, trace)


# ---------------------------------------------------------------------------
# fair + capacitated via contraction


def contract_fairlets(inst: Instance, subsets: Sequence[Sequence[int]]) -> tuple[Instance, list[int]]:
    """Instance whose points are the fair subsets, with bounds divided by the block size.

    A subset's distance to a location is the largest distance of its members;
    between two subsets it is the largest distance over member pairs. Locations
    whose reduced capacity is below the reduced lower bound are dropped.
    Returns the contracted instance and the original index of each location.
    """
    fq = fair_structure(inst)
    b = fq.block
    ell_units = rounded_lower_bound(inst.ell, b) // b
    locs = [q for q in inst.locations if inst.capacity(q) // b >= ell_units]
    if not locs:
        raise InfeasibleInstanceError("no location can host a cluster once bounds are rounded to whole fair subsets")
    m = len(subsets)
    d = inst.dist
    size = m + len(locs)
    mat = [[Fraction(0)] * size for _ in range(size)]
    for i, fi in enumerate(subsets):
        for j in range(i + 1, m):
            mat[i][j] = mat[j][i] = max(d[p][q] for p in fi for q in subsets[j])
        for a, q in enumerate(locs):
            mat[i][m + a] = mat[m + a][i] = max(d[p][q] for p in fi)
    for a, q in enumerate(locs):
        for c, r in enumerate(locs):
            mat[m + a][m + c] = d[q][r]
    ids = [f"fairlet{i}" for i in range(m)] + [inst.name(q) for q in locs]
    caps = {m + a: inst.capacity(q) // b for a, q in enumerate(locs)}
    cinst = Instance.from_matrix(
        mat,
        ids=ids,
        points=range(m),
        locations=range(m, size),
        k=inst.k,
        ell=ell_units,
        capacities=caps,
        validate=False,
    ).validate()
    return cinst, locs


def solve_private_fair_capacitated(
    inst: Instance,
    pc_solver: str | Callable[[Instance], Clustering | None] = "exact",
    partition=None,
) -> Clustering:
    """Private, fair and capacitated clustering by solving on contracted fair subsets.

    ``pc_solver`` is ``"exact"``, ``"private-capacitated"`` (the flow
    framework over the exact solver) or a callable returning a private
    capacitated clustering of the contracted instance.
    """
    from .fair import fair_subset_partition

    if inst.colors is None or inst.capacities is None:
        raise InvalidInstanceError("fair capacitated variant needs colors and capacities")
    fs = fair_subset_partition(inst) if partition is None else partition
    cinst, locs = contract_fairlets(inst, fs.subsets)
    if pc_solver == "exact":
        csol = exact_solver(cinst, ConstraintSet(privacy=True, capacities=True))
    elif pc_solver == "private-capacitated":
        try:
            csol = solve_private_capacitated(cinst, "exact")
        except InfeasibleInstanceError:
            csol = None
    elif callable(pc_solver):
        csol = pc_solver(cinst)
    else:
        raise InvalidInstanceError(f"unknown private capacitated solver {pc_solver!r}")
    if csol is None:
        raise InfeasibleInstanceError("the contracted private capacitated instance has no solution")
    m = len(fs.subsets)
    centers = [locs[c - m] for c in csol.centers]
    members: list[list[int]] = [[] for _ in centers]
    for f, slot in csol.assignment.items():
        members[slot].extend(fs.subsets[f])
    out = Clustering.build(inst, centers, members, groups=fs.subsets, prune=False)
    verdict = check_feasible(inst, ConstraintSet(privacy=True, fairness=True, capacities=True), out)
    if not verdict.feasible:
        raise ContractViolation(f"expanded clustering is infeasible: {verdict.violations}")
    return out
