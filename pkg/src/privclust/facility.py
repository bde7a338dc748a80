"""Private facility location with uniform capacities.

A private solution (every open facility serves at least ``ell`` clients) is
turned into one that also respects a uniform capacity ``u >= 2 ell``: clients
are first moved onto their facility, each facility is split into copies of at
most ``u`` clients, copies at the same place are balanced so that each holds
at least ``u / 2``, and finally each copy is re-centered at its best member.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Mapping, Sequence

import networkx as nx

from .errors import ContractViolation, InfeasibleInstanceError, InvalidInstanceError, SizeCapError
from .metric import Instance

__all__ = [
    "FLSolution",
    "fl_cost",
    "brute_force_private_fl",
    "soft_pack",
    "desoften",
    "privatize_fl",
]

MAX_FL_POINTS = 10


@dataclass(frozen=True)
class FLSolution:
    """Open facilities (one location per slot), client-to-slot assignment and costs.

    With ``soft=True`` a location may back several slots.
    """

    centers: tuple[int, ...]
    assignment: Mapping[int, int]
    connection: Fraction
    opening: Fraction
    soft: bool = False

    @property
    def total(self) -> Fraction:
        return self.connection + self.opening

    def clusters(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in self.centers]
        for p, slot in self.assignment.items():
            out[slot].append(p)
        return tuple(tuple(sorted(c)) for c in out)

    def sizes(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.clusters())

    def violations(self, inst: Instance, ell: int | None = None, cap: int | None = None) -> list[str]:
        """Bound and bookkeeping problems; empty when the solution is sound."""
        ell = inst.ell if ell is None else ell
        out = []
        if set(self.assignment) != set(inst.points):
            out.append("assignment does not cover every client exactly")
        if not self.soft and len(set(self.centers)) != len(self.centers):
            out.append("a location is opened twice in a hard solution")
        for i, c in enumerate(self.clusters()):
            if len(c) < ell:
                out.append(f"facility {inst.name(self.centers[i])} serves {len(c)} < {ell}")
            if cap is not None and len(c) > cap:
                out.append(f"facility {inst.name(self.centers[i])} serves {len(c)} > {cap}")
        conn, opening = fl_cost(inst, self.centers, self.assignment)
        if conn != self.connection or opening != self.opening:
            out.append("stored costs differ from the recomputed ones")
        return out


def _opening(inst: Instance) -> Fraction:
    if inst.opening_cost is None:
        raise InvalidInstanceError("facility location needs an opening cost")
    return Fraction(inst.opening_cost)


def fl_cost(inst: Instance, centers: Sequence[int], assignment: Mapping[int, int]) -> tuple[Fraction, Fraction]:
    """(connection cost, opening cost) recomputed from scratch."""
    conn = sum(inst.imat[p][centers[s]] for p, s in assignment.items())
    return inst.to_rational(conn), _opening(inst) * len(centers)


def _build(inst: Instance, centers: Sequence[int], members: Sequence[Sequence[int]], soft: bool) -> FLSolution:
    keep = [i for i, m in enumerate(members) if m]
    centers = tuple(centers[i] for i in keep)
    assignment = {p: slot for slot, i in enumerate(keep) for p in members[i]}
    conn, opening = fl_cost(inst, centers, assignment)
    return FLSolution(centers=centers, assignment=assignment, connection=conn, opening=opening, soft=soft)


def _assign(inst: Instance, centers: Sequence[int], ell: int, cap: int | None) -> tuple[int, dict[int, int]] | None:
    # min-cost flow: clients supply one unit, each center absorbs at least ell
    pts = list(inst.points)
    n = len(pts)
    if n < ell * len(centers) or (cap is not None and n > cap * len(centers)):
        return None
    g = nx.DiGraph()
    g.add_node("t", demand=n - ell * len(centers))
    for i, c in enumerate(centers):
        g.add_node(("c", i), demand=ell)
        g.add_edge(("c", i), "t", weight=0, **({} if cap is None else {"capacity": cap - ell}))
    for p in pts:
        g.add_node(("p", p), demand=-1)
        for i, c in enumerate(centers):
            g.add_edge(("p", p), ("c", i), weight=inst.imat[p][c], capacity=1)
    try:
        cost, flow = nx.network_simplex(g)
    except nx.NetworkXUnfeasible:
        return None
    assignment = {p: i for p in pts for i in range(len(centers)) if flow[("p", p)][("c", i)]}
    return cost, assignment


def brute_force_private_fl(inst: Instance, cap: int | None = None, ell: int | None = None) -> FLSolution:
    """Optimal facility-location solution over every nonempty set of distinct facilities.

    Every open facility serves at least ``ell`` clients (default ``inst.ell``)
    and at most ``cap`` when given. Ties keep the first set found, by size and
    then lexicographically.
    """
    if len(inst.points) > MAX_FL_POINTS or len(inst.locations) > MAX_FL_POINTS:
        raise SizeCapError(f"the facility-location oracle caps |P|, |L| <= {MAX_FL_POINTS}")
    ell = inst.ell if ell is None else ell
    f = _opening(inst)
    if ell > len(inst.points):
        raise InfeasibleInstanceError(f"ell = {ell} exceeds |P| = {len(inst.points)}")
    best: tuple[Fraction, tuple[int, ...], dict[int, int]] | None = None
    locs = sorted(inst.locations)
    for size in range(1, len(locs) + 1):
        if best is not None and f * size >= best[0]:
            break
        for centers in combinations(locs, size):
            if best is not None:
                # nearest-center connection is a lower bound on any constrained assignment
                floor = sum(min(inst.imat[p][c] for c in centers) for p in inst.points)
                if inst.to_rational(floor) + f * size >= best[0]:
                    continue
            got = _assign(inst, centers, ell, cap)
            if got is None:
                continue
            total = inst.to_rational(got[0]) + f * size
            if best is None or total < best[0]:
                best = (total, centers, got[1])
    if best is None:
        raise InfeasibleInstanceError("no set of facilities admits a feasible assignment")
    _, centers, assignment = best
    members: list[list[int]] = [[] for _ in centers]
    for p, i in assignment.items():
        members[i].append(p)
    return _build(inst, centers, members, soft=False)


def _check_pre(inst: Instance, base: FLSolution, cap: int) -> None:
    if not inst.center_flavor:
        raise InvalidInstanceError("the capacity reduction needs clients and facilities to coincide")
    if 2 * inst.ell > cap:
        raise InvalidInstanceError(f"needs 2 * ell <= u, got ell = {inst.ell}, u = {cap}")
    bad = [s for s in base.sizes() if s < inst.ell]
    if bad:
        raise InvalidInstanceError(f"base solution has a facility with {bad[0]} < ell = {inst.ell} clients")
    if set(base.assignment) != set(inst.points):
        raise InvalidInstanceError("base solution must assign every client")


def _uniform_cap(inst: Instance, cap: int | None) -> int:
    if cap is not None:
        return cap
    if isinstance(inst.capacities, int):
        return inst.capacities
    raise InvalidInstanceError("the capacity reduction needs a uniform capacity")


def soft_pack(inst: Instance, base: FLSolution, cap: int | None = None) -> FLSolution:
    """Split every base facility into copies of at most ``cap`` clients, each holding at least ``ell``.

    The first copy at a location takes ``n mod cap`` clients, then full copies
    follow. Where a location has several copies, the first is topped up from a
    full one until both hold at least half the capacity. Clients are dealt out
    in id order; nothing moves between locations.
    """
    cap = _uniform_cap(inst, cap)
    _check_pre(inst, base, cap)
    centers: list[int] = []
    members: list[list[int]] = []
    for loc, cl in zip(base.centers, base.clusters()):
        pts = list(cl)
        n = len(pts)
        rest, full = n % cap, n // cap
        parts = ([rest] if rest else []) + [cap] * full
        if len(parts) > 1 and 2 * parts[0] < cap:
            shift = (cap + 1) // 2 - parts[0]
            parts[0] += shift
            parts[1] -= shift
        pos = 0
        for size in parts:
            centers.append(loc)
            members.append(pts[pos:pos + size])
            pos += size
    out = _build(inst, centers, members, soft=True)
    problems = out.violations(inst, cap=cap)
    if problems:
        raise ContractViolation(f"soft packing broke a bound: {problems}")
    return out


def desoften(inst: Instance, soft: FLSolution) -> FLSolution:
    """Re-center every copy at the member minimising its connection cost (ties by lowest id)."""
    D = inst.imat
    centers = []
    members = []
    for loc, cl in zip(soft.centers, soft.clusters()):
        best = min(cl, key=lambda y: (sum(D[x][y] for x in cl), y))
        before = sum(D[x][loc] for x in cl)
        after = sum(D[x][best] for x in cl)
        if after > 2 * before:
            raise ContractViolation(f"re-centering cost {after} exceeds twice {before}")
        centers.append(best)
        members.append(list(cl))
    return _build(inst, centers, members, soft=False)


def privatize_fl(inst: Instance, base: FLSolution, cap: int | None = None) -> FLSolution:
    """Hard-capacitated private solution from a private one; cost at most ``2 conn + f (k' + n/u)``."""
    cap = _uniform_cap(inst, cap)
    soft = soft_pack(inst, base, cap)
    if soft.connection != base.connection:
        raise ContractViolation("packing changed the connection cost")
    out = desoften(inst, soft)
    limit = len(base.centers) + len(inst.points) // cap
    if len(out.centers) > limit:
        raise ContractViolation(f"{len(out.centers)} facilities exceed k' + n/u = {limit}")
    if out.connection > 2 * base.connection:
        raise ContractViolation("connection cost more than doubled")
    problems = out.violations(inst, cap=cap)
    if problems:
        raise ContractViolation(f"capacitated solution is infeasible: {problems}")
    return out
