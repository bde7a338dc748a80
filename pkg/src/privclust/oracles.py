"""Brute-force reference solvers used to certify the approximation factors.

These deliberately share no search logic with the production solvers: the
assignment oracle enumerates every point-to-location map, the partition oracle
every partition into fair subsets.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, product

import numpy as np

from .errors import SizeCapError
from .flow import FlowNetwork, max_flow
from .metric import ConstraintSet, Instance, fair_structure

__all__ = [
    "enumerate_assignments",
    "fair_partition_oracle",
    "soft_capacity_oracle",
    "min_cut_bruteforce",
]


def enumerate_assignments(inst: Instance, cs: ConstraintSet, max_maps: int = 200_000) -> Fraction | None:
    """Optimal radius over all maps ``P -> L ∪ {outlier}``; ``None`` if nothing is feasible.

    The opened centers are the image of the map. Vectorised over all maps at once.
    """
    pts = list(inst.points)
    locs = list(inst.locations)
    n, m = len(pts), len(locs)
    choices = m + 1 if cs.outliers else m
    if choices ** n > max_maps:
        raise SizeCapError(f"{choices ** n} maps exceed the enumeration cap {max_maps}")
    maps = np.array(list(product(range(choices), repeat=n)), dtype=np.int64).reshape(-1, n)
    rows = [[inst.imat[p][q] for q in locs] + [-1] for p in pts]
    D = np.array(rows, dtype=np.int64 if max(map(max, rows)) < 2**62 else object)
    dist = D[np.arange(n)[None, :], maps]
    radius = dist.max(axis=1)
    onehot = maps[:, :, None] == np.arange(m)[None, None, :]
    counts = onehot.sum(axis=1)
    opened = counts > 0
    ok = opened.sum(axis=1) <= inst.k
    if cs.outliers:
        ok &= (maps == m).sum(axis=1) <= inst.outliers
    if cs.privacy:
        ok &= ~(opened & (counts < inst.ell)).any(axis=1)
    if cs.capacities:
        caps = np.array([inst.capacity(q) for q in locs])
        ok &= (counts <= caps[None, :]).all(axis=1)
    if cs.fairness or cs.strong_privacy:
        colors = sorted(set(inst.colors[p] for p in pts))
        per = {
            c: (onehot & np.array([inst.colors[p] == c for p in pts])[None, :, None]).sum(axis=1)
            for c in colors
        }
        if cs.fairness:
            totals = inst.color_counts()
            for a, b in combinations(colors, 2):
                ok &= (per[a] * totals[b] == per[b] * totals[a]).all(axis=1)
        if cs.strong_privacy:
            for c, lb in (inst.color_ell or {}).items():
                here = per.get(c, np.zeros_like(counts))
                ok &= ~(opened & (here < lb)).any(axis=1)
    if cs.outliers and n <= inst.outliers:
        ok |= (maps == m).all(axis=1)
    if not ok.any():
        return None
    return inst.to_rational(max(int(radius[ok].min()), 0))


def _fair_partitions(pts: list[int], colors, quotas):
    if not pts:
        yield []
        return
    first, rest = pts[0], pts[1:]
    need = dict(quotas)
    need[colors[first]] -= 1
    pools = {c: [p for p in rest if colors[p] == c] for c in need}
    options = [list(combinations(pools[c], need[c])) for c in sorted(need)]
    for pick in product(*options):
        group = [first] + [p for part in pick for p in part]
        used = set(group)
        for tail in _fair_partitions([p for p in rest if p not in used], colors, quotas):
            yield [tuple(sorted(group))] + tail


def fair_partition_oracle(inst: Instance, max_points: int = 10) -> Fraction:
    """Optimal fair-subset-partition bottleneck: representatives range over all of ``P``."""
    pts = sorted(inst.points)
    if len(pts) > max_points:
        raise SizeCapError(f"partition oracle caps |P| <= {max_points}")
    quotas = fair_structure(inst).quotas
    D = inst.imat
    cost: dict[tuple[int, ...], int] = {}
    best = None
    for part in _fair_partitions(pts, inst.colors, quotas):
        worst = 0
        for g in part:
            if g not in cost:
                cost[g] = min(max(D[y][p] for p in g) for y in pts)
            worst = max(worst, cost[g])
            if best is not None and worst >= best:
                break
        if best is None or worst < best:
            best = worst
    return inst.to_rational(best)


def soft_capacity_oracle(inst: Instance, k: int, cap: int) -> Fraction:
    """Optimal soft-capacitated k-center radius with centers at points.

    Enumerates distinct center sets and slot multiplicities; assignment
    feasibility is a max-flow with capacity ``multiplicity * cap`` per center.
    """
    pts = sorted(inst.points)
    D = inst.imat
    radii = sorted({D[p][q] for p in pts for q in pts})
    best = None
    for size in range(1, min(k, len(pts)) + 1):
        for centers in combinations(pts, size):
            for r in radii:
                if best is not None and r >= best:
                    break
                if _soft_ok(D, pts, centers, r, cap, k, size):
                    best = r
                    break
    return inst.to_rational(best)


def _soft_ok(D, pts, centers, r, cap, k, size):
    # the extra k - size slots can sit anywhere; capacity is pooled per center,
    # so try every distribution of the spare slots
    spare = k - size
    for extra in product(range(spare + 1), repeat=size):
        if sum(extra) != spare:
            continue
        arcs = [("s", ("p", p), 1) for p in pts]
        for p in pts:
            for i, c in enumerate(centers):
                if D[p][c] <= r:
                    arcs.append((("p", p), ("c", i), 1))
        arcs += [(("c", i), "t", (1 + extra[i]) * cap) for i in range(size)]
        if max_flow(FlowNetwork.build(arcs)).value == len(pts):
            return True
    return False


def min_cut_bruteforce(net: FlowNetwork) -> int:
    """Minimum s-t cut capacity by enumerating every bipartition of the inner nodes."""
    inner = [x for x in net.nodes if x not in (net.source, net.sink)]
    best = None
    for mask in range(1 << len(inner)):
        side = {net.sink} | {x for i, x in enumerate(inner) if mask >> i & 1}
        cap = sum(c for (u, v), c in net.arcs.items() if u not in side and v in side)
        if best is None or cap < best:
            best = cap
    return best
