"""Fair subset partitions and fair k-center / k-supplier built on them.

A fair subset holds exactly ``b_c`` points of every color ``c``. The partition
seeds subsets from one color with a soft-capacitated clustering, then attaches
the other colors by bottleneck matchings against copies of the seed clusters.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .errors import ContractViolation, InvalidInstanceError
from .matching import BipartiteWeights, bottleneck_perfect_matching
from .metric import Clustering, Instance, fair_structure
from .solvers import gonzalez_kcenter, hs_ksupplier, soft_capacitated_kcenter

__all__ = [
    "FairStructure",
    "fair_subset_partition",
    "fair_center_via_fairlets",
    "partition_factor",
    "seed_color",
]


@dataclass(frozen=True)
class FairStructure:
    quotas: Mapping[str, int]
    block: int
    subsets: tuple[tuple[int, ...], ...]
    representatives: tuple[int, ...]
    radius: Fraction
    beta: int

    def check(self, inst: Instance) -> None:
        """Raise unless the subsets are disjoint, cover the points and each hold exactly ``b_c`` per color."""
        seen: set[int] = set()
        for subset in self.subsets:
            counts: dict[str, int] = {}
            for p in subset:
                if p in seen:
                    raise ContractViolation(f"point {inst.name(p)} lies in two fair subsets")
                seen.add(p)
                counts[inst.colors[p]] = counts.get(inst.colors[p], 0) + 1
            if counts != dict(self.quotas):
                raise ContractViolation(f"subset {subset} has color counts {counts}, expected {dict(self.quotas)}")
        if seen != set(inst.points):
            raise ContractViolation("fair subsets do not cover the points")


def partition_factor(quotas: Mapping[str, int]) -> int:
    """Declared partition factor: 2 when some color has quota 1, otherwise 12."""
    return 2 if any(q == 1 for q in quotas.values()) else 12


def seed_color(counts: Mapping[str, int], quotas: Mapping[str, int]) -> str:
    """A quota-1 color when one exists, else the smallest color class (ties by name)."""
    units = sorted(c for c in quotas if quotas[c] == 1)
    if units:
        return units[0]
    return min(quotas, key=lambda c: (counts[c], c))


def fair_subset_partition(inst: Instance) -> FairStructure:
    if inst.colors is None:
        raise InvalidInstanceError("fair subset partition needs colors")
    counts = inst.color_counts()
    fq = fair_structure(inst)
    by_color: dict[str, list[int]] = {}
    for p in sorted(inst.points):
        by_color.setdefault(inst.colors[p], []).append(p)

    seed = seed_color(counts, fq.quotas)
    seed_pts = by_color[seed]
    cap = fq.quotas[seed]
    groups_needed = len(seed_pts) // cap
    sub = inst.restrict(points=seed_pts, locations=seed_pts, colors=None, capacities=None, color_ell=None)
    seeded = soft_capacitated_kcenter(sub, groups_needed, cap)
    clusters = seeded.clusters()
    if len(clusters) != groups_needed or any(len(c) != cap for c in clusters):
        raise ContractViolation("soft-capacitated seeding did not produce full clusters")
    centers = list(seeded.centers)
    subsets = [list(c) for c in clusters]

    D = inst.imat
    for col in sorted(by_color):
        if col == seed:
            continue
        copies = [slot for slot in range(groups_needed) for _ in range(fq.quotas[col])]
        right = by_color[col]
        bw = BipartiteWeights.from_matrix([[D[centers[s]][p] for p in right] for s in copies])
        _, matching = bottleneck_perfect_matching(bw)
        for i, j in sorted(matching.items()):
            subsets[copies[i]].append(right[j])

    order = sorted(range(groups_needed), key=lambda i: min(subsets[i]))
    subsets_t = tuple(tuple(sorted(subsets[i])) for i in order)
    reps = tuple(centers[i] for i in order)
    radius = max((D[y][p] for y, g in zip(reps, subsets_t) for p in g), default=0)
    out = FairStructure(
        quotas=dict(fq.quotas),
        block=fq.block,
        subsets=subsets_t,
        representatives=reps,
        radius=inst.to_rational(radius),
        beta=partition_factor(fq.quotas),
    )
    out.check(inst)
    return out


def fair_center_via_fairlets(
    inst: Instance,
    k: int | None = None,
    supplier: bool = False,
    partition: FairStructure | None = None,
) -> Clustering:
    """Cluster the subset representatives and send every subset to its representative's center.

    ``k`` larger than the number of subsets is clamped; every cluster is a
    union of whole subsets, so the result is fair. The subsets are recorded in
    ``Clustering.groups``.
    """
    k = inst.k if k is None else k
    if k <= 0:
        raise InvalidInstanceError("k must be positive")
    fs = fair_subset_partition(inst) if partition is None else partition
    reps = sorted(set(fs.representatives))
    kk = min(k, len(reps))
    sub = inst.restrict(points=reps, colors=None, capacities=None, color_ell=None, k=kk)
    base = hs_ksupplier(sub, kk) if supplier else gonzalez_kcenter(sub, kk)
    clusters: list[list[int]] = [[] for _ in base.centers]
    for rep, subset in zip(fs.representatives, fs.subsets):
        clusters[base.assignment[rep]].extend(subset)
    return Clustering.build(inst, base.centers, clusters, groups=fs.subsets)
