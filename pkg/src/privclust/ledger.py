"""Declared approximation factors.

``GUARANTEES`` lists the published guarantee of every problem variant when the
best known base algorithm is plugged in. ``declared_factor`` gives the bound
that applies to the configuration actually run here (variant, underlying
solver, instance), which is what benchmarks and tests compare against.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InvalidInstanceError
from .metric import Instance
from .registry import fair_beta, get_solver

__all__ = ["Guarantee", "GUARANTEES", "BASE_FACTORS", "VARIANT_IDS", "declared_factor", "ledger_rows"]


@dataclass(frozen=True)
class Guarantee:
    variant: str
    flavor: str  # "center" or "supplier"
    case: str
    factor: int


# best known factors of the base problems, by (problem, flavor)
BASE_FACTORS: dict[tuple[str, str], int] = {
    ("vanilla", "center"): 2,
    ("vanilla", "supplier"): 3,
    ("capacities-uniform", "center"): 6,
    ("capacities-nonuniform", "center"): 9,
    ("capacities-nonuniform", "supplier"): 11,
    ("outliers", "center"): 2,
    ("outliers", "supplier"): 3,
    ("fair-subset-partition", "divisible"): 2,
    ("fair-subset-partition", "general"): 12,
}

GUARANTEES: tuple[Guarantee, ...] = (
    Guarantee("private-outliers", "center", "", 4),
    Guarantee("private-outliers", "supplier", "", 5),
    Guarantee("private-capacitated", "center", "non-uniform", 11),
    Guarantee("private-capacitated", "center", "uniform", 8),
    Guarantee("private-capacitated", "supplier", "non-uniform", 13),
    Guarantee("fair", "center", "general", 14),
    Guarantee("fair", "supplier", "general", 15),
    Guarantee("fair", "center", "some quota 1", 4),
    Guarantee("fair", "supplier", "some quota 1", 5),
    Guarantee("private-fair", "center", "general", 40),
    Guarantee("private-fair", "supplier", "general", 41),
    Guarantee("private-fair", "center", "some quota 1", 10),
    Guarantee("private-fair", "supplier", "some quota 1", 11),
    Guarantee("private-fair-capacitated", "center", "non-uniform", 225),
    Guarantee("private-fair-capacitated", "center", "uniform", 150),
    Guarantee("private-fair-capacitated", "center", "non-uniform, some quota 1", 45),
    Guarantee("private-fair-capacitated", "center", "uniform, some quota 1", 30),
    Guarantee("private-fair-capacitated", "supplier", "non-uniform", 325),
    Guarantee("private-fair-capacitated", "supplier", "uniform", 225),
    Guarantee("private-fair-capacitated", "supplier", "non-uniform, some quota 1", 65),
    Guarantee("private-fair-capacitated", "supplier", "uniform, some quota 1", 45),
    Guarantee("strongly-private", "center", "", 4),
    Guarantee("strongly-private", "supplier", "", 5),
    Guarantee("private-capacitated-fl", "any", "gamma-approximate private base", 0),  # 2 gamma + 1
)

# CLI variant id -> framework variant name (None: handled outside the flow framework)
VARIANT_IDS: dict[str, str | None] = {
    "private": "privacy",
    "private-outliers": "outliers",
    "private-capacitated": "capacities",
    "private-fair": "fair",
    "strongly-private": "strong",
    "fair": None,
    "private-fair-capacitated": None,
    "private-capacitated-fl": None,
}


def ledger_rows() -> list[str]:
    """One printable line per published guarantee."""
    rows = []
    for g in GUARANTEES:
        factor = "2*gamma+1" if g.variant == "private-capacitated-fl" else str(g.factor)
        case = f" [{g.case}]" if g.case else ""
        rows.append(f"{g.variant:26s} {g.flavor:9s}{case}: {factor}")
    return rows


def declared_factor(variant: str, underlying: str | None, inst: Instance, gamma: int = 1) -> Fraction:
    """Bound on radius (or cost) over the optimum for this variant, solver and instance.

    The privacy framework adds ``2`` to the underlying factor; with a fair
    underlying solver it loses ``3 alpha + 2``, or ``3 beta + 4`` (``+5`` for
    suppliers) when that solver is the fair-subset pipeline itself. Contraction
    to fair subsets costs ``alpha (2 beta + 1)``.
    """
    if variant not in VARIANT_IDS:
        raise InvalidInstanceError(f"unknown variant {variant!r}")
    if variant == "private-capacitated-fl":
        return Fraction(2 * gamma + 1)
    if variant == "fair":
        beta = fair_beta(inst)
        return Fraction(beta + (2 if inst.center_flavor and underlying != "fair-fairlet-supplier" else 3))
    if variant == "private-fair-capacitated":
        beta = fair_beta(inst)
        alpha = {None: 1, "exact": 1, "private-capacitated": 3}.get(underlying)
        if alpha is None:
            raise InvalidInstanceError(f"no declared factor for contracted solver {underlying!r}")
        return Fraction(alpha * (2 * beta + 1))
    if underlying is None:
        raise InvalidInstanceError("the underlying solver is needed to declare a factor")
    solver = get_solver(underlying)
    if variant == "private-fair":
        beta = fair_beta(inst)
        if underlying == "fair-fairlet-center":
            return Fraction(3 * beta + 4)
        if underlying == "fair-fairlet-supplier":
            return Fraction(3 * beta + 5)
        return 3 * solver.alpha(inst) + 2
    return solver.alpha(inst) + 2
