"""Underlying solvers by identifier, as consumed by the privacy framework and the CLI."""

from __future__ import annotations

from fractions import Fraction

from .errors import InvalidInstanceError
from .fair import fair_center_via_fairlets, partition_factor
from .metric import ConstraintSet, Instance, fair_structure
from .solvers import ConstrainedSolver, exact_solver, gonzalez_kcenter, hs_ksupplier, outliers_kcenter

__all__ = ["SOLVERS", "get_solver", "fair_beta"]


def fair_beta(inst: Instance) -> int:
    return partition_factor(fair_structure(inst).quotas)


def _vanilla(fn):
    def run(inst: Instance, cs: ConstraintSet):
        return fn(inst, inst.k)

    return run


SOLVERS: dict[str, ConstrainedSolver] = {
    s.name: s
    for s in (
        ConstrainedSolver(
            "exact",
            Fraction(1),
            frozenset({"outliers", "capacities", "fairness"}),
            lambda inst, cs: exact_solver(inst, cs),
        ),
        ConstrainedSolver("gonzalez", Fraction(2), frozenset(), _vanilla(gonzalez_kcenter), center_only=True),
        ConstrainedSolver("hs", Fraction(3), frozenset(), _vanilla(hs_ksupplier)),
        ConstrainedSolver(
            "outliers-greedy",
            Fraction(3),
            frozenset({"outliers"}),
            lambda inst, cs: outliers_kcenter(inst, inst.k, inst.outliers if cs.outliers else 0),
            center_only=True,
        ),
        ConstrainedSolver(
            "fair-fairlet-center",
            lambda inst: Fraction(fair_beta(inst) + 2),
            frozenset({"fairness"}),
            lambda inst, cs: fair_center_via_fairlets(inst, inst.k, supplier=False),
            center_only=True,
        ),
        ConstrainedSolver(
            "fair-fairlet-supplier",
            lambda inst: Fraction(fair_beta(inst) + 3),
            frozenset({"fairness"}),
            lambda inst, cs: fair_center_via_fairlets(inst, inst.k, supplier=True),
        ),
    )
}


def get_solver(name: str) -> ConstrainedSolver:
    try:
        return SOLVERS[name]
    except KeyError:
        raise InvalidInstanceError(f"unknown underlying solver {name!r}; known: {', '.join(sorted(SOLVERS))}") from None
