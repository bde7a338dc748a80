"""Variant dispatch, oracle comparison, run reports and the benchmark sweep."""

from __future__ import annotations

import time
from dataclasses import dataclass, field, fields, replace
from fractions import Fraction
from typing import Any

import numpy as np

from . import privacy
from .errors import InfeasibleInstanceError, InvalidInstanceError, SizeCapError
from .facility import FLSolution, brute_force_private_fl, privatize_fl
from .fair import fair_center_via_fairlets
from .formats import instance_digest, instance_to_doc
from .generate import GeneratorConfig, random_instance
from .ledger import VARIANT_IDS, declared_factor
from .metric import Clustering, ConstraintSet, Instance, check_feasible
from .solvers import exact_solver

__all__ = [
    "CONSTRAINTS",
    "BENCH_CONFIGS",
    "default_underlying",
    "solve_variant",
    "oracle_value",
    "verify_solution",
    "RunReport",
    "run_once",
    "BenchResult",
    "bench",
]

# constraint set each CLI variant must satisfy
CONSTRAINTS: dict[str, ConstraintSet] = {
    "private": ConstraintSet(privacy=True),
    "private-outliers": ConstraintSet(privacy=True, outliers=True),
    "private-capacitated": ConstraintSet(privacy=True, capacities=True),
    "private-fair": ConstraintSet(privacy=True, fairness=True),
    "strongly-private": ConstraintSet(strong_privacy=True),
    "fair": ConstraintSet(fairness=True),
    "private-fair-capacitated": ConstraintSet(privacy=True, fairness=True, capacities=True),
    "private-capacitated-fl": ConstraintSet(privacy=True, capacities=True),
}

_BASE = dict(n_points=(3, 8), k=(1, 3), ell=(1, 4))
BENCH_CONFIGS: dict[str, GeneratorConfig] = {
    "private": GeneratorConfig(**_BASE),
    "private-outliers": GeneratorConfig(**_BASE, outliers=(0, 2)),
    "private-capacitated": GeneratorConfig(**_BASE, capacity=(2, 6)),
    "private-fair": GeneratorConfig(**_BASE, colors=2, color_mode="unit"),
    "strongly-private": GeneratorConfig(n_points=(3, 8), k=(1, 3), colors=2, color_mode="skewed", color_ell=(0, 2)),
    "fair": GeneratorConfig(**_BASE, colors=2, color_mode="unit"),
    "private-fair-capacitated": GeneratorConfig(**_BASE, colors=2, color_mode="unit", capacity=(4, 9)),
    "private-capacitated-fl": GeneratorConfig(n_points=(2, 9), ell=(1, 2), capacity=(4, 7), opening_cost=(0, 10)),
}


def _check_variant(variant: str) -> None:
    if variant not in VARIANT_IDS:
        raise InvalidInstanceError(f"unknown variant {variant!r}; known: {', '.join(sorted(VARIANT_IDS))}")


def default_underlying(inst: Instance, variant: str) -> str:
    _check_variant(variant)
    if variant == "fair":
        return "fair-fairlet-center" if inst.center_flavor else "fair-fairlet-supplier"
    if variant in ("private-fair-capacitated", "private-capacitated-fl"):
        return "exact"
    return privacy._default_underlying(inst, VARIANT_IDS[variant])


def solve_variant(inst: Instance, variant: str, underlying: str | None = None, trace: list | None = None):
    """Solve ``inst`` for a CLI variant; returns a Clustering, or an FLSolution for facility location."""
    _check_variant(variant)
    underlying = underlying or default_underlying(inst, variant)
    if variant == "fair":
        if underlying not in ("fair-fairlet-center", "fair-fairlet-supplier"):
            raise InvalidInstanceError(f"fair clustering runs the fair-subset pipeline, not {underlying!r}")
        if inst.colors is None:
            raise InvalidInstanceError("fair variant needs colors")
        supplier = underlying == "fair-fairlet-supplier"
        if not supplier and not inst.center_flavor:
            raise InvalidInstanceError("the center pipeline needs every point to be a location")
        return fair_center_via_fairlets(inst, supplier=supplier)
    if variant == "private-fair-capacitated":
        return privacy.solve_private_fair_capacitated(inst, pc_solver=underlying)
    if variant == "private-capacitated-fl":
        if underlying != "exact":
            raise InvalidInstanceError("facility location only ships the exact private base solver")
        return privatize_fl(inst, brute_force_private_fl(inst))
    return privacy._solve(inst, VARIANT_IDS[variant], underlying, trace)


def oracle_value(inst: Instance, variant: str) -> Fraction | None:
    """Exact optimum (radius, or cost for facility location); ``None`` when infeasible."""
    _check_variant(variant)
    if variant == "private-capacitated-fl":
        try:
            return brute_force_private_fl(inst, cap=inst.capacity(inst.locations[0])).total
        except InfeasibleInstanceError:
            return None
    opt = exact_solver(inst, CONSTRAINTS[variant])
    return None if opt is None else opt.radius


def solution_value(sol) -> Fraction:
    return sol.total if isinstance(sol, FLSolution) else sol.radius


def verify_solution(inst: Instance, variant: str, sol) -> list[str]:
    """Violations of ``sol`` under the variant's constraints, recomputed from scratch."""
    _check_variant(variant)
    if isinstance(sol, FLSolution):
        return sol.violations(inst, cap=inst.capacity(inst.locations[0]))
    return [str(v) for v in check_feasible(inst, CONSTRAINTS[variant], sol).violations]


@dataclass
class RunReport:
    digest: str
    variant: str
    underlying: str
    value: Fraction | None
    oracle: Fraction | None = None
    ratio: Fraction | None = None
    factor: Fraction | None = None
    feasible: bool | None = None
    violations: list[str] = field(default_factory=list)
    trace: list[dict] = field(default_factory=list)
    seed: int | None = None
    wall_time: float | None = None
    status: str = "ok"

    def to_doc(self, timing: bool = False) -> dict:
        def q(x):
            return None if x is None else str(x)

        doc = {
            "digest": self.digest,
            "variant": self.variant,
            "underlying": self.underlying,
            "status": self.status,
            "value": q(self.value),
            "oracle": q(self.oracle),
            "ratio": q(self.ratio),
            "declared_factor": q(self.factor),
            "feasible": self.feasible,
            "violations": list(self.violations),
            "trace": list(self.trace),
            "seed": self.seed,
        }
        if timing:
            doc["wall_time"] = self.wall_time
        return doc


def _ratio(value: Fraction, opt: Fraction) -> Fraction | None:
    if opt == 0:
        return Fraction(0) if value == 0 else None
    return value / opt


def run_once(
    inst: Instance,
    variant: str,
    underlying: str | None = None,
    *,
    with_oracle: bool = False,
    seed: int | None = None,
) -> tuple[Any, RunReport]:
    """Solve, verify, and optionally compare with the oracle. Infeasible instances give ``(None, report)``."""
    underlying = underlying or default_underlying(inst, variant)
    trace: list[dict] = []
    start = time.perf_counter()
    report = RunReport(digest=instance_digest(inst), variant=variant, underlying=underlying, value=None, seed=seed)
    try:
        sol = solve_variant(inst, variant, underlying, trace)
    except InfeasibleInstanceError as exc:
        report.status = "infeasible"
        report.violations = [str(exc)]
        sol = None
    report.wall_time = time.perf_counter() - start
    report.trace = trace
    if sol is not None:
        report.value = solution_value(sol)
        report.violations = verify_solution(inst, variant, sol)
        report.feasible = not report.violations
        report.factor = declared_factor(variant, underlying, inst)
    if with_oracle:
        report.oracle = oracle_value(inst, variant)
        if sol is not None and report.oracle is not None:
            report.ratio = _ratio(report.value, report.oracle)
    return sol, report


# ---------------------------------------------------------------------------
# benchmark sweep


@dataclass
class BenchResult:
    variant: str
    underlying: str | None
    trials: int
    solved: int = 0
    infeasible: int = 0
    worst_ratio: Fraction | None = None
    max_iterations: int = 0
    iteration_bound: int = 0
    breaches: list[dict] = field(default_factory=list)

    def to_doc(self) -> dict:
        return {
            "variant": self.variant,
            "underlying": self.underlying,
            "trials": self.trials,
            "solved": self.solved,
            "infeasible": self.infeasible,
            "worst_ratio": None if self.worst_ratio is None else str(self.worst_ratio),
            "max_iterations": self.max_iterations,
            "iteration_bound": self.iteration_bound,
            "breaches": [{"trial": b["trial"], "reason": b["reason"]} for b in self.breaches],
        }


def _iteration_bound(inst: Instance, variant: str) -> int:
    if variant == "private-outliers":
        return (inst.k + 1) * (inst.outliers + 1) - 1
    return inst.k


def bench(
    variant: str,
    underlying: str | None = None,
    trials: int = 100,
    seed: int = 0,
    config: GeneratorConfig | None = None,
    max_n: int | None = None,
    oracle: bool = True,
) -> BenchResult:
    """Random trials of one variant; every breach keeps its instance for replay.

    Trial ``i`` draws from its own generator seeded by ``(seed, i)``, so any
    single trial can be reproduced in isolation.
    """
    _check_variant(variant)
    cfg = config or BENCH_CONFIGS[variant]
    if max_n is not None:
        lo, hi = cfg.n_points
        cfg = replace(cfg, n_points=(min(lo, max_n), max_n))
    out = BenchResult(variant=variant, underlying=underlying, trials=trials)
    for i in range(trials):
        rng = np.random.default_rng([seed, i])
        inst = random_instance(rng, cfg)
        try:
            sol, rep = run_once(inst, variant, underlying, with_oracle=oracle, seed=seed)
        except SizeCapError as exc:
            out.breaches.append({"trial": i, "reason": f"size cap: {exc}", "instance": instance_to_doc(inst)})
            continue
        iters = [r.get("iteration", 0) for r in rep.trace]
        out.max_iterations = max([out.max_iterations, *iters])
        out.iteration_bound = max(out.iteration_bound, _iteration_bound(inst, variant))
        reason = None
        if sol is None:
            out.infeasible += 1
            if oracle and rep.oracle is not None:
                reason = f"solver reported infeasible but the optimum is {rep.oracle}"
        else:
            out.solved += 1
            if not rep.feasible:
                reason = f"infeasible output: {rep.violations}"
            elif oracle:
                if rep.oracle is None:
                    reason = "oracle finds no solution but the solver returned one"
                elif rep.ratio is None or rep.ratio > rep.factor:
                    reason = f"ratio {rep.ratio} exceeds the declared factor {rep.factor}"
                elif out.worst_ratio is None or rep.ratio > out.worst_ratio:
                    out.worst_ratio = rep.ratio
        if reason:
            out.breaches.append({"trial": i, "reason": reason, "instance": instance_to_doc(inst)})
    return out


def config_from_doc(doc: dict) -> GeneratorConfig:
    """Generator configuration from a JSON object; pairs may be given as lists."""
    names = {f.name for f in fields(GeneratorConfig)}
    unknown = sorted(set(doc) - names)
    if unknown:
        raise InvalidInstanceError(f"unknown generator fields: {', '.join(unknown)}")
    clean = {k: tuple(v) if isinstance(v, list) else v for k, v in doc.items()}
    return GeneratorConfig(**clean)
