"""Acceptance suite: one check per acceptance criterion, each reporting PASS or FAIL.

Run with ``pytest tests/test_acceptance.py -v`` (the per-criterion lines are
repeated in the terminal summary) or directly as ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import json
import sys
import time
from dataclasses import replace
from fractions import Fraction
from itertools import product
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from privclust import cli
from privclust.errors import InfeasibleInstanceError
from privclust.fair import fair_subset_partition
from privclust.flow import FlowNetwork, max_flow
from privclust.formats import dump_instance
from privclust.generate import GeneratorConfig, random_instance
from privclust.matching import BipartiteWeights, bottleneck_perfect_matching, perfect_matching_exists
from privclust.metric import Clustering, ConstraintSet, check_feasible
from privclust.oracles import enumerate_assignments, fair_partition_oracle, min_cut_bruteforce
from privclust.privacy import analyze_cut, build_threshold_graph, reassign_from_flow
from privclust.runner import CONSTRAINTS, oracle_value, run_once, solution_value, verify_solution
from privclust.solvers import exact_solver

RESULTS: dict[str, tuple[bool, str]] = {}


def record(name: str, ok: bool, detail: str) -> None:
    RESULTS[name] = (ok, detail)
    print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")


def draw(cfg: GeneratorConfig, tag: int, i: int):
    return random_instance(np.random.default_rng([tag, i]), cfg)


# ---------------------------------------------------------------------------
# 1. feasibility on random feasible instances

FEASIBILITY = {
    "private": GeneratorConfig(n_points=(3, 12), k=(1, 3), ell=(1, 4)),
    "private-outliers": GeneratorConfig(n_points=(3, 12), k=(1, 3), ell=(1, 4), outliers=(0, 2)),
    "private-capacitated": GeneratorConfig(n_points=(3, 12), n_locations=(2, 8), supplier=True, k=(1, 3),
                                           ell=(1, 4), capacity=(2, 8), uniform_capacity=False),
    "private-fair": GeneratorConfig(n_points=(3, 12), k=(1, 3), ell=(1, 4), colors=3, color_mode="skewed"),
    "strongly-private": GeneratorConfig(n_points=(3, 12), k=(1, 3), colors=3, color_mode="skewed", color_ell=(0, 2)),
    "fair": GeneratorConfig(n_points=(3, 12), k=(1, 3), colors=2, color_mode="unit"),
    "private-fair-capacitated": GeneratorConfig(n_points=(3, 12), n_locations=(2, 8), supplier=True, k=(1, 3),
                                                ell=(1, 4), colors=2, color_mode="unit", capacity=(4, 12)),
    "private-capacitated-fl": GeneratorConfig(n_points=(2, 9), ell=(1, 2), capacity=(4, 8), opening_cost=(0, 10)),
}
NEEDED = 200


def feasibility_sweep() -> tuple[bool, str]:
    start = time.perf_counter()
    worst = []
    ok = True
    for variant, cfg in FEASIBILITY.items():
        solved = bad = tried = 0
        while solved < NEEDED and tried < 5 * NEEDED:
            inst = draw(cfg, 101, tried)
            tried += 1
            sol, rep = run_once(inst, variant)
            if sol is None:
                continue
            solved += 1
            if verify_solution(inst, variant, sol):
                bad += 1
        ok &= solved >= NEEDED and bad == 0
        worst.append(f"{variant} {solved}/{tried} feasible, {bad} violating")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 60
    return ok, f"{'; '.join(worst)}; {elapsed:.1f}s (limit 60s)"


def test_criterion_1_feasibility():
    ok, detail = feasibility_sweep()
    record("criterion 1 feasibility", ok, detail)
    assert ok, detail


# ---------------------------------------------------------------------------
# 2. factors against exact optima

TRIALS = 150
BASE = dict(n_points=(2, 8), k=(1, 3), ell=(1, 4))
# (label, variant, underlying, generator, instance filter, bound on radius / optimum)
FACTOR_CASES = [
    ("private-outliers, exact", "private-outliers", "exact", GeneratorConfig(**BASE, outliers=(0, 2)), None, lambda i: 3),
    ("private-outliers, greedy", "private-outliers", "outliers-greedy", GeneratorConfig(**BASE, outliers=(0, 2)), None, lambda i: 5),
    ("private-capacitated, exact", "private-capacitated", "exact",
     GeneratorConfig(**BASE, capacity=(2, 6), uniform_capacity=False), None, lambda i: 3),
    ("private-fair, quota 1", "private-fair", "fair-fairlet-center",
     GeneratorConfig(**BASE, colors=2, color_mode="unit"), "unit", lambda i: 10),
    ("private-fair, general", "private-fair", "fair-fairlet-center",
     GeneratorConfig(**BASE, colors=3, color_mode="skewed"), "general", lambda i: 40),
    ("fair, quota 1", "fair", "fair-fairlet-center", GeneratorConfig(**BASE, colors=2, color_mode="unit"), "unit", lambda i: 4),
    ("fair, general", "fair", "fair-fairlet-center", GeneratorConfig(**BASE, colors=3, color_mode="skewed"), "general", lambda i: 14),
    ("private-fair-capacitated, exact", "private-fair-capacitated", "exact",
     GeneratorConfig(**BASE, colors=2, color_mode="skewed", capacity=(3, 8)), None,
     lambda i: 2 * fair_subset_partition(i).beta + 1),
    ("strongly-private, gonzalez", "strongly-private", "gonzalez",
     GeneratorConfig(n_points=(2, 8), k=(1, 3), colors=2, color_mode="skewed", color_ell=(0, 2)), None, lambda i: 4),
    ("facility location, exact base", "private-capacitated-fl", "exact",
     GeneratorConfig(n_points=(2, 9), ell=(1, 2), capacity=(4, 7), opening_cost=(0, 10)), None, lambda i: 3),
]


def _quota_kind(inst) -> str:
    return "unit" if fair_subset_partition(inst).beta == 2 else "general"


def factor_case(label, variant, underlying, cfg, kind, bound) -> tuple[bool, str]:
    checked = breaches = mismatched = tried = 0
    worst = Fraction(0)
    while checked < TRIALS and tried < 20 * TRIALS:
        inst = draw(cfg, 202, tried)
        tried += 1
        if kind is not None and _quota_kind(inst) != kind:
            continue
        try:
            sol, _ = run_once(inst, variant, underlying)
        except InfeasibleInstanceError:
            sol = None
        opt = oracle_value(inst, variant)
        if sol is None or opt is None:
            mismatched += (sol is None) != (opt is None)
            continue
        checked += 1
        value = solution_value(sol)
        limit = bound(inst) * opt
        if value > limit or verify_solution(inst, variant, sol):
            breaches += 1
        if opt:
            worst = max(worst, value / opt)
    ok = checked >= TRIALS and breaches == 0 and mismatched == 0
    return ok, f"{label}: {checked} instances, worst ratio {float(worst):.3f}, {breaches} breaches, {mismatched} verdict mismatches"


def partition_case(kind: str, limit: int) -> tuple[bool, str]:
    cfgs = {
        "unit": GeneratorConfig(n_points=(2, 9), colors=2, color_mode="unit"),
        "general": GeneratorConfig(n_points=(5, 9), colors=3, color_mode="skewed"),
    }
    checked = breaches = tried = 0
    worst = Fraction(0)
    while checked < TRIALS and tried < 20 * TRIALS:
        inst = draw(cfgs[kind], 203, tried)
        tried += 1
        fs = fair_subset_partition(inst)
        if (fs.beta == 2) != (kind == "unit"):
            continue
        checked += 1
        opt = fair_partition_oracle(inst)
        breaches += fs.radius > limit * opt
        if opt:
            worst = max(worst, fs.radius / opt)
    ok = checked >= TRIALS and breaches == 0
    return ok, f"fair subset partition, {kind}: {checked} instances, worst ratio {float(worst):.3f}, {breaches} breaches"


@pytest.mark.parametrize("case", FACTOR_CASES, ids=[c[0] for c in FACTOR_CASES])
def test_criterion_2_factor(case):
    ok, detail = factor_case(*case)
    record(f"criterion 2 factor [{case[0]}]", ok, detail)
    assert ok, detail


@pytest.mark.parametrize("kind, limit", [("unit", 2), ("general", 12)])
def test_criterion_2_partition(kind, limit):
    ok, detail = partition_case(kind, limit)
    record(f"criterion 2 factor [partition, {kind}]", ok, detail)
    assert ok, detail


# ---------------------------------------------------------------------------
# 3. structural invariants

STRUCTURAL_VARIANTS = ["private", "private-outliers", "private-capacitated", "private-fair", "strongly-private"]


def _iteration_sweep(bound_of) -> tuple[int, int, int]:
    runs = over = top = 0
    for variant in STRUCTURAL_VARIANTS:
        cfg = FACTOR_CASES[[c[1] for c in FACTOR_CASES].index(variant)][3] if variant != "private" else GeneratorConfig(**BASE)
        for i in range(120):
            inst = draw(cfg, 303, i)
            sol, rep = run_once(inst, variant)
            if sol is None:
                continue
            runs += 1
            its = max((r["iteration"] for r in rep.trace), default=0)
            top = max(top, its)
            over += its > bound_of(inst, variant)
    return runs, over, top


def _literal_bound(inst, variant):
    return inst.k * inst.outliers if variant == "private-outliers" else inst.k


def _lexicographic_bound(inst, variant):
    # every recompute lowers (clusters, outliers) lexicographically
    return (inst.k + 1) * (inst.outliers + 1) - 1 if variant == "private-outliers" else inst.k


def _radius_and_cut_checks() -> tuple[int, int, int]:
    """Random clusterings at random thresholds: moves stay within r + 2 tau, cuts satisfy the counting bound."""
    moves = cuts = bad = 0
    rng = np.random.default_rng(304)
    for i in range(300):
        fair = i % 3 == 0
        cfg = GeneratorConfig(n_points=(4, 10), k=(2, 4), ell=(1, 4), colors=2 if fair else 0, color_mode="unit")
        inst = draw(cfg, 305, i)
        pts = list(inst.points)
        m = int(rng.integers(1, min(inst.k, len(pts)) + 1))
        centers = [int(c) for c in rng.choice(pts, size=m, replace=False)]
        if fair:
            fs = fair_subset_partition(inst)
            members = [[] for _ in centers]
            for subset in fs.subsets:
                members[int(rng.integers(0, m))].extend(subset)
            variant, grow = "fair", 3
        else:
            members = [[] for _ in centers]
            for p in pts:
                members[int(rng.integers(0, m))].append(p)
            variant, grow = "privacy", 1
        sol = Clustering.build(inst, centers, members)
        tau = Fraction(int(rng.choice([int(x * inst.scale) for x in set(inst.dist[0])])), inst.scale)
        tg = build_threshold_graph(inst, sol, tau, variant)
        fr = max_flow(tg.network)
        if fr.saturates_sink:
            out = reassign_from_flow(inst, sol, tg, fr)
            moves += 1
            bad += out.radius > grow * sol.radius + 2 * tau
            bad += not check_feasible(inst, ConstraintSet(privacy=True, fairness=fair), out).feasible
        else:
            cut = analyze_cut(tg, fr)
            cuts += 1
            bound = tg.bound
            bad += len(cut.points) + len(cut.adjacent) >= cut.k2 * bound
    return moves, cuts, bad


def test_criterion_3_structure():
    runs, over, top = _iteration_sweep(_lexicographic_bound)
    moves, cuts, bad = _radius_and_cut_checks()
    fair_bad = 0
    for i in range(150):
        inst = draw(GeneratorConfig(n_points=(3, 12), colors=3, color_mode="skewed"), 306, i)
        fs = fair_subset_partition(inst)
        for subset in fs.subsets:
            counts = {c: sum(inst.colors[p] == c for p in subset) for c in fs.quotas}
            fair_bad += counts != dict(fs.quotas)
    ok = over == 0 and bad == 0 and fair_bad == 0 and runs > 0 and moves > 0 and cuts > 0
    detail = (f"{runs} framework runs with internal radius/cut/progress/per-color assertions, "
              f"max {top} recompute rounds, {over} over (k+1)(o+1)-1 or k; "
              f"{moves} reassignments and {cuts} cuts rechecked externally, {bad} failures; "
              f"fair subsets with wrong color counts: {fair_bad}")
    record("criterion 3 structural invariants", ok, detail)
    assert ok, detail


@pytest.mark.xfail(strict=True, reason="the k*o iteration bound does not hold; see the decisions ledger")
def test_criterion_3_literal_outlier_iteration_bound():
    runs, over, top = _iteration_sweep(_literal_bound)
    ok = over == 0
    record("criterion 3 iteration bound k*o (literal)", ok,
           f"{over} of {runs} runs exceed k*o (e.g. o = 0 still allows a recompute); max {top} rounds")
    assert ok


# ---------------------------------------------------------------------------
# 4. kernel oracles


def _random_network(rng):
    n_inner = int(rng.integers(0, 9))
    names = ["s"] + [f"n{i}" for i in range(n_inner)] + ["t"]
    arcs = [(u, v, int(rng.integers(0, 5))) for u, v in product(names[:-1], names[1:]) if u != v and rng.random() < 0.4]
    return FlowNetwork.build(arcs, nodes=names)


def kernel_checks() -> tuple[bool, str]:
    rng = np.random.default_rng(404)
    flow_bad = sum(max_flow(net).value != min_cut_bruteforce(net) for net in (_random_network(rng) for _ in range(500)))
    match_bad = 0
    for _ in range(200):
        n = int(rng.integers(1, 7))
        rows = rng.integers(0, 15, size=(n, n)).tolist()
        bw = BipartiteWeights.from_matrix(rows)
        w, matching = bottleneck_perfect_matching(bw)
        smaller = [x for x in {x for r in rows for x in r} if x < w]
        match_bad += any(rows[i][j] > w for i, j in matching.items())
        match_bad += bool(smaller) and perfect_matching_exists(bw, max(smaller)).exists
    exact_bad = 0
    cfg = GeneratorConfig(n_points=(2, 6), n_locations=(1, 3), k=(1, 3), ell=(0, 3), outliers=(0, 2),
                          capacity=(1, 4), uniform_capacity=False, colors=2, color_mode="balanced", color_ell=(0, 2))
    shapes = [ConstraintSet(), ConstraintSet(privacy=True), ConstraintSet(privacy=True, outliers=True),
              ConstraintSet(privacy=True, capacities=True), ConstraintSet(privacy=True, fairness=True),
              ConstraintSet(strong_privacy=True)]
    for i in range(120):
        inst = draw(replace(cfg, supplier=i % 2 == 1), 405, i)
        cs = shapes[i % len(shapes)]
        got = exact_solver(inst, cs)
        want = enumerate_assignments(inst, cs)
        exact_bad += (None if got is None else got.radius) != want
    ok = flow_bad == match_bad == exact_bad == 0
    return ok, (f"max-flow vs brute-force min cut: 500 networks, {flow_bad} mismatches; "
                f"bottleneck minimality: 200 tables, {match_bad} failures; "
                f"exact solver vs assignment enumeration: 120 instances, {exact_bad} mismatches")


def test_criterion_4_kernels():
    ok, detail = kernel_checks()
    record("criterion 4 kernel oracles", ok, detail)
    assert ok, detail


# ---------------------------------------------------------------------------
# 5. determinism


def determinism_check(tmp: Path) -> tuple[bool, str]:
    same = differ = 0
    for variant, cfg in FEASIBILITY.items():
        for i in range(4):
            inst = draw(cfg, 505, i)
            inp = tmp / f"{variant}-{i}.json"
            inp.write_text(dump_instance(inst))
            outs = []
            for run in range(2):
                sol, rep = tmp / f"s{run}.json", tmp / f"r{run}.json"
                code = cli.main(["solve", "--variant", variant, "--input", str(inp), "--output", str(sol),
                                 "--report", str(rep), "--seed", "7", "--oracle"])
                outs.append((code, *(f.read_bytes() if f.exists() else None for f in (sol, rep))))
                sol.unlink(missing_ok=True)
                rep.unlink(missing_ok=True)
            if outs[0] == outs[1]:
                same += 1
            else:
                differ += 1
    benches = []
    for run in range(2):
        out = tmp / f"bench{run}.json"
        cli.main(["bench", "--variant", "private-outliers", "--trials", "20", "--seed", "9", "--output", str(out)])
        benches.append(out.read_bytes())
    bench_same = benches[0] == benches[1]
    ok = differ == 0 and bench_same
    return ok, f"{same} solve runs repeated with identical solution and report bytes, {differ} differing; bench report identical: {bench_same}"


def test_criterion_5_determinism(tmp_path):
    ok, detail = determinism_check(tmp_path)
    record("criterion 5 determinism", ok, detail)
    assert ok, detail


if __name__ == "__main__":
    import tempfile

    feasibility = feasibility_sweep()
    record("criterion 1 feasibility", *feasibility)
    for case in FACTOR_CASES:
        record(f"criterion 2 factor [{case[0]}]", *factor_case(*case))
    for kind, limit in (("unit", 2), ("general", 12)):
        record(f"criterion 2 factor [partition, {kind}]", *partition_case(kind, limit))
    runs, over, top = _iteration_sweep(_lexicographic_bound)
    record("criterion 3 iteration bound (k+1)(o+1)-1", over == 0, f"{over} of {runs} runs over, max {top}")
    runs, over, top = _iteration_sweep(_literal_bound)
    record("criterion 3 iteration bound k*o (literal)", over == 0, f"{over} of {runs} runs over, max {top}")
    moves, cuts, bad = _radius_and_cut_checks()
    record("criterion 3 radius and cut checks", bad == 0, f"{moves} reassignments, {cuts} cuts, {bad} failures")
    record("criterion 4 kernel oracles", *kernel_checks())
    with tempfile.TemporaryDirectory() as tmp:
        record("criterion 5 determinism", *determinism_check(Path(tmp)))
    sys.exit(0 if all(ok for ok, _ in RESULTS.values()) else 1)
