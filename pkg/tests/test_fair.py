from dataclasses import replace

import pytest
from hypothesis import given

from conftest import line, seeded
from privclust.errors import InvalidInstanceError
from privclust.fair import fair_center_via_fairlets, fair_subset_partition, partition_factor, seed_color
from privclust.generate import GeneratorConfig
from privclust.metric import ConstraintSet, check_feasible, eval_radius
from privclust.oracles import fair_partition_oracle
from privclust.solvers import exact_solver

FAIR = ConstraintSet(fairness=True)


def test_partition_i2(i2):
    fs = fair_subset_partition(i2)
    assert fs.subsets == ((0, 1), (2, 3))
    assert fs.radius == 1
    assert fs.beta == 2


def test_partition_coincident_points():
    inst = line([4, 4, 4, 4], colors={0: "red", 1: "red", 2: "blue", 3: "blue"})
    assert fair_subset_partition(inst).radius == 0


def test_partition_within_twice_the_oracle():
    inst = line([0, 1, 2, 3], colors={0: "red", 1: "blue", 2: "blue", 3: "red"})
    assert fair_partition_oracle(inst) == 1
    assert fair_subset_partition(inst).radius <= 2 * fair_partition_oracle(inst)


def test_partition_needs_colors(i1):
    with pytest.raises(InvalidInstanceError):
        fair_subset_partition(i1)


def test_seed_color_choice():
    assert seed_color({"a": 4, "b": 2}, {"a": 2, "b": 1}) == "b"
    assert seed_color({"a": 6, "b": 4}, {"a": 3, "b": 2}) == "b"
    assert partition_factor({"a": 3, "b": 2}) == 12
    assert partition_factor({"a": 3, "b": 1}) == 2


def test_fair_center_i2(i2):
    sol = fair_center_via_fairlets(i2, 2)
    assert sol.radius == 1
    assert check_feasible(i2, FAIR, sol).feasible


def test_fair_center_one_cluster_per_fairlet():
    inst = line([0, 1, 20, 21, 40, 41], k=3, colors={0: "r", 1: "b", 2: "r", 3: "b", 4: "r", 5: "b"})
    sol = fair_center_via_fairlets(inst)
    assert sorted(sol.clusters()) == [(0, 1), (2, 3), (4, 5)]


def test_fair_center_single_cluster(i2):
    sol = fair_center_via_fairlets(i2, 1)
    assert len(sol.centers) == 1
    assert sol.radius == eval_radius(i2, sol)
    assert sol.radius <= 4 * exact_solver(i2.restrict(k=1), FAIR).radius


# -- properties -------------------------------------------------------------

COLORED = [
    GeneratorConfig(n_points=(2, 9), colors=2, color_mode="unit"),
    GeneratorConfig(n_points=(4, 9), colors=2, color_mode="balanced"),
    GeneratorConfig(n_points=(5, 9), colors=2, color_mode="skewed"),
    GeneratorConfig(n_points=(6, 9), colors=3, color_mode="skewed"),
]


@pytest.mark.parametrize("cfg", COLORED, ids=lambda c: f"{c.colors}-{c.color_mode}")
def test_partition_factor_per_color_mode(cfg):
    @given(seeded(cfg))
    def check(inst):
        fs = fair_subset_partition(inst)
        fs.check(inst)
        for subset in fs.subsets:
            counts = {c: sum(inst.colors[p] == c for p in subset) for c in fs.quotas}
            assert counts == dict(fs.quotas)
        assert fs.radius <= fs.beta * fair_partition_oracle(inst)

    check()


@pytest.mark.parametrize("cfg", COLORED[:3], ids=lambda c: f"{c.colors}-{c.color_mode}")
def test_fair_center_factor(cfg):
    # the exact solver opens centers among at most eight locations
    @given(seeded(replace(cfg, n_points=(cfg.n_points[0], 8))))
    def check(inst):
        sol = fair_center_via_fairlets(inst)
        assert check_feasible(inst, FAIR, sol).feasible
        beta = fair_subset_partition(inst).beta
        assert sol.radius <= (beta + 2) * exact_solver(inst, FAIR).radius

    check()


@given(seeded(GeneratorConfig(n_points=(2, 7), n_locations=(1, 3), supplier=True, colors=2, color_mode="unit")))
def test_fair_supplier_factor(inst):
    sol = fair_center_via_fairlets(inst, supplier=True)
    assert check_feasible(inst, FAIR, sol).feasible
    assert sol.radius <= (fair_subset_partition(inst).beta + 3) * exact_solver(inst, FAIR).radius
