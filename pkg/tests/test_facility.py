import pytest
from hypothesis import given

from conftest import line, seeded
from privclust.errors import InfeasibleInstanceError, InvalidInstanceError, SizeCapError
from privclust.facility import brute_force_private_fl, desoften, fl_cost, privatize_fl, soft_pack
from privclust.generate import GeneratorConfig


def fl(xs, f, ell, cap=None):
    return line(xs, ell=ell, capacities=cap, opening_cost=f)


def test_coincident_points_open_one_facility():
    sol = brute_force_private_fl(fl([3, 3, 3, 3], 5, 1))
    assert len(sol.centers) == 1 and sol.total == 5


def test_two_far_groups_open_two_facilities():
    sol = brute_force_private_fl(fl([0, 1, 100, 101], 1, 2))
    assert len(sol.centers) == 2 and sol.total == 4


def test_lower_bound_above_point_count():
    with pytest.raises(InfeasibleInstanceError):
        brute_force_private_fl(fl([0, 1], 1, 3))


def test_oracle_size_cap():
    with pytest.raises(SizeCapError):
        brute_force_private_fl(fl(list(range(11)), 1, 1))


def test_base_within_bounds_keeps_one_facility_per_location():
    inst = fl([0, 1, 10, 11, 12], 1, 2, cap=4)
    base = brute_force_private_fl(inst)
    assert all(2 <= s <= 4 for s in base.sizes())
    out = privatize_fl(inst, base)
    assert len(out.centers) == len(base.centers)
    assert out.total <= 2 * base.connection + base.opening


@pytest.mark.parametrize("cap, ell, sizes", [(4, 2, (2, 4)), (5, 2, (3, 4)), (4, 1, (2, 3, 4))])
def test_splitting_one_overfull_location(cap, ell, sizes):
    n = sum(sizes)
    inst = fl([7] * n, 100, ell, cap=cap)
    base = brute_force_private_fl(inst)
    assert base.sizes() == (n,)
    soft = soft_pack(inst, base)
    assert soft.sizes() == sizes
    assert soft.connection == base.connection
    assert all(s >= ell for s in soft.sizes())


def test_six_points_on_a_line_within_three_times_optimum():
    inst = fl([0, 1, 2, 3, 4, 5], 1, 2, cap=4)
    out = privatize_fl(inst, brute_force_private_fl(inst))
    assert out.total <= 3 * brute_force_private_fl(inst, cap=4).total
    assert all(2 <= s <= 4 for s in out.sizes())


def test_recentering_picks_the_cheapest_member():
    inst = fl([0, 0, 0, 9, 9, 9, 9], 0, 2, cap=7)
    base = brute_force_private_fl(inst, ell=7)
    hard = desoften(inst, soft_pack(inst, base))
    assert hard.centers == (3,)


def test_capacity_below_twice_the_bound_is_refused():
    inst = fl([0, 1, 2], 1, 2, cap=3)
    with pytest.raises(InvalidInstanceError):
        privatize_fl(inst, brute_force_private_fl(inst))


def test_supplier_instances_are_refused():
    from conftest import supplier_line

    inst = supplier_line([0, 1], [0], ell=1, capacities=2, opening_cost=1)
    with pytest.raises(InvalidInstanceError):
        privatize_fl(inst, brute_force_private_fl(inst))


@given(seeded(GeneratorConfig(n_points=(2, 9), ell=(1, 2), capacity=(4, 7), opening_cost=(0, 10))))
def test_cost_within_three_times_optimum(inst):
    cap = inst.capacities
    base = brute_force_private_fl(inst)
    soft = soft_pack(inst, base)
    assert soft.connection == base.connection
    out = privatize_fl(inst, base)
    assert not out.violations(inst, cap=cap)
    assert len(out.centers) <= len(base.centers) + len(inst.points) // cap
    assert fl_cost(inst, out.centers, out.assignment) == (out.connection, out.opening)
    for hard_c, soft_c, members in zip(out.centers, soft.centers, soft.clusters()):
        assert sum(inst.d(x, hard_c) for x in members) <= 2 * sum(inst.d(x, soft_c) for x in members)
    assert out.total <= 3 * brute_force_private_fl(inst, cap=cap).total
