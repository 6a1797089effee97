import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from decsched.allocation import gap_profile, min_delay
from decsched.model import CommPlan, Instance, InstanceError, generate_instance
from decsched.ordering import (
    Direction,
    GuardExceeded,
    best_values_all_subsets,
    counterexample,
    counterexample_policy,
    objective_v,
    order_by_rate,
    order_descending_delay,
    order_exact,
    order_exhaustive,
    order_greedy_prefix,
    resolve_guard,
    verify_ratio,
)
from oracles import brute_best_v, geometric_v
from strategies import instances

BWD, FWD = Direction.BACKWARD, Direction.FORWARD


def unit_rates(bwd, fwd=None):
    n = len(bwd)
    return Instance.from_arrays(0, [1.0] * n, fwd or [1.0] * n, bwd)


LDF100 = Instance.from_arrays(0, [100.0, 1.0, 1.0], [1.0] * 3, [3.0, 2.0, 1.0])


def test_objective_descending_and_ascending():
    inst = unit_rates([3.0, 2.0, 1.0])
    assert objective_v(inst, range(3), (0, 1, 2), BWD).v == 8
    assert objective_v(inst, range(3), (2, 1, 0), BWD).v == 4
    assert brute_best_v(inst, range(3), "BACKWARD") == 8


def test_objective_terms():
    res = objective_v(LDF100, range(3), (1, 2, 0), BWD)
    assert res.terms == (202.0, 100.0, 0.0)


def test_objective_single_node():
    inst = Instance.from_arrays(1, [2.0], [3.0], [4.0])
    for direction in Direction:
        assert objective_v(inst, [0], [0], direction).v == 0


def test_objective_rejects_bad_order():
    with pytest.raises(InstanceError):
        objective_v(LDF100, range(3), (0, 0, 1), BWD)


@given(instances(max_n=6), st.data())
def test_objective_matches_geometry(inst, data):
    order = data.draw(st.permutations(range(inst.n)))
    for direction in Direction:
        assert objective_v(inst, range(inst.n), order, direction).v == \
            pytest.approx(geometric_v(inst, order, direction.value), rel=1e-12, abs=1e-12)


@given(instances(max_n=5), st.data())
def test_gaps_capacity_is_sum_of_directional_values(inst, data):
    ids = range(inst.n)
    f = data.draw(st.permutations(ids))
    b = data.draw(st.permutations(ids))
    cap0 = gap_profile(inst, CommPlan(tuple(ids), f, b)).cap0
    assert cap0 == pytest.approx(objective_v(inst, ids, f, FWD).v + objective_v(inst, ids, b, BWD).v,
                                 rel=1e-12, abs=1e-12)


def test_descending_delay_order():
    assert order_descending_delay(unit_rates([1.0, 3.0, 2.0]), range(3), BWD) == (1, 2, 0)
    assert order_descending_delay(unit_rates([1.0] * 4), range(4), BWD) == (0, 1, 2, 3)
    assert order_descending_delay(unit_rates([1.0] * 3, fwd=[3.0, 1.0, 2.0]), range(3), FWD) == (1, 2, 0)


def test_forward_mirror_is_optimal_on_example():
    inst = unit_rates([1.0] * 3, fwd=[3.0, 1.0, 2.0])
    order = order_descending_delay(inst, range(3), FWD)
    assert objective_v(inst, range(3), order, FWD).v == brute_best_v(inst, range(3), "FORWARD")


def test_rate_order():
    inst = Instance.from_arrays(0, [2.0, 1.0, 3.0], [1.0] * 3, [1.0] * 3)
    assert order_by_rate(inst, range(3), BWD) == (1, 0, 2)
    assert order_by_rate(inst, range(3), FWD) == (2, 0, 1)
    assert order_by_rate(unit_rates([1.0] * 3), range(3), BWD) == (0, 1, 2)
    for direction in Direction:
        v = objective_v(inst, range(3), order_by_rate(inst, range(3), direction), direction).v
        assert v == brute_best_v(inst, range(3), direction.value)


def test_greedy_prefix_k1_example():
    g = order_greedy_prefix(LDF100, range(3), BWD, 1)
    # candidates: node 0 -> 3*2, node 1 -> 2*101, node 2 -> 1*101
    assert g.order == (1, 0, 2)
    assert g.prefix_v == 202
    assert g.v == 205
    assert g.prefix_v >= 302 / 3


def test_greedy_full_k_is_exhaustive():
    g = order_greedy_prefix(LDF100, range(3), BWD, 3)
    assert (g.order, g.v) == order_exhaustive(LDF100, range(3), BWD)


def test_greedy_uniform_ties_resolve_to_smallest_ids():
    inst = unit_rates([1.0] * 4)
    assert order_greedy_prefix(inst, range(4), BWD, 1).order == (0, 1, 2, 3)
    assert order_greedy_prefix(inst, range(4), BWD, 4).order == (0, 1, 2, 3)
    # forward is the time mirror: the chosen tuple closes the sequence
    assert order_greedy_prefix(inst, range(4), FWD, 1).order == (1, 2, 3, 0)
    assert order_greedy_prefix(inst, range(4), FWD, 4).order == (3, 2, 1, 0)


def test_greedy_rejects_bad_k():
    with pytest.raises(ValueError):
        order_greedy_prefix(LDF100, range(3), BWD, 0)
    with pytest.raises(ValueError):
        order_greedy_prefix(LDF100, range(3), BWD, 4)


def test_greedy_heuristic_suffix():
    inst = Instance.from_arrays(0, [1.0] * 4, [1.0] * 4, [1.0, 2.0, 3.0, 4.0])
    g = order_greedy_prefix(inst, range(4), BWD, 1, suffix="heuristic")
    assert g.order == (3, 2, 1, 0)
    with pytest.raises(ValueError):
        order_greedy_prefix(inst, range(4), BWD, 1, suffix="random")


def test_exhaustive_example():
    assert order_exhaustive(LDF100, range(3), BWD) == ((1, 2, 0), 302.0)


def test_exhaustive_single_node():
    inst = Instance.from_arrays(1, [1.0], [1.0], [1.0])
    assert order_exhaustive(inst, [0], BWD) == ((0,), 0.0)


def test_exhaustive_guard(monkeypatch):
    inst = generate_instance(10, 0, "DMDC")
    with pytest.raises(GuardExceeded):
        order_exhaustive(inst, range(10), BWD)
    with pytest.raises(GuardExceeded):
        order_exhaustive(LDF100, range(3), BWD, guard=2)
    monkeypatch.setenv("DECSCHED_GUARD", "2")
    assert resolve_guard(9) == 2
    assert resolve_guard(9, override=True) is None


def test_exhaustive_breaks_ties_lexicographically():
    inst = unit_rates([1.0] * 4)
    assert order_exhaustive(inst, range(4), BWD)[0] == (0, 1, 2, 3)


@given(instances(max_n=6))
def test_exhaustive_matches_pure_python_brute_force(inst):
    for direction in Direction:
        order, v = order_exhaustive(inst, range(inst.n), direction)
        expected = brute_best_v(inst, range(inst.n), direction.value)
        # near-ties inside the library tolerance go to the smaller order
        assert v == pytest.approx(expected, rel=1e-9, abs=1e-12)
        assert objective_v(inst, range(inst.n), order, direction).v == pytest.approx(v, rel=1e-12, abs=1e-12)


@given(instances(max_n=7))
def test_subset_dp_matches_exhaustive(inst):
    for direction in Direction:
        order, v = order_exact(inst, range(inst.n), direction)
        assert v == pytest.approx(order_exhaustive(inst, range(inst.n), direction)[1], rel=1e-9, abs=1e-12)
        assert objective_v(inst, range(inst.n), order, direction).v == pytest.approx(v, rel=1e-12, abs=1e-12)


def test_subset_table_covers_every_subset():
    inst = generate_instance(5, 4, "DMDC")
    for direction in Direction:
        table = best_values_all_subsets(inst, direction)
        for size in range(1, 6):
            for ids in itertools.combinations(range(5), size):
                mask = sum(1 << i for i in ids)
                assert table[mask] == pytest.approx(brute_best_v(inst, ids, direction.value), rel=1e-12)


@given(instances(max_n=7, uniform_rates=True))
def test_delay_rule_optimal_for_uniform_rates(inst):
    for direction in Direction:
        order = order_descending_delay(inst, range(inst.n), direction)
        assert objective_v(inst, range(inst.n), order, direction).v == \
            pytest.approx(order_exhaustive(inst, range(inst.n), direction)[1], rel=1e-9, abs=1e-12)


@given(instances(max_n=7, uniform_delays=True))
def test_rate_rule_optimal_for_uniform_delays(inst):
    for direction in Direction:
        order = order_by_rate(inst, range(inst.n), direction)
        assert objective_v(inst, range(inst.n), order, direction).v == \
            pytest.approx(order_exhaustive(inst, range(inst.n), direction)[1], rel=1e-9, abs=1e-12)


@given(instances(max_n=6), st.data())
def test_greedy_ratio_bound(inst, data):
    k = data.draw(st.integers(1, inst.n))
    for direction in Direction:
        check = verify_ratio(inst, range(inst.n), direction, k)
        assert check.bound_holds
        assert check.v >= check.prefix_v - 1e-9 * max(1.0, check.v)


@given(instances(min_n=2, max_n=6))
def test_greedy_prefix_monotone_in_k(inst):
    for direction in Direction:
        values = [order_greedy_prefix(inst, range(inst.n), direction, k).prefix_v for k in range(1, inst.n + 1)]
        assert all(b >= a - 1e-9 * max(1.0, b) for a, b in zip(values, values[1:]))


@given(instances(max_n=5))
def test_independent_direction_optimization_minimizes_delay(inst):
    ids = tuple(range(inst.n))
    f, vf = order_exhaustive(inst, ids, FWD)
    b, vb = order_exhaustive(inst, ids, BWD)
    best = min_delay(inst, CommPlan(ids, f, b))
    S, B, R = inst.fwd.sum(), inst.bwd.sum(), inst.rates.sum()
    assert best == pytest.approx(S + B + max(0.0, (inst.workload - vf - vb) / R), rel=1e-9)
    perms = list(itertools.permutations(ids))
    brute = min(min_delay(inst, CommPlan(ids, p, q)) for p in perms for q in perms)
    assert best == pytest.approx(brute, rel=1e-9, abs=1e-12)


def test_ldf_counterexample_values():
    inst = counterexample("LDF", 3, 100)
    assert inst == Instance.from_arrays(0, [100.0, 1.0, 1.0], [1.0] * 3, [3.0, 2.0, 1.0])
    v = objective_v(inst, range(3), order_descending_delay(inst, range(3), BWD), BWD).v
    _, v_star = order_exhaustive(inst, range(3), BWD)
    assert (v, v_star) == (8.0, 302.0)
    assert v / v_star == pytest.approx(0.0265, abs=1e-4)


def test_ldf_counterexample_unit_scale_is_optimal():
    inst = counterexample("LDF", 3, 1)
    v = objective_v(inst, range(3), order_descending_delay(inst, range(3), BWD), BWD).v
    assert v == order_exhaustive(inst, range(3), BWD)[1]


@pytest.mark.parametrize("kind", ["LDF", "FCL"])
def test_counterexample_ratio_vanishes(kind):
    ratios = []
    for scale in (1e1, 1e2, 1e4, 1e6):
        inst = counterexample(kind, 3, scale)
        rule = counterexample_policy(kind)
        v = objective_v(inst, range(3), rule(inst, range(3), BWD), BWD).v
        ratios.append(v / brute_best_v(inst, range(3), "BACKWARD"))
    assert all(b < a for a, b in zip(ratios, ratios[1:]))
    assert ratios[-1] < 1e-4


def test_fcl_counterexample_shape():
    inst = counterexample("FCL", 4, 50)
    assert inst.rates.tolist() == [1, 2, 3, 4]
    assert inst.bwd.tolist() == [1, 1, 1, 50]
    assert order_by_rate(inst, range(4), BWD) == (0, 1, 2, 3)


@pytest.mark.parametrize("n, scale", [(1, 10), (3, 0.5)])
def test_counterexample_rejects_bad_arguments(n, scale):
    with pytest.raises(ValueError):
        counterexample("LDF", n, scale)


def test_verify_ratio_full_k():
    check = verify_ratio(LDF100, range(3), BWD, 3)
    assert check.prefix_v == check.v_star == 302
    assert check.ratio == 1
