from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from repairsched.core import Instance, detect_jumps, reward, simulate
from repairsched.errors import (
    AssumptionViolated,
    LemmaPreconditionFailed,
    NodeFailsBeforeReached,
    NotSingleJump,
    StateBudgetExceeded,
)
from repairsched.policies import LeastModifiedHealthFirst, run_policy
from repairsched.solver import (
    closed_form_completion_times,
    lemma1_transform,
    nonjumping_order,
    order_duration_check,
    solve_exhaustive,
    solve_nonjumping,
    strip_all_jumps,
)


def test_nonjumping_examples(ex1, ex2, ex3):
    r = solve_nonjumping(ex1)
    assert (r.reward, r.repaired) == (2, {2, 3})
    assert r.witness == (2,) * 7 + (3,) * 9
    r = solve_nonjumping(ex2)
    assert (r.reward, r.repaired) == (2, {2, 3})
    r = solve_nonjumping(ex3)
    assert r.reward == 1 and len(r.repaired) == 1


def test_exhaustive_examples(ex1, ex2, ex3):
    assert solve_exhaustive(ex1).reward == 2
    assert solve_exhaustive(ex1).repaired == {2, 3}
    assert solve_exhaustive(ex2).reward == 2
    assert solve_exhaustive(ex3).reward == 1


def test_example3_node2_alone_is_also_optimal(ex3):
    # the lex-min witness repairs node 1; the order (2) ties it
    assert reward(simulate(ex3, [2] * 9)) == 1


def test_single_node_like_case():
    inst = Instance.make([("7/10", "1/10", "1/10"), ("1/10", "1/10", "1/10")], [], 2)
    r = solve_nonjumping(inst)
    assert r.reward == 1 and r.witness == (1, 1, 1)


def test_horizon_zero_allows_one_step():
    inst = Instance.make([("9/10", "1/10", "1/10"), ("1/2", "1/10", "1/10")], [], 0)
    assert solve_nonjumping(inst).reward == 1
    assert solve_exhaustive(inst).reward == 1


def test_jumping_beats_nonjumping_when_repair_dominates():
    # both nodes fail after two idle steps, so alternating would not help,
    # but a one-step repair of either leaves time for the other
    inst = Instance.make([("1/20", "1/2", "1/25"), ("1/20", "1/2", "1/25")])
    assert solve_nonjumping(inst).reward == 1
    ex = solve_exhaustive(inst)
    assert ex.reward == 2
    assert detect_jumps(simulate(inst, ex.witness))


def test_witnesses_replay(ex1, ex2, ex3):
    for inst in (ex1, ex2, ex3):
        for solver in (solve_nonjumping, solve_exhaustive):
            r = solver(inst)
            assert reward(simulate(inst, r.witness)) == r.reward


def test_state_cap(ex1):
    with pytest.raises(StateBudgetExceeded):
        solve_exhaustive(ex1, state_cap=3)


def test_nonjumping_order():
    assert nonjumping_order((2, 2, 3, 3, 3)) == [2, 3]


def test_closed_form_examples():
    inst = Instance.make([("4/5", "1/10", "1/10"), ("3/5", "1/10", "1/10")])
    cs = closed_form_completion_times(inst, (1, 2))
    assert cs.reached_health == (F(4, 5), F(2, 5))
    assert cs.durations == (2, 6) and cs.total == 8
    assert order_duration_check(inst, (1, 2)) == 8

    inst = Instance.make([("3/5", "1/20", "1/20"), ("7/20", "1/20", "1/20")])
    with pytest.raises(NodeFailsBeforeReached) as e:
        closed_form_completion_times(inst, (1, 2))
    assert e.value.k == 2
    assert order_duration_check(inst, (1, 2)) is None

    inst = Instance.make([("7/10", "1/10", "1/10"), ("1/2", "1/10", "1/10")])
    cs = closed_form_completion_times(inst, (1,))
    assert (cs.reached_health, cs.durations, cs.total) == ((F(7, 10),), (3,), 3)


def test_closed_form_rejects(ex1, ex2):
    with pytest.raises(AssumptionViolated):
        closed_form_completion_times(ex2, (1,))
    with pytest.raises(ValueError):
        closed_form_completion_times(ex1, (3, 2))
    with pytest.raises(ValueError):
        closed_form_completion_times(ex1, (1, 1))


LEMMA_INST = Instance.make([("1/2", "1/10", "1/10"), ("9/10", "1/10", "1/10")])
LEMMA_A = [1, 2, 2] + [1] * 6


def test_lemma1_worked_case():
    res = lemma1_transform(LEMMA_INST, simulate(LEMMA_INST, LEMMA_A))
    assert res.b_traj.actions == (2,) + (1,) * 6
    assert (res.k, res.t_bar) == (2, 1)
    got = {c.node: (c.t_a, c.t_b, c.bound) for c in res.comparisons}
    assert got == {1: (7, 6, 6), 2: (2, 1, 2)}
    assert res.ok


def test_lemma1_rejections(ex1):
    with pytest.raises(NotSingleJump):
        lemma1_transform(LEMMA_INST, simulate(LEMMA_INST, [2] + [1] * 6))
    with pytest.raises(NotSingleJump):
        lemma1_transform(LEMMA_INST, simulate(LEMMA_INST, [1, 2, 1, 2]))
    ex3 = Instance.make([("1/100", "11/100", "1/10"), ("11/100", "11/100", "1/10")])
    with pytest.raises(LemmaPreconditionFailed):
        lemma1_transform(ex3, simulate(ex3, [1, 2, 1]))


def test_strip_examples(ex3):
    a = simulate(LEMMA_INST, LEMMA_A)
    s = strip_all_jumps(LEMMA_INST, a)
    assert s.trajectory.actions == (2,) + (1,) * 6
    assert reward(s.trajectory) == 2
    b = simulate(LEMMA_INST, [2] + [1] * 6)
    assert strip_all_jumps(LEMMA_INST, b).trajectory == b

    g = run_policy(ex3, LeastModifiedHealthFirst())
    s = strip_all_jumps(ex3, g)
    assert not detect_jumps(s.trajectory)
    assert reward(s.trajectory) >= 0


rat = st.fractions(min_value=F(1, 12), max_value=F(11, 12), max_denominator=12)


@st.composite
def small_instances(draw, dominant_decay=False):
    n = draw(st.integers(2, 3))
    nodes = []
    for _ in range(n):
        inc = draw(rat)
        dec = draw(rat.filter(lambda d: d >= inc)) if dominant_decay else draw(rat)
        nodes.append((draw(rat), inc, dec))
    edges = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1) if draw(st.booleans())]
    horizon = draw(st.one_of(st.none(), st.integers(0, 12)))
    return Instance.make(nodes, edges, horizon)


@settings(max_examples=120, deadline=None)
@given(small_instances())
def test_exhaustive_never_below_nonjumping(inst):
    nj = solve_nonjumping(inst)
    ex = solve_exhaustive(inst)
    assert ex.reward >= nj.reward
    assert not detect_jumps(simulate(inst, nj.witness))


@settings(max_examples=120, deadline=None)
@given(small_instances(dominant_decay=True))
def test_dominant_decay_jumps_never_help(inst):
    assert solve_exhaustive(inst).reward == solve_nonjumping(inst).reward


@settings(max_examples=80, deadline=None)
@given(small_instances(dominant_decay=True), st.lists(st.integers(1, 3), max_size=20))
def test_strip_keeps_reward(inst, raw):
    from repairsched.core import feasible_set, step

    state, actions = inst.initial_state(), []
    for a in raw:
        if inst.horizon is not None and len(actions) > inst.horizon:
            break
        feas = sorted(feasible_set(inst, state))
        a = feas[(a - 1) % len(feas)]
        actions.append(a)
        state = step(inst, state, a)
    traj = simulate(inst, actions)
    out = strip_all_jumps(inst, traj)
    assert not detect_jumps(out.trajectory)
    assert reward(out.trajectory) >= reward(traj)
