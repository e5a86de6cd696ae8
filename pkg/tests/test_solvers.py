import itertools
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from purgatorio import purgatory, solvers
from purgatorio.core import Game, NumericMode, Rational
from purgatorio.solvers import TraceSchedule
from purgatorio.verify import random_game

F = Fraction
EXACT, FLOAT = NumericMode.EXACT, NumericMode.FLOAT


def take(stream, n):
    return list(itertools.islice(stream, n))


def one_pos_recurrence(m, steps):
    """v' = val(M_{1-v}) = 1 / sum_{i<m} (1-v)^i, starting from v = 0."""
    v, out = F(0), []
    for _ in range(steps):
        u = 1 - v
        v = 1 / sum(u**i for i in range(m))
        out.append(v)
    return out


def test_vi_one_position_two_actions():
    got = take(solvers.iter_value_iteration(purgatory.build(1, 2)), 50)
    assert [v[1] for _, v in got] == [F(t, t + 1) for t in range(1, 51)]


def test_vi_one_position_three_actions():
    got = take(solvers.iter_value_iteration(purgatory.build(1, 3)), 6)
    expected = one_pos_recurrence(3, 6)
    assert expected[:2] == [F(1, 3), F(9, 19)]
    assert [v[1] for _, v in got] == expected


def test_si_p72_first_iterations():
    got = take(solvers.iter_strategy_iteration(purgatory.build(7, 2)), 2)
    (t1, v1, x1, y1), (t2, v2, x2, y2) = got
    assert v1[1] == F(1, 128) and y1 == (1,) * 7
    # v^1_{i+1} = 2^-(7-i), so position i is updated to p^z with z = 2^-i.
    assert v2[1] == math.prod(1 / (2 - F(1, 2**i)) for i in range(1, 8))
    assert float(v2[1]) == pytest.approx(0.013473585, abs=1e-9)


def test_si_float_matches_exact():
    g = purgatory.build(4, 2)
    exact = take(solvers.iter_strategy_iteration(g, EXACT), 15)
    approx = take(solvers.iter_strategy_iteration(g, FLOAT), 15)
    for (_, v, _, y), (_, w, _, z) in zip(exact, approx):
        assert y == z
        assert all(abs(float(a) - b) < 1e-12 for a, b in zip(v, w))


def test_si_and_vi_in_sync_on_one_position():
    for m in (2, 3):
        g = purgatory.build(1, m)
        si = take(solvers.iter_strategy_iteration(g), 8)
        vi = take(solvers.iter_value_iteration(g), 8)
        assert [r[1] for r in si] == [r[1] for r in vi]


def test_vi_below_si_many_positions():
    g = purgatory.build(4, 3)
    si = take(solvers.iter_strategy_iteration(g, FLOAT), 40)
    vi = take(solvers.iter_value_iteration(g, FLOAT), 40)
    for (_, v, _, _), (_, w) in zip(si, vi):
        assert all(b <= a + 1e-12 for a, b in zip(v, w))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 3), st.integers(1, 3))
def test_vi_monotone_on_random_games(seed, N, m):
    g = random_game(random.Random(seed), N, m)
    prev = None
    for _, v in take(solvers.iter_value_iteration(g), 6):
        assert all(0 <= a <= 1 for a in v)
        if prev is not None:
            assert all(a >= b for a, b in zip(v, prev))
        prev = v


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 3), st.integers(1, 3))
def test_si_monotone_on_random_games(seed, N, m):
    g = random_game(random.Random(seed), N, m)
    prev = None
    for _, v, _, _ in take(solvers.iter_strategy_iteration(g), 5):
        if prev is not None:
            assert all(a >= b for a, b in zip(v, prev))
        prev = v


def test_cross_check_passes():
    g = purgatory.build(3, 3)
    take(solvers.iter_strategy_iteration(g, cross_check=True), 4)
    take(solvers.iter_value_iteration(g, FLOAT, cross_check=True), 10)


def test_schedule_records():
    g = purgatory.build(1, 2)
    recs = solvers.value_iteration(g, 100, TraceSchedule.powers_of_ten(100))
    assert [r.t for r in recs] == [1, 10, 100]
    assert recs[-1].valuation[1] == F(100, 101)
    assert recs[0].improvements is None


def test_si_records_patience():
    g = purgatory.build(2, 2)
    recs = solvers.strategy_iteration(g, 3, TraceSchedule.every(3))
    assert [r.improvements for r in recs] == [0, 1, 2]
    assert recs[0].patience == 2
    assert recs[2].min_prob_position == 1


def test_schedule_validation():
    with pytest.raises(ValueError):
        TraceSchedule((3, 2))
    with pytest.raises(ValueError):
        TraceSchedule((0,))
    assert TraceSchedule.parse("all:3", 5).record_at == (1, 2, 3)
    assert TraceSchedule.parse("2,4", 5).record_at == (2, 4)
    with pytest.raises(ValueError):
        TraceSchedule.parse("9", 5)
    with pytest.raises(ValueError):
        solvers.value_iteration(purgatory.build(1, 2), 0, TraceSchedule((1,)))


def test_trace_csv():
    g = purgatory.build(2, 2)
    si = solvers.strategy_iteration(g, 2, TraceSchedule.every(2))
    text = solvers.trace_csv(si, 2)
    lines = text.splitlines()
    assert lines[0] == "t,improvements,v_1,v_2,patience,min_prob_position,reply"
    assert lines[1] == "1,0,1/4,1/2,2/1,1,1;1"
    vi = solvers.value_iteration(g, 1, TraceSchedule((1,)))
    assert solvers.trace_csv(vi, 2).splitlines()[1] == "1,,0/1,1/2,,,"


def test_single_action_game():
    g = Game(1, 1, [[[2]]])
    _, v, x, y = next(solvers.iter_strategy_iteration(g))
    assert v[1] == 1 and x == ((Rational(1),),) and y == (1,)
