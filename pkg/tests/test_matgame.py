import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from purgatorio.core import GameError
from purgatorio.matgame import (
    detect_scaled_triangular,
    guarantees,
    solve_matrix_game,
    triangular_matrix,
    triangular_row,
    triangular_solution,
)

F = Fraction


def grid_maximin_2x2(M, step=F(1, 1000)):
    """Brute-force best guaranteed payoff over row strategies on a grid."""
    best, arg = None, None
    k = 0
    while k <= 1:
        p = (k, 1 - k)
        g = min(p[0] * M[0][b] + p[1] * M[1][b] for b in range(2))
        if best is None or g > best:
            best, arg = g, p
        k += step
    return best, arg


def scipy_value(M):
    """Independent LP: maximize v s.t. p^T M >= v, sum p = 1."""
    M = np.asarray(M, dtype=float)
    m = M.shape[0]
    c = np.zeros(m + 1)
    c[-1] = -1.0
    A_ub = np.hstack([-M.T, np.ones((m, 1))])
    A_eq = np.hstack([np.ones((1, m)), np.zeros((1, 1))])
    res = linprog(
        c, A_ub=A_ub, b_ub=np.zeros(m), A_eq=A_eq, b_eq=[1.0],
        bounds=[(0, None)] * m + [(None, None)],
    )
    return res.x[-1]


def test_identity():
    sol = solve_matrix_game(((1, 0), (0, 1)))
    assert sol.value == F(1, 2)
    assert sol.row_strategy == (F(1, 2), F(1, 2))


def test_m_half_against_grid_oracle():
    M = ((1, F(1, 2)), (0, 1))
    oracle_value, oracle_row = grid_maximin_2x2(M)
    # 2/3 is not on the 1/1000 grid; the grid optimum is within one step.
    assert abs(oracle_value - F(2, 3)) < F(1, 1000)
    sol = solve_matrix_game(M)
    assert sol.value == F(2, 3)
    assert sol.row_strategy == (F(2, 3), F(1, 3))
    assert abs(oracle_row[0] - sol.row_strategy[0]) < F(2, 1000)


def test_constant_matrix():
    sol = solve_matrix_game(((F(3, 7),) * 3,) * 3)
    assert sol.value == F(3, 7)
    low, high = guarantees(((F(3, 7),) * 3,) * 3, sol)
    assert low == high == F(3, 7)


def test_one_by_one():
    sol = solve_matrix_game(((F(2, 5),),))
    assert sol.value == F(2, 5) and sol.row_strategy == (1,) and sol.col_strategy == (1,)


def test_not_square():
    with pytest.raises(GameError):
        solve_matrix_game(((1, 2),))


def test_float_mode():
    sol = solve_matrix_game(((1.0, 0.5), (0.0, 1.0)))
    assert sol.value == pytest.approx(2 / 3, abs=1e-12)
    assert isinstance(sol.value, float)


def test_deterministic():
    rng = random.Random(3)
    M = tuple(tuple(F(rng.randint(0, 9), 9) for _ in range(4)) for _ in range(4))
    assert solve_matrix_game(M) == solve_matrix_game(M)


def test_guarantees_on_random_matrices():
    rng = random.Random(11)
    for _ in range(1000):
        m = rng.randint(1, 5)
        M = tuple(
            tuple(F(rng.randint(0, 20), 20) for _ in range(m)) for _ in range(m)
        )
        sol = solve_matrix_game(M)
        low, high = guarantees(M, sol)
        assert low >= sol.value >= high
        assert sum(sol.row_strategy) == 1 and sum(sol.col_strategy) == 1
        assert min(sol.row_strategy) >= 0 and min(sol.col_strategy) >= 0


def test_float_guarantees_against_scipy():
    rng = np.random.default_rng(5)
    for _ in range(200):
        m = int(rng.integers(2, 6))
        M = tuple(tuple(float(x) for x in row) for row in rng.random((m, m)))
        sol = solve_matrix_game(M)
        low, high = guarantees(M, sol)
        assert low >= sol.value - 1e-9 and high <= sol.value + 1e-9
        assert sol.value == pytest.approx(scipy_value(M), abs=1e-8)


@pytest.mark.parametrize(
    "z, m, value, row",
    [
        (F(0), 3, F(1, 3), (F(1, 3),) * 3),
        (F(1, 2), 3, F(4, 7), (F(4, 7), F(2, 7), F(1, 7))),
        (F(1, 2), 2, F(2, 3), (F(2, 3), F(1, 3))),
    ],
)
def test_triangular_closed_form(z, m, value, row):
    sol = triangular_solution(z, m)
    assert sol.value == value
    assert sol.row_strategy == row
    low, high = guarantees(triangular_matrix(z, m), sol)
    assert low == high == value


def test_triangular_rejects_bad_z():
    with pytest.raises(GameError):
        triangular_solution(F(1), 2)
    with pytest.raises(GameError):
        triangular_solution(F(-1, 2), 2)


def test_detect():
    p = detect_scaled_triangular(((F(7, 10), F(1, 2)), (0, F(7, 10))))
    assert (p.scale, p.z) == (F(7, 10), F(5, 7))
    p = detect_scaled_triangular(((1, 0), (0, 1)))
    assert (p.scale, p.z) == (1, 0)
    assert detect_scaled_triangular(((1, 0), (1, 1))) is None
    assert detect_scaled_triangular(((1, 1), (0, 1))) is None  # z = 1
    assert detect_scaled_triangular(((0, 0), (0, 0))) is None
    assert detect_scaled_triangular(((1, F(1, 2), F(1, 3)), (0, 1, F(1, 2)), (0, 0, 1))) is None


@settings(max_examples=200, deadline=None)
@given(st.fractions(0, 1).filter(lambda z: z < 1), st.integers(2, 6))
def test_lp_equals_closed_form(z, m):
    sol = solve_matrix_game(triangular_matrix(z, m))
    value, row = triangular_row(z, m)
    assert sol.value == value
    assert sol.row_strategy == row


@given(
    st.fractions(0, 1).filter(lambda z: 0 < z < 1),
    st.fractions(0, 1).filter(lambda z: 0 < z < 1),
    st.integers(2, 6),
)
def test_closed_form_monotone(a, b, m):
    if a == b:
        return
    y, z = min(a, b), max(a, b)
    py, pz = triangular_row(y, m)[1], triangular_row(z, m)[1]
    assert py[0] < pz[0]
    assert py[-1] > pz[-1]


@settings(deadline=None)
@given(
    st.fractions(0, 1).filter(lambda z: z < 1),
    st.integers(2, 5),
    st.fractions(min_value=F(1, 100), max_value=100),
)
def test_scaling_covariance(z, m, c):
    base = solve_matrix_game(triangular_matrix(z, m))
    scaled = solve_matrix_game(triangular_matrix(z, m, scale=c))
    assert scaled.value == c * base.value
    assert scaled.row_strategy == base.row_strategy
