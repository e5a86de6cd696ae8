"""Zero-sum matrix games: a dense exact simplex and the triangular closed form.

The row player maximizes.  :func:`solve_matrix_game` shifts the payoffs to be
strictly positive and runs Bland's-rule simplex on the column player's
normalized LP ``max sum(w) s.t. M' w <= 1, w >= 0``.  The row player's
maximin strategy is read off the final objective row (the LP duals).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .core import GameError, MatrixGame, MixedAction, Rational, Scalar

FLOAT_PIVOT_TOL = 1e-12


@dataclass(frozen=True)
class MatrixGameSolution:
    value: Scalar
    row_strategy: MixedAction
    col_strategy: MixedAction


@dataclass(frozen=True)
class TriangularParams:
    """``scale`` on the diagonal, 0 below, ``scale * z`` above."""

    scale: Scalar
    z: Scalar


def _check_square(M: MatrixGame) -> int:
    m = len(M)
    if m == 0 or any(len(row) != m for row in M):
        raise GameError("matrix game must be square and non-empty")
    return m


def solve_matrix_game(M: MatrixGame) -> MatrixGameSolution:
    m = _check_square(M)
    exact = not any(isinstance(x, float) for row in M for x in row)
    if exact:
        M = [[Rational(x) for x in row] for row in M]
        zero, one = Rational(0), Rational(1)
        tol = 0
    else:
        M = [[float(x) for x in row] for row in M]
        zero, one = 0.0, 1.0
        tol = FLOAT_PIVOT_TOL

    shift = one - min(min(row) for row in M)
    # Columns 0..m-1 hold w (one per column action), m..2m-1 the row slacks.
    width = 2 * m
    tableau = []
    for a in range(m):
        row = [M[a][j] + shift for j in range(m)]
        row += [one if k == a else zero for k in range(m)]
        row.append(one)
        tableau.append(row)
    objective = [-one] * m + [zero] * m + [zero]
    basis = list(range(m, width))

    while True:
        entering = next((k for k in range(width) if objective[k] < -tol), None)
        if entering is None:
            break
        leaving = None
        best_ratio = None
        for r in range(m):
            coef = tableau[r][entering]
            if coef > tol:
                ratio = tableau[r][-1] / coef
                if (
                    best_ratio is None
                    or ratio < best_ratio
                    or (ratio == best_ratio and basis[r] < basis[leaving])
                ):
                    best_ratio, leaving = ratio, r
        if leaving is None:  # pragma: no cover - bounded by construction
            raise ArithmeticError("matrix-game LP reported unbounded")
        pivot_row = tableau[leaving]
        piv = pivot_row[entering]
        pivot_row = [x / piv for x in pivot_row]
        tableau[leaving] = pivot_row
        for r in range(m):
            if r != leaving:
                f = tableau[r][entering]
                if f:
                    row = tableau[r]
                    tableau[r] = [x - f * y for x, y in zip(row, pivot_row)]
        f = objective[entering]
        objective = [x - f * y for x, y in zip(objective, pivot_row)]
        basis[leaving] = entering

    total = objective[-1]
    w = [zero] * m
    for r, var in enumerate(basis):
        if var < m:
            w[var] = tableau[r][-1]
    duals = objective[m:width]
    if not exact:
        duals = [max(d, 0.0) for d in duals]
        w = [max(x, 0.0) for x in w]
    row_strategy = _normalize(duals)
    col_strategy = _normalize(w)
    value = one / total - shift
    return MatrixGameSolution(value, row_strategy, col_strategy)


def _normalize(weights) -> MixedAction:
    s = sum(weights)
    return tuple(x / s for x in weights)


def triangular_row(z: Scalar, m: int) -> tuple[Scalar, MixedAction]:
    """Value and (unique) maximin strategy of the unit triangular game."""
    if not 0 <= z < 1:
        raise GameError(f"triangular parameter z={z} outside [0, 1)")
    if m < 1:
        raise GameError("need at least one action")
    if isinstance(z, int):
        z = Rational(z)
    r = 1 - z
    powers = [r ** 0]
    for _ in range(m - 1):
        powers.append(powers[-1] * r)
    first = 1 / sum(powers)
    return first, tuple(first * q for q in powers)


def triangular_matrix(z: Scalar, m: int, scale: Scalar = 1) -> MatrixGame:
    if isinstance(z, int):
        z = Rational(z)
    zero = z * 0
    return tuple(
        tuple(scale if a == b else (zero if a > b else scale * z) for b in range(m))
        for a in range(m)
    )


def triangular_solution(z: Scalar, m: int) -> MatrixGameSolution:
    """Closed-form value and row strategy; column strategy from the LP."""
    value, row = triangular_row(z, m)
    col = solve_matrix_game(triangular_matrix(z, m)).col_strategy
    return MatrixGameSolution(value, row, col)


def detect_scaled_triangular(M: MatrixGame) -> Optional[TriangularParams]:
    m = _check_square(M)
    c = M[0][0]
    if not c > 0:
        return None
    above = None
    for a in range(m):
        row = M[a]
        for b in range(m):
            x = row[b]
            if a == b:
                if x != c:
                    return None
            elif a > b:
                if x != 0:
                    return None
            elif above is None:
                above = x
            elif x != above:
                return None
    if above is None:
        return TriangularParams(c, c * 0)
    z = above / c
    if not 0 <= z < 1:
        return None
    return TriangularParams(c, z)


def solve_fast(M: MatrixGame) -> tuple[Scalar, MixedAction]:
    """Value and maximin strategy, via the closed form when ``M`` allows it."""
    params = detect_scaled_triangular(M)
    if params is None:
        sol = solve_matrix_game(M)
        return sol.value, sol.row_strategy
    value, row = triangular_row(params.z, len(M))
    return params.scale * value, row


def guarantees(M: MatrixGame, sol: MatrixGameSolution) -> tuple[Scalar, Scalar]:
    """``(min_j (p M)_j, max_a (M q)_a)``; these bracket the value."""
    m = len(M)
    p, q = sol.row_strategy, sol.col_strategy
    low = min(sum(p[a] * M[a][b] for a in range(m)) for b in range(m))
    high = max(sum(M[a][b] * q[b] for b in range(m)) for a in range(m))
    return low, high
