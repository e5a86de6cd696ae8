"""Player II's best reply to a frozen Player I strategy.

Freezing Player I's stationary strategy turns the game into an absorbing
MDP in which Player II minimizes the probability of reaching GOAL.  Positions
where Player II can keep the pebble away from GOAL surely (the avoid set) are
found graph-theoretically and pinned to 0; on the rest the Bellman equations
have a unique fixed point, which policy iteration reaches.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import gmpy2
import numpy as np

from .core import (
    FLOAT_RANGE_TOL,
    TRAP,
    Game,
    PureStationaryStrategy,
    Rational,
    StationaryStrategy,
    Valuation,
    check_pure_strategy,
    check_strategy,
)

# Relative slack for "strict improvement" and ties in Float64 mode.
FLOAT_IMPROVE_TOL = 1e-12
# Exact-mode comparison filter: mpfr working precision and the gap beyond
# which approximate column values are trusted to order the exact ones.
FILTER_PRECISION = 256
FILTER_MARGIN = gmpy2.mpfr(2) ** -200


@dataclass(frozen=True)
class BestReplyResult:
    reply: PureStationaryStrategy
    values: Valuation


def _support(p) -> list[int]:
    return [a for a, q in enumerate(p, start=1) if q > 0]


def avoid_set(game: Game, x: StationaryStrategy) -> frozenset[int]:
    """Greatest set D where some column keeps every supported successor in D or TRAP."""
    supports = [_support(p) for p in x]
    dead = set(range(1, game.num_positions + 1))
    changed = True
    while changed:
        changed = False
        for i in sorted(dead):
            safe = dead | {TRAP}
            if not any(
                all(game.pointer(i, a, b) in safe for a in supports[i - 1])
                for b in range(1, game.num_actions + 1)
            ):
                dead.discard(i)
                changed = True
    return frozenset(dead)


def _can_reach_goal(game: Game, x: StationaryStrategy, y: PureStationaryStrategy) -> set[int]:
    goal = game.goal
    preds: dict[int, set[int]] = {}
    for i in range(1, game.num_positions + 1):
        for a, q in enumerate(x[i - 1], start=1):
            if q > 0:
                preds.setdefault(game.pointer(i, a, y[i - 1]), set()).add(i)
    alive = set()
    queue = deque([goal])
    while queue:
        node = queue.popleft()
        for i in preds.get(node, ()):
            if i not in alive:
                alive.add(i)
                queue.append(i)
    return alive


def solve_linear(A, b):
    """Solve ``A u = b`` by Gaussian elimination.

    Rationals are eliminated exactly; floats go through LAPACK (partial
    pivoting).  Raises :class:`ArithmeticError` on a singular system.
    """
    n = len(b)
    if n == 0:
        return []
    if isinstance(b[0], float):
        try:
            return list(np.linalg.solve(np.array(A, dtype=float), np.array(b, dtype=float)))
        except np.linalg.LinAlgError as exc:
            raise ArithmeticError(f"singular linear system: {exc}") from None
    rows = [list(A[r]) + [b[r]] for r in range(n)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if rows[r][col] != 0), None)
        if pivot is None:
            raise ArithmeticError("singular linear system")
        rows[col], rows[pivot] = rows[pivot], rows[col]
        prow = rows[col]
        inv = 1 / prow[col]
        prow = [v * inv for v in prow]
        rows[col] = prow
        for r in range(n):
            if r != col:
                f = rows[r][col]
                if f:
                    rows[r] = [u - f * v for u, v in zip(rows[r], prow)]
    return [rows[r][n] for r in range(n)]


def _snap(values: list, exact: bool) -> list:
    if exact:
        return values
    out = []
    for u in values:
        if -FLOAT_RANGE_TOL <= u < 0.0:
            u = 0.0
        elif 1.0 < u <= 1.0 + FLOAT_RANGE_TOL:
            u = 1.0
        out.append(float(u))
    return out


def reach_probabilities(
    game: Game, x: StationaryStrategy, y: PureStationaryStrategy, *, check: bool = True
) -> Valuation:
    """Exact absorption probabilities into GOAL of the chain induced by ``(x, y)``."""
    if check:
        check_strategy(x, game)
        check_pure_strategy(y, game)
    n, goal = game.num_positions, game.goal
    exact = not isinstance(x[0][0], float)
    zero = Rational(0) if exact else 0.0
    one = Rational(1) if exact else 1.0

    live = sorted(_can_reach_goal(game, x, y))
    index = {i: k for k, i in enumerate(live)}
    size = len(live)
    A = [[zero] * size for _ in range(size)]
    rhs = [zero] * size
    for k, i in enumerate(live):
        A[k][k] = one
        col = y[i - 1]
        for a, q in enumerate(x[i - 1], start=1):
            if not q:
                continue
            target = game.pointer(i, a, col)
            if target == goal:
                rhs[k] += q
            elif target in index:
                A[k][index[target]] -= q
    solution = _snap(solve_linear(A, rhs), exact)
    values = [zero] * (n + 2)
    values[goal] = one
    for k, i in enumerate(live):
        values[i] = solution[k]
    for i, u in enumerate(values):
        if not 0 <= u <= 1:
            raise ArithmeticError(f"reach probability {u} at position {i} outside [0, 1]")
    return tuple(values)


def column_values(game: Game, x: StationaryStrategy, v: Valuation, i: int, columns=None):
    """Expected next valuation at position ``i`` for each Player II column.

    With ``columns`` (1-based) given, returns a dict for just those columns.
    """
    p = x[i - 1]
    matrix = game.transitions[i - 1]
    m = game.num_actions
    wanted = range(1, m + 1) if columns is None else columns
    out = {}
    for b in wanted:
        total = 0
        for a in range(m):
            q = p[a]
            if q:
                total += q * v[matrix[a][b - 1]]
        out[b] = total
    return list(out.values()) if columns is None else out


def _approx_column_values(game: Game, x: StationaryStrategy, v: Valuation, i: int) -> list:
    p = x[i - 1]
    matrix = game.transitions[i - 1]
    m = game.num_actions
    with gmpy2.context(gmpy2.get_context(), precision=FILTER_PRECISION):
        pv = [gmpy2.mpfr(q) for q in p]
        vv = {}
        out = []
        for b in range(m):
            total = gmpy2.mpfr(0)
            for a in range(m):
                if p[a]:
                    target = matrix[a][b]
                    if target not in vv:
                        vv[target] = gmpy2.mpfr(v[target])
                    total += pv[a] * vv[target]
            out.append(total)
    return out


def _best_columns(game: Game, x: StationaryStrategy, v: Valuation, i: int, exact: bool):
    """Minimum column value at ``i`` and the set of columns attaining it.

    In exact mode the columns are first compared through high-precision
    approximations; exact sums are formed only for columns the filter
    cannot separate, so the answer is exact either way.  Float mode treats
    values within a relative ``FLOAT_IMPROVE_TOL`` as tied.
    """
    if not exact:
        q = column_values(game, x, v, i)
        best = min(q)
        cutoff = best + FLOAT_IMPROVE_TOL * max(1.0, abs(best))
        return best, [b for b in range(1, len(q) + 1) if q[b - 1] <= cutoff]
    approx = _approx_column_values(game, x, v, i)
    with gmpy2.context(gmpy2.get_context(), precision=FILTER_PRECISION):
        cutoff = min(approx) + FILTER_MARGIN
    close = [b for b in range(1, len(approx) + 1) if approx[b - 1] <= cutoff]
    if len(close) == 1:
        return None, close
    q = column_values(game, x, v, i, columns=close)
    best = min(q.values())
    return best, [b for b in close if q[b] == best]


def best_reply(game: Game, x: StationaryStrategy, *, check: bool = True) -> BestReplyResult:
    """Optimal pure stationary reply minimizing GOAL reachability everywhere.

    Policy iteration from the all-ones policy; among optimal columns the
    lowest index is returned.
    """
    if check:
        check_strategy(x, game)
    n, m = game.num_positions, game.num_actions
    exact = not isinstance(x[0][0], float)
    dead = avoid_set(game, x)
    supports = [_support(p) for p in x]
    safe = dead | {TRAP}

    policy = [1] * n
    for i in dead:
        policy[i - 1] = next(
            b
            for b in range(1, m + 1)
            if all(game.pointer(i, a, b) in safe for a in supports[i - 1])
        )

    guard = 64 * n * m
    rounds = 0
    while True:
        values = reach_probabilities(game, x, tuple(policy), check=False)
        changed = False
        final = list(policy)
        for i in range(1, n + 1):
            if i in dead:
                continue
            _, argmins = _best_columns(game, x, values, i, exact)
            # Lowest-index tie-break among optimal columns.
            final[i - 1] = argmins[0]
            if policy[i - 1] not in argmins:
                policy[i - 1] = argmins[0]
                changed = True
        if not changed:
            break
        rounds += 1
        if not exact and rounds > guard:
            raise ArithmeticError(
                f"best-reply policy iteration exceeded {guard} rounds (float cycling)"
            )
    if final != policy and not exact:
        values = reach_probabilities(game, x, tuple(final), check=False)
    return BestReplyResult(tuple(final), values)


def bellman_residual(game: Game, x: StationaryStrategy, result: BestReplyResult, tol=0):
    """Largest ``|values[i] - min_j Q_j(i)|`` and the positions whose reply misses the min."""
    worst = 0
    bad = []
    for i in range(1, game.num_positions + 1):
        q = column_values(game, x, result.values, i)
        best = min(q)
        worst = max(worst, abs(result.values[i] - best))
        if q[result.reply[i - 1] - 1] - best > tol:
            bad.append(i)
    return worst, bad
