"""Generalized Purgatory ``P(N, m)`` and the strategies used to bound it.

Dante (Player I, rows) guesses a number in ``1..m``; Lucifer (Player II,
columns) hides one.  A correct guess advances one position (GOAL after the
``N``-th in a row), overshooting loses (TRAP), undershooting resets to
position 1.  Position ``i`` means ``i - 1`` correct guesses so far.
"""

from __future__ import annotations

import math

import numpy as np

from .core import (
    Game,
    GameError,
    MixedAction,
    NumericMode,
    Rational,
    Scalar,
    StationaryStrategy,
)

# 2**-f underflows double precision (and denormals are useless) past this.
FLOAT_EXPONENT_LIMIT = 1000


def build(N: int, m: int) -> Game:
    if N < 1 or m < 1:
        raise GameError(f"Purgatory needs N >= 1 and m >= 1, got N={N}, m={m}")
    transitions = []
    for i in range(1, N + 1):
        matrix = []
        for guess in range(1, m + 1):
            row = []
            for hidden in range(1, m + 1):
                if guess == hidden:
                    row.append(i + 1)
                elif guess > hidden:
                    row.append(0)
                else:
                    row.append(1)
            matrix.append(row)
        transitions.append(matrix)
    return Game(N, m, transitions)


def f(i: int, j: int, m: int) -> int:
    """``1 + (j - 1) * (1 + m + ... + m**(i-1))``; note ``f(i, m, m) == m**i``."""
    if i < 0 or j < 1 or m < 2:
        raise ValueError(f"f needs i >= 0, j >= 1, m >= 2 (got {i}, {j}, {m})")
    return 1 + (j - 1) * sum(m**r for r in range(i))


def _check_nmk(N: int, m: int, k: int) -> None:
    if N < 2 or m < 2 or not 1 <= k <= N - 2:
        raise GameError(
            f"need N >= 2, m >= 2 and 1 <= k <= N-2 (got N={N}, m={m}, k={k})"
        )


def lucifer_bounding_strategy(
    N: int, m: int, k: int, mode: NumericMode = NumericMode.EXACT
) -> StationaryStrategy:
    """Lucifer's strategy keeping ``P_T(N, m)`` small for ``T <= 2**(m**(N-k))``.

    At depth ``d = i - 1 < N - k`` number ``j < m`` is hidden with probability
    ``2**-f(N-k-d, m+1-j)`` and the rest of the mass goes to ``m``; deeper
    positions are uniform.
    """
    _check_nmk(N, m, k)
    strategy = []
    for i in range(1, N + 1):
        d = i - 1
        if d >= N - k:
            strategy.append((mode.convert(Rational(1, m)),) * m)
            continue
        exponents = [f(N - k - d, m + 1 - j, m) for j in range(1, m)]
        if mode is NumericMode.EXACT:
            probs = [Rational(1, 2**e) for e in exponents]
            rest = 1 - sum(probs)
        else:
            if max(exponents) > FLOAT_EXPONENT_LIMIT:
                raise OverflowError(
                    f"2**-{max(exponents)} underflows Float64; use rational mode"
                )
            probs = [2.0**-e for e in exponents]
            rest = 1.0 - math.fsum(probs)
        if not rest > 0:  # pragma: no cover - f >= 1 keeps mass for action m
            raise ArithmeticError(f"no probability mass left at position {i}")
        strategy.append(tuple(probs) + (rest,))
    return tuple(strategy)


def dante_best_response_finite(game: Game, lucifer: StationaryStrategy, T: int) -> Scalar:
    """Dante's best ``T``-round value from position 1 against a frozen Lucifer.

    Backward induction over rounds left; GOAL is worth 1, everything else 0
    once time runs out.
    """
    if T < 0:
        raise ValueError("T must be >= 0")
    n, m, goal = game.num_positions, game.num_actions, game.goal
    exact = not isinstance(lucifer[0][0], float)
    zero = Rational(0) if exact else 0.0
    one = Rational(1) if exact else 1.0
    V = [zero] * (n + 2)
    V[goal] = one
    for _ in range(T):
        nxt = [zero] * (n + 2)
        nxt[goal] = one
        for i in range(1, n + 1):
            q = lucifer[i - 1]
            matrix = game.transitions[i - 1]
            best = zero
            for a in range(m):
                row = matrix[a]
                total = zero
                for b in range(m):
                    if q[b]:
                        total += q[b] * V[row[b]]
                if total > best:
                    best = total
            nxt[i] = best
        V = nxt
    return V[1] if T > 0 else zero


def one_pos_adversary_action(p: MixedAction, epsilon: Scalar) -> int:
    """Lucifer's round reply in ``P_T(1, m)``: least green action, else ``m``."""
    if not 0 < epsilon < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    m = len(p)
    ratio = (1 - epsilon) / epsilon
    tail = [0] * (m + 1)
    for j in range(m - 1, -1, -1):
        tail[j] = tail[j + 1] + p[j]
    for i in range(m):
        if p[i] < ratio * tail[i + 1]:
            return i + 1
    return m


def adversary_epsilon(m: int, T: int) -> float:
    return (1.0 / (m * T)) ** (1.0 / (m - 1))


def simulate_one_pos_adversary(
    dante: MixedAction, m: int, T: int, trials: int, seed: int
) -> float:
    """Empirical win frequency of a stationary Dante in ``P_T(1, m)``.

    Lucifer answers every round with :func:`one_pos_adversary_action`; since
    Dante is stationary that reply is the same in every round.
    """
    eps = adversary_epsilon(m, T)
    hidden = one_pos_adversary_action(dante, eps)
    rng = np.random.default_rng(seed)
    probs = np.asarray([float(q) for q in dante])
    probs = probs / probs.sum()
    active = np.ones(trials, dtype=bool)
    won = np.zeros(trials, dtype=bool)
    for _ in range(T):
        if not active.any():
            break
        guesses = rng.choice(m, size=trials, p=probs) + 1
        won |= active & (guesses == hidden)
        active &= guesses < hidden
    return float(won.mean())
