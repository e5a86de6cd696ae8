"""Value iteration and strategy iteration with scheduled trace recording.

Both engines are generators underneath (:func:`iter_value_iteration`,
:func:`iter_strategy_iteration`) so that only the previous valuation is kept
alive; :func:`value_iteration` and :func:`strategy_iteration` materialize the
records the schedule asks for.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

from .bestreply import best_reply
from .core import (
    Game,
    NumericMode,
    PureStationaryStrategy,
    Scalar,
    StationaryStrategy,
    Valuation,
    apply_valuation,
    format_scalar,
    initial_valuation,
    min_nonzero_probability,
    uniform_strategy,
)
from .matgame import solve_fast, solve_matrix_game

CROSS_CHECK_FLOAT_TOL = 1e-9


@dataclass(frozen=True)
class IterationRecord:
    t: int
    valuation: Valuation
    strategy: Optional[StationaryStrategy] = None
    reply: Optional[PureStationaryStrategy] = None
    patience: Optional[Scalar] = None
    min_prob_position: Optional[int] = None

    @property
    def improvements(self) -> Optional[int]:
        """Strategy updates applied before this evaluation (SI only)."""
        return None if self.strategy is None else self.t - 1


@dataclass(frozen=True)
class TraceSchedule:
    record_at: tuple

    def __post_init__(self):
        ts = tuple(self.record_at)
        if any(not isinstance(t, int) or t < 1 for t in ts):
            raise ValueError("schedule entries must be positive integers")
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("schedule entries must be strictly increasing")
        object.__setattr__(self, "record_at", ts)

    @classmethod
    def every(cls, n: int) -> TraceSchedule:
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def powers_of_ten(cls, max_t: int) -> TraceSchedule:
        ts, t = [], 1
        while t <= max_t:
            ts.append(t)
            t *= 10
        return cls(tuple(ts))

    @classmethod
    def parse(cls, text: str, max_t: int) -> TraceSchedule:
        """``pow10``, ``all:<n>``, ``all`` or a comma-separated list of iterations."""
        if text == "pow10":
            return cls.powers_of_ten(max_t)
        if text == "all":
            return cls.every(max_t)
        if text.startswith("all:"):
            n = int(text[4:])
            if n > max_t:
                raise ValueError(f"all:{n} exceeds the iteration limit {max_t}")
            return cls.every(n)
        ts = tuple(int(part) for part in text.split(","))
        if ts and ts[-1] > max_t:
            raise ValueError(f"schedule entry {ts[-1]} exceeds the iteration limit {max_t}")
        return cls(ts)

    @property
    def last(self) -> int:
        return self.record_at[-1] if self.record_at else 0


class FastPathMismatch(ArithmeticError):
    """Closed-form and LP matrix-game solutions disagree."""


def _solve(M, cross_check: bool):
    value, row = solve_fast(M)
    if cross_check:
        sol = solve_matrix_game(M)
        if isinstance(value, float):
            same = abs(value - sol.value) <= CROSS_CHECK_FLOAT_TOL and all(
                abs(a - b) <= CROSS_CHECK_FLOAT_TOL for a, b in zip(row, sol.row_strategy)
            )
        else:
            same = value == sol.value and tuple(row) == tuple(sol.row_strategy)
        if not same:
            raise FastPathMismatch(
                f"fast path gave {value}, {row}; LP gave {sol.value}, {sol.row_strategy}"
            )
    return value, row


def iter_value_iteration(
    game: Game, mode: NumericMode = NumericMode.EXACT, *, cross_check: bool = False
) -> Iterator[tuple[int, Valuation]]:
    """Yield ``(t, v_t)`` for ``t = 1, 2, ...`` forever."""
    n = game.num_positions
    v = initial_valuation(game, mode)
    t = 0
    while True:
        t += 1
        nxt = [v[0]] * (n + 2)
        nxt[n + 1] = v[n + 1]
        for i in range(1, n + 1):
            nxt[i] = _solve(apply_valuation(game, i, v), cross_check)[0]
        v = tuple(nxt)
        yield t, v


def _scheduled(stream: Iterable, max_t: int, schedule: TraceSchedule, build):
    if max_t < 1:
        raise ValueError("max_t must be >= 1")
    wanted = set(t for t in schedule.record_at if t <= max_t)
    stop = max(wanted, default=0)
    records = []
    if not stop:
        return records
    for item in stream:
        t = item[0]
        if t in wanted:
            records.append(build(item))
        if t >= stop:
            break
    return records


def value_iteration(
    game: Game,
    max_t: int,
    schedule: TraceSchedule,
    mode: NumericMode = NumericMode.EXACT,
    *,
    cross_check: bool = False,
) -> list[IterationRecord]:
    return _scheduled(
        iter_value_iteration(game, mode, cross_check=cross_check),
        max_t,
        schedule,
        lambda item: IterationRecord(item[0], item[1]),
    )


def iter_strategy_iteration(
    game: Game, mode: NumericMode = NumericMode.EXACT, *, cross_check: bool = False
) -> Iterator[tuple[int, Valuation, StationaryStrategy, PureStationaryStrategy]]:
    """Yield ``(t, v_t, x_t, y_t)`` for ``t = 1, 2, ...`` forever.

    ``x_1`` is uniform; after evaluating ``x_t`` against its best reply
    ``y_t``, position ``i`` switches to the maximin strategy of
    ``A_i(v_t)`` only when that game's value strictly exceeds ``v_t[i]``.
    """
    n = game.num_positions
    x = uniform_strategy(game, mode)
    t = 1
    while True:
        result = best_reply(game, x, check=False)
        v = result.values
        yield t, v, x, result.reply
        t += 1
        updated = list(x)
        for i in range(1, n + 1):
            value, row = _solve(apply_valuation(game, i, v), cross_check)
            if value > v[i]:
                updated[i - 1] = row
        x = tuple(updated)


def _si_record(item) -> IterationRecord:
    t, v, x, y = item
    smallest, where = min_nonzero_probability(x)
    return IterationRecord(t, v, x, y, 1 / smallest, where)


def strategy_iteration(
    game: Game,
    max_t: int,
    schedule: TraceSchedule,
    mode: NumericMode = NumericMode.EXACT,
    *,
    cross_check: bool = False,
) -> list[IterationRecord]:
    return _scheduled(
        iter_strategy_iteration(game, mode, cross_check=cross_check),
        max_t,
        schedule,
        _si_record,
    )


def trace_csv(records: list[IterationRecord], num_positions: int) -> str:
    """Render records with header ``t,improvements,v_1..v_N,patience,min_prob_position,reply``."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(
        ["t", "improvements"]
        + [f"v_{i}" for i in range(1, num_positions + 1)]
        + ["patience", "min_prob_position", "reply"]
    )
    for rec in records:
        si = rec.strategy is not None
        writer.writerow(
            [rec.t, rec.improvements if si else ""]
            + [format_scalar(rec.valuation[i]) for i in range(1, num_positions + 1)]
            + [
                format_scalar(rec.patience) if si else "",
                rec.min_prob_position if si else "",
                ";".join(str(a) for a in rec.reply) if si else "",
            ]
        )
    return out.getvalue()
