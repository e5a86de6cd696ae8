"""Game model, numeric modes, and the primitives every solver shares.

Positions are integers ``0..N+1``: ``0`` is TRAP, ``N+1`` is GOAL and
``1..N`` are the non-terminal positions.  Actions are 1-based in every
message a user can see; storage is 0-based.

Scalars are either ``gmpy2.mpq`` (``NumericMode.EXACT``) or
``float`` (``NumericMode.FLOAT``).  Strategies and valuations are plain
tuples so that they are immutable and cheap to pass around in long runs.
"""

from __future__ import annotations

import enum
import json
import os
from dataclasses import dataclass
from gmpy2 import mpq as Rational
from typing import Any, Sequence, Union

Scalar = Union[Rational, float]
MixedAction = tuple  # tuple[Scalar, ...] of length m
StationaryStrategy = tuple  # tuple[MixedAction, ...] of length N
PureStationaryStrategy = tuple  # tuple[int, ...] of 1-based actions, length N
Valuation = tuple  # tuple[Scalar, ...] indexed 0..N+1
MatrixGame = tuple  # tuple[tuple[Scalar, ...], ...], square

TRAP = 0

FLOAT_SUM_TOL = 1e-12
# Float noise accepted (and snapped) when a computed valuation leaves [0, 1].
FLOAT_RANGE_TOL = 1e-12


class GameError(ValueError):
    """Raised for malformed games, strategies or valuations."""


class NumericMode(enum.Enum):
    EXACT = "rational"
    FLOAT = "float"

    @classmethod
    def parse(cls, name: str | NumericMode | None) -> NumericMode:
        if isinstance(name, NumericMode):
            return name
        if name is None:
            name = os.environ.get("PURGATORIO_MODE", "rational")
        aliases = {"rational": cls.EXACT, "exact": cls.EXACT,
                   "float": cls.FLOAT, "float64": cls.FLOAT}
        try:
            return aliases[name.lower()]
        except KeyError:
            raise ValueError(f"unknown numeric mode {name!r}") from None

    def convert(self, x) -> Scalar:
        if self is NumericMode.EXACT:
            return Rational(x)
        return float(x)

    @property
    def zero(self) -> Scalar:
        return Rational(0) if self is NumericMode.EXACT else 0.0

    @property
    def one(self) -> Scalar:
        return Rational(1) if self is NumericMode.EXACT else 1.0


def mode_of(x: Scalar) -> NumericMode:
    return NumericMode.FLOAT if isinstance(x, float) else NumericMode.EXACT


@dataclass(frozen=True)
class Game:
    """Deterministic concurrent reachability game.

    ``transitions[i-1][a-1][b-1]`` is the position the pebble moves to from
    position ``i`` when Player I plays ``a`` and Player II plays ``b``.
    """

    num_positions: int
    num_actions: int
    transitions: tuple

    def __post_init__(self):
        rows = tuple(
            tuple(tuple(row) for row in matrix) for matrix in self.transitions
        )
        object.__setattr__(self, "transitions", rows)
        validate_game(self)

    @property
    def goal(self) -> int:
        return self.num_positions + 1

    def pointer(self, i: int, a: int, b: int) -> int:
        """Successor of position ``i`` under 1-based actions ``a`` and ``b``."""
        return self.transitions[i - 1][a - 1][b - 1]

    def to_json(self) -> str:
        return json.dumps(
            {
                "num_positions": self.num_positions,
                "num_actions": self.num_actions,
                "transitions": [[list(r) for r in mat] for mat in self.transitions],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> Game:
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise GameError(f"game file is not valid JSON: {exc}") from None
        if not isinstance(obj, dict):
            raise GameError("game JSON must be an object")
        missing = {"num_positions", "num_actions", "transitions"} - obj.keys()
        if missing:
            raise GameError(f"game JSON lacks fields: {', '.join(sorted(missing))}")
        return cls(obj["num_positions"], obj["num_actions"], obj["transitions"])


def validate_game(game: Game) -> None:
    """Raise :class:`GameError` naming the first violation, if any."""
    n, m = game.num_positions, game.num_actions
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise GameError(f"num_positions must be an integer >= 1, got {n!r}")
    if not isinstance(m, int) or isinstance(m, bool) or m < 1:
        raise GameError(f"num_actions must be an integer >= 1, got {m!r}")
    if len(game.transitions) != n:
        raise GameError(
            f"expected {n} transition matrices, got {len(game.transitions)}"
        )
    for i, matrix in enumerate(game.transitions, start=1):
        if len(matrix) != m:
            raise GameError(f"position {i}: matrix has {len(matrix)} rows, expected {m}")
        for a, row in enumerate(matrix, start=1):
            if len(row) != m:
                raise GameError(
                    f"position {i}, action {a}: row has {len(row)} columns, expected {m}"
                )
            for b, target in enumerate(row, start=1):
                if not isinstance(target, int) or isinstance(target, bool):
                    raise GameError(
                        f"position {i}, actions ({a},{b}): pointer {target!r} is not an integer"
                    )
                if not 0 <= target <= n + 1:
                    raise GameError(
                        f"position {i}, actions ({a},{b}): pointer {target} outside 0..{n + 1}"
                    )


def initial_valuation(game: Game, mode: NumericMode) -> Valuation:
    """The boundary valuation ``(0, ..., 0, 1)``."""
    return (mode.zero,) * (game.num_positions + 1) + (mode.one,)


def check_valuation(v: Sequence[Scalar], n: int) -> None:
    if len(v) != n + 2:
        raise GameError(f"valuation has length {len(v)}, expected {n + 2}")
    if v[0] != 0 or v[n + 1] != 1:
        raise GameError("valuation must be 0 at TRAP and 1 at GOAL")
    for i, x in enumerate(v):
        if not 0 <= x <= 1:
            raise GameError(f"valuation entry {i} = {x} outside [0, 1]")


def check_mixed_action(p: Sequence[Scalar], m: int, where: str = "") -> None:
    if len(p) != m:
        raise GameError(f"{where}mixed action has {len(p)} entries, expected {m}")
    if any(x < 0 for x in p):
        raise GameError(f"{where}mixed action has a negative entry")
    total = sum(p)
    if isinstance(total, float):
        if abs(total - 1.0) > FLOAT_SUM_TOL:
            raise GameError(f"{where}mixed action sums to {total}")
    elif total != 1:
        raise GameError(f"{where}mixed action sums to {total}")


def check_strategy(x: Sequence[Sequence[Scalar]], game: Game) -> None:
    if len(x) != game.num_positions:
        raise GameError(
            f"strategy covers {len(x)} positions, game has {game.num_positions}"
        )
    for i, p in enumerate(x, start=1):
        check_mixed_action(p, game.num_actions, f"position {i}: ")


def check_pure_strategy(y: Sequence[int], game: Game) -> None:
    if len(y) != game.num_positions:
        raise GameError(
            f"pure strategy covers {len(y)} positions, game has {game.num_positions}"
        )
    for i, a in enumerate(y, start=1):
        if not 1 <= a <= game.num_actions:
            raise GameError(f"position {i}: action {a} outside 1..{game.num_actions}")


def uniform_strategy(game: Game, mode: NumericMode) -> StationaryStrategy:
    m = game.num_actions
    p = Rational(1, m) if mode is NumericMode.EXACT else 1.0 / m
    return tuple((p,) * m for _ in range(game.num_positions))


def apply_valuation(game: Game, i: int, v: Valuation) -> MatrixGame:
    """Replace each pointer at position ``i`` by the valuation of its target."""
    if not 1 <= i <= game.num_positions:
        raise GameError(f"position {i} is terminal or out of range")
    return tuple(tuple(v[target] for target in row) for row in game.transitions[i - 1])


def patience(x: StationaryStrategy) -> Scalar:
    """Reciprocal of the smallest non-zero behavior probability in ``x``."""
    smallest = min_nonzero_probability(x)[0]
    return 1 / smallest


def min_nonzero_probability(x: StationaryStrategy) -> tuple[Scalar, int]:
    """Smallest non-zero probability and the first (1-based) position holding it."""
    best = None
    where = 0
    for i, p in enumerate(x, start=1):
        for q in p:
            if q > 0 and (best is None or q < best):
                best, where = q, i
    if best is None:
        raise GameError("strategy has no non-zero behavior probability")
    return best, where


def format_scalar(x) -> str:
    """Serialize a scalar: ``"p/q"`` for rationals, shortest repr for floats."""
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, int):
        x = Rational(x)
    return f"{x.numerator}/{x.denominator}"


def scalar_to_json(x) -> Any:
    if isinstance(x, float):
        return x
    return format_scalar(x)


def parse_scalar(value) -> Scalar:
    """Inverse of :func:`format_scalar` / :func:`scalar_to_json`."""
    if isinstance(value, bool):
        raise ValueError(f"not a scalar: {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        if "/" in value:
            num, den = value.split("/")
            return Rational(int(num), int(den))
        return float(value)
    raise ValueError(f"not a scalar: {value!r}")


def strategy_to_json(x: StationaryStrategy) -> dict:
    return {str(i): [scalar_to_json(q) for q in p] for i, p in enumerate(x, start=1)}


def strategy_from_json(obj: dict) -> StationaryStrategy:
    return tuple(
        tuple(parse_scalar(q) for q in obj[str(i)]) for i in range(1, len(obj) + 1)
    )
