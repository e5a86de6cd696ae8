"""Closed-form bounds on Purgatory values, patience and iteration counts.

Quantities like ``2**(m**(N/3))`` are kept as :class:`HugePower` and never
expanded.  Bounds whose hypotheses fail are still computed; the report
carries a flag (``vacuous``, ``asymptotic``) instead of hiding them.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional

from .core import Scalar, scalar_to_json

# Largest exponent for which 2**-e is materialized as an exact rational.
EXACT_EXPONENT_LIMIT = 1 << 20


@dataclass(frozen=True)
class HugePower:
    """``base ** exponent`` with ``exponent`` an int, Fraction or float."""

    base: int
    exponent: object

    @property
    def log2(self) -> float:
        return float(self.exponent) * math.log2(self.base)

    @property
    def exact(self) -> bool:
        return isinstance(self.exponent, int)

    def value(self, limit: int = EXACT_EXPONENT_LIMIT):
        """Expand to an int (exact integer exponent) or float, if not astronomical."""
        if self.log2 > limit:
            raise OverflowError(f"{self} is too large to expand")
        if self.exact:
            return self.base**self.exponent
        return float(self.base) ** float(self.exponent)

    def _key(self, other) -> tuple[float, float]:
        if isinstance(other, HugePower):
            if self.base == other.base and self.exact and other.exact:
                return self.exponent, other.exponent
            return self.log2, other.log2
        if other <= 0:
            return 1.0, -math.inf
        if self.exact and isinstance(other, int) and self.log2 < 4096:
            return self.value(), other
        return self.log2, math.log2(other)

    def __lt__(self, other):
        a, b = self._key(other)
        return a < b

    def __le__(self, other):
        a, b = self._key(other)
        return a <= b

    def __gt__(self, other):
        a, b = self._key(other)
        return a > b

    def __ge__(self, other):
        a, b = self._key(other)
        return a >= b

    def __str__(self):
        return f"{self.base}^{self.exponent}"

    def to_json(self):
        exp = self.exponent
        if isinstance(exp, Fraction):
            exp = scalar_to_json(exp)
        return {"base": self.base, "exponent": exp}


def _power_of(base: int, exp_num: int, exp_den: int):
    """``base ** (exp_num / exp_den)`` as an int when integral, else a float."""
    if exp_num % exp_den == 0:
        return base ** (exp_num // exp_den)
    return float(base) ** (exp_num / exp_den)


@dataclass(frozen=True)
class BoundReport:
    name: str
    parameters: dict
    bound: object
    observed: Optional[Scalar] = None
    satisfied: Optional[bool] = None
    flags: tuple = ()
    # "upper": observed <= bound, "strict_upper": observed < bound.
    direction: str = "upper"
    position: int = 1
    t_range: Optional[tuple] = None

    def compare(self, observed) -> bool:
        if self.direction == "strict_upper":
            return observed < self.bound
        if self.direction == "upper":
            return observed <= self.bound
        if self.direction == "lower":
            return observed >= self.bound
        raise ValueError(f"unknown bound direction {self.direction!r}")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "parameters": {k: _json_value(v) for k, v in self.parameters.items()},
            "bound": _json_value(self.bound),
            "observed": _json_value(self.observed),
            "satisfied": self.satisfied,
            "flags": list(self.flags),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _json_value(x):
    if x is None or isinstance(x, (bool, str)):
        return x
    if isinstance(x, HugePower):
        return x.to_json()
    if isinstance(x, (tuple, list)):
        return [_json_value(y) for y in x]
    if isinstance(x, int):
        return x
    return scalar_to_json(x)


def one_pos_value_upper(m: int, T: int) -> Scalar:
    """Upper bound on the ``T``-round value of ``P(1, m)``; exact for ``m = 2``."""
    if m < 2 or T < 1:
        raise ValueError("need m >= 2 and T >= 1")
    if m == 2:
        return 1 - Fraction(1, 4 * T)
    return 1 - (1 - 1 / m) * (1 / (m * T)) ** (1 / (m - 1))


def one_pos_report(m: int, T: int) -> BoundReport:
    return BoundReport(
        "one_pos_value_upper",
        {"N": 1, "m": m, "T": T},
        one_pos_value_upper(m, T),
        direction="strict_upper",
        t_range=(T, T),
    )


def many_pos_value_upper(N: int, m: int, k: int) -> tuple[Scalar, HugePower]:
    """``2 m**-k + 2**-(m**(N-k-1))`` and the horizon ``2**(m**(N-k))`` it holds for."""
    if N < 2 or m < 2 or not 1 <= k <= N - 2:
        raise ValueError(f"need N >= 2, m >= 2, 1 <= k <= N-2 (got {N}, {m}, {k})")
    tail_exp = m ** (N - k - 1)
    if tail_exp <= EXACT_EXPONENT_LIMIT:
        bound = Fraction(2, m**k) + Fraction(1, 2**tail_exp)
    else:
        bound = 2.0 * float(m) ** -k
    return bound, HugePower(2, m ** (N - k))


def many_pos_report(N: int, m: int, k: int, t_cap: Optional[int] = None) -> BoundReport:
    bound, horizon = many_pos_value_upper(N, m, k)
    flags = []
    if bound >= 1:
        flags.append("vacuous")
    if isinstance(bound, float):
        flags.append("rounded")
    hi = t_cap
    if horizon.log2 < 64:
        hi = horizon.value() if t_cap is None else min(t_cap, horizon.value())
    return BoundReport(
        "many_pos_value_upper",
        {"N": N, "m": m, "k": k, "horizon": horizon},
        bound,
        flags=tuple(flags),
        t_range=(1, hi),
    )


def vi_iterations_sufficient(N: int, l, k, epsilon) -> tuple[Scalar, float]:
    """Rounds ``k N l**N`` and the additive error ``epsilon + e**-k`` they guarantee."""
    if N < 1 or l < 1 or k < 1 or epsilon < 0:
        raise ValueError("need N >= 1, l >= 1, k >= 1, epsilon >= 0")
    return k * N * l**N, float(epsilon) + math.exp(-float(k))


def vi_lower_iterations_one_pos(m: int, epsilon) -> float:
    """Below this many VI rounds, ``P(1, m)`` is still ``epsilon`` short of 1."""
    if m < 2 or not 0 < epsilon < 1:
        raise ValueError("need m >= 2 and 0 < epsilon < 1")
    return (1.0 / (math.e * m)) * (1.0 / float(epsilon)) ** (m - 1)


def si_patience_upper(m: int, t: int) -> float:
    if m < 2 or t < 1:
        raise ValueError("need m >= 2 and t >= 1")
    return math.e * m * t


def patience_lower_eps_optimal(N: int, m: int) -> BoundReport:
    """``epsilon = 1 - 4 m**(-N/2)`` and patience floor ``2**(m**(N/3))``."""
    if N < 1 or m < 2:
        raise ValueError("need N >= 1 and m >= 2")
    eps = 1 - 4 / _rational_power(m, N, 2)
    flags = ["asymptotic"]
    if eps <= 0:
        flags.append("vacuous")
    return BoundReport(
        "patience_lower_eps_optimal",
        {"N": N, "m": m, "epsilon": eps},
        HugePower(2, _power_of(m, N, 3)),
        flags=tuple(flags),
        direction="lower",
    )


def si_lower_iterations(N: int, m: int) -> BoundReport:
    """Fewer than ``2**(m**(N/4))`` SI rounds leave position 1 below ``4 m**(-N/2)``."""
    if N < 1 or m < 2:
        raise ValueError("need N >= 1 and m >= 2")
    valuation_bound = 4 / _rational_power(m, N, 2)
    flags = ["asymptotic"]
    if valuation_bound >= 1:
        flags.append("vacuous")
    return BoundReport(
        "si_lower_iterations",
        {"N": N, "m": m, "valuation_bound": valuation_bound},
        HugePower(2, _power_of(m, N, 4)),
        flags=tuple(flags),
        direction="lower",
    )


def _rational_power(m: int, num: int, den: int):
    """``m ** (num/den)``: exact Fraction when integral, else float."""
    p = _power_of(m, num, den)
    return Fraction(p) if isinstance(p, int) else p


def check_trace_against_bounds(trace, reports: list[BoundReport]) -> list[BoundReport]:
    """Fill ``observed``/``satisfied`` from scheduled valuations.

    For each report the largest valuation at ``report.position`` over records
    whose ``t`` falls in ``report.t_range`` is compared with the bound (the
    valuations are nondecreasing in ``t``, so this is the binding one).
    """
    if not trace:
        return []
    n = len(trace[0].valuation) - 2
    out = []
    for rep in reports:
        if "N" in rep.parameters and rep.parameters["N"] != n:
            raise ValueError(
                f"{rep.name} is for N={rep.parameters['N']}, trace has N={n}"
            )
        lo, hi = rep.t_range or (1, None)
        vals = [
            rec.valuation[rep.position]
            for rec in trace
            if rec.t >= lo and (hi is None or rec.t <= hi)
        ]
        if not vals:
            out.append(rep)
            continue
        observed = max(vals)
        out.append(replace(rep, observed=observed, satisfied=rep.compare(observed)))
    return out
