"""Property suites behind ``purgatorio verify``.

Every suite returns a JSON-ready dict ``{"suite", "params", "properties":
[{"name", "passed", "checked", "counterexample"}], "passed"}``.
"""

from __future__ import annotations

import itertools
import math
import random

from . import analysis, bestreply, matgame, purgatory, solvers
from .core import Game, NumericMode, Rational, format_scalar, scalar_to_json

SUITES = (
    "matgame-oracle",
    "si-lemmas",
    "vi-si-sync",
    "vi-bounds",
    "adversary-mc",
    "best-reply-brute",
)

# Exact runs whose denominators outgrow (or are projected to outgrow) this many
# bits before the target iteration are reported as failures.
DEFAULT_MAX_BITS = 1 << 25


class Property:
    def __init__(self, name: str):
        self.name = name
        self.checked = 0
        self.counterexample = None

    def check(self, ok: bool, payload=None) -> bool:
        self.checked += 1
        if not ok and self.counterexample is None:
            self.counterexample = payload if payload is not None else {}
        return ok

    def fail(self, payload) -> None:
        if self.counterexample is None:
            self.counterexample = payload

    @property
    def passed(self) -> bool:
        return self.counterexample is None

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "checked": self.checked,
            "counterexample": self.counterexample,
        }


def _report(suite: str, params: dict, props: list[Property]) -> dict:
    return {
        "suite": suite,
        "params": params,
        "properties": [p.to_dict() for p in props],
        "passed": all(p.passed for p in props),
    }


def random_unit_rational(rng: random.Random, max_den: int = 1000) -> Rational:
    den = rng.randint(1, max_den)
    return Rational(rng.randrange(0, den), den)


def matgame_oracle(samples: int = 1000, seed: int = 0, pairs: int = 100) -> dict:
    rng = random.Random(seed)
    oracle = Property("lp_equals_closed_form")
    guarantee = Property("guarantee_inequalities")
    for _ in range(samples):
        z = random_unit_rational(rng)
        m = rng.randint(2, 6)
        M = matgame.triangular_matrix(z, m)
        lp = matgame.solve_matrix_game(M)
        value, row = matgame.triangular_row(z, m)
        oracle.check(
            lp.value == value and lp.row_strategy == row,
            {"z": format_scalar(z), "m": m},
        )
        low, high = matgame.guarantees(M, lp)
        guarantee.check(low >= lp.value >= high, {"z": format_scalar(z), "m": m})
    mono = Property("closed_form_monotone_in_z")
    for _ in range(pairs):
        m = rng.randint(2, 6)
        a, b = random_unit_rational(rng), random_unit_rational(rng)
        while a == b or a == 0 or b == 0:
            a, b = random_unit_rational(rng), random_unit_rational(rng)
        y, z = min(a, b), max(a, b)
        py, pz = matgame.triangular_row(y, m)[1], matgame.triangular_row(z, m)[1]
        mono.check(
            py[0] < pz[0] and py[-1] > pz[-1],
            {"y": format_scalar(y), "z": format_scalar(z), "m": m},
        )
    return _report(
        "matgame-oracle", {"samples": samples, "seed": seed}, [oracle, guarantee, mono]
    )


def _max_bits(x) -> int:
    return max(q.denominator.bit_length() for p in x for q in p)


class BitBudget:
    """Decides when an exact run can no longer reach its target iteration.

    Besides the current denominator size, the size at ``target`` is
    extrapolated from the log-log slope of the last two iterations, so runs
    whose denominators grow exponentially stop after a dozen steps instead of
    grinding for minutes.  Polynomial growth extrapolates accurately.
    """

    PROJECT_FROM = 1 << 12

    def __init__(self, target: int, max_bits: int):
        self.target = target
        self.max_bits = max_bits
        self.last = None

    def exceeded(self, t: int, bits: int) -> dict | None:
        info = None
        if bits > self.max_bits:
            info = {"t": t, "denominator_bits": bits, "max_bits": self.max_bits}
        elif self.last is not None and bits >= self.PROJECT_FROM and t < self.target:
            t0, b0 = self.last
            if bits > b0 and t > t0 > 0:
                slope = math.log(bits / b0) / math.log(t / t0)
                projected = bits * (self.target / t) ** slope
                if projected > self.max_bits:
                    info = {
                        "t": t,
                        "denominator_bits": bits,
                        "projected_bits_at_target": float(projected),
                        "target": self.target,
                        "max_bits": self.max_bits,
                    }
        self.last = (t, bits)
        return info


def si_lemmas(
    N: int, m: int, iters: int, max_bits: int = DEFAULT_MAX_BITS, compare_vi: bool = False
) -> dict:
    """Structural lemmas for exact strategy iteration on ``P(N, m)``.

    ``compare_vi`` also runs exact value iteration alongside; its denominators
    grow exponentially once ``N >= 2``, so it only suits short runs.
    """
    names = [
        "values_positive",
        "values_below_one",
        "values_increasing_in_position",
        "strategies_fully_mixed",
        "reply_all_ones",
        "last_action_increasing_in_position",
        "product_formula",
        "position_one_matches_one_position_game",
        "patience_at_most_e_m_t",
        "si_valuation_monotone",
        "exact_arithmetic_budget",
    ]
    if compare_vi:
        names.insert(-1, "vi_below_si")
    props = {n: Property(n) for n in names}
    game = purgatory.build(N, m)
    big = solvers.iter_strategy_iteration(game)
    small = solvers.iter_strategy_iteration(purgatory.build(1, m))
    vi = solvers.iter_value_iteration(game) if compare_vi else itertools.repeat((None, None))
    prev = None
    budget = BitBudget(iters, max_bits)
    for (t, v, x, y), (_, _, xh, _), (_, vt) in zip(big, small, vi):
        at = {"t": t}
        props["values_positive"].check(all(v[i] > 0 for i in range(1, N + 1)), at)
        props["values_below_one"].check(all(v[i] < 1 for i in range(1, N + 1)), at)
        props["values_increasing_in_position"].check(
            all(v[i] > v[i - 1] for i in range(2, N + 1)), at
        )
        props["strategies_fully_mixed"].check(
            all(0 < q < 1 for p in x for q in p), at
        )
        props["reply_all_ones"].check(all(a == 1 for a in y), {**at, "reply": list(y)})
        # x^1 is uniform everywhere, so the inequality is strict from t = 2 on.
        if t == 1:
            ok = all(x[i - 2][-1] == x[i - 1][-1] for i in range(2, N + 1))
        else:
            ok = all(x[i - 2][-1] < x[i - 1][-1] for i in range(2, N + 1))
        props["last_action_increasing_in_position"].check(ok, at)
        ok = True
        for i in range(1, N):
            prod = math.prod(x[j - 1][0] for j in range(1, i + 1))
            ok &= v[1] / v[i + 1] == prod
        props["product_formula"].check(ok, at)
        props["position_one_matches_one_position_game"].check(x[0] == xh[0], at)
        pat = 1 / min(q for p in x for q in p)
        props["patience_at_most_e_m_t"].check(
            pat <= analysis.si_patience_upper(m, t),
            {**at, "patience": float(pat)},
        )
        if prev is not None:
            props["si_valuation_monotone"].check(
                all(a >= b for a, b in zip(v, prev)), at
            )
        if compare_vi:
            props["vi_below_si"].check(all(a <= b for a, b in zip(vt, v)), at)
        prev = v
        if t >= iters:
            break
        bits = max(_max_bits(x), _max_bits(xh), _max_bits((v, vt) if compare_vi else (v,)))
        over = budget.exceeded(t, bits)
        if not props["exact_arithmetic_budget"].check(over is None, over):
            break
    return _report(
        "si-lemmas",
        {"positions": N, "actions": m, "iters": iters, "max_bits": max_bits},
        list(props.values()),
    )


def vi_si_sync(m: int, iters: int, max_bits: int = DEFAULT_MAX_BITS) -> dict:
    """Exact VI and SI valuations coincide on the one-position game ``P(1, m)``."""
    same = Property("si_equals_vi")
    budget_prop = Property("exact_arithmetic_budget")
    game = purgatory.build(1, m)
    budget = BitBudget(iters, max_bits)
    pairs = zip(solvers.iter_strategy_iteration(game), solvers.iter_value_iteration(game))
    for (t, v, x, _), (_, vt) in pairs:
        same.check(v == vt, {"t": t, "si": scalar_to_json(v[1]), "vi": scalar_to_json(vt[1])})
        if t >= iters:
            break
        over = budget.exceeded(t, max(_max_bits(x), _max_bits((v, vt))))
        if not budget_prop.check(over is None, over):
            break
    return _report(
        "vi-si-sync", {"actions": m, "iters": iters, "max_bits": max_bits}, [same, budget_prop]
    )


def vi_bounds(iters: int = 10_000, actions=(2, 3, 5)) -> dict:
    one = Property("one_position_strictly_below_bound")
    for m in actions:
        mode = NumericMode.EXACT if m == 2 and iters <= 2000 else NumericMode.FLOAT
        for t, v in solvers.iter_value_iteration(purgatory.build(1, m), mode):
            bound = analysis.one_pos_value_upper(m, t)
            one.check(v[1] < bound, {"m": m, "t": t, "value": scalar_to_json(v[1])})
            if t >= iters:
                break
    many = Property("many_positions_below_bound")
    for N, k in ((4, 2), (5, 2), (5, 3)):
        bound, horizon = analysis.many_pos_value_upper(N, 2, k)
        T = min(horizon.value(), 1 << 16, iters)
        sched = solvers.TraceSchedule((T,))
        rec = solvers.value_iteration(purgatory.build(N, 2), T, sched, NumericMode.FLOAT)[0]
        many.check(rec.valuation[1] <= bound, {"N": N, "k": k, "T": T})
    return _report("vi-bounds", {"iters": iters}, [one, many])


def adversary_mc(
    strategies: int = 20, trials: int = 100_000, seed: int = 7, configs=((2, 64), (3, 27))
) -> dict:
    rng = random.Random(seed)
    prop = Property("win_frequency_within_bound")
    for m, T in configs:
        bound = float(analysis.one_pos_value_upper(m, T))
        sigma = math.sqrt(bound * (1 - bound) / trials)
        for s in range(strategies):
            weights = [rng.random() for _ in range(m)]
            total = sum(weights)
            dante = tuple(w / total for w in weights)
            freq = purgatory.simulate_one_pos_adversary(
                dante, m, T, trials, seed=seed * 1000 + s
            )
            prop.check(
                freq <= bound + 3 * sigma,
                {"m": m, "T": T, "dante": list(dante), "frequency": freq, "bound": bound},
            )
    return _report(
        "adversary-mc",
        {"strategies": strategies, "trials": trials, "seed": seed},
        [prop],
    )


def random_game(rng: random.Random, N: int, m: int) -> Game:
    return Game(
        N,
        m,
        [[[rng.randint(0, N + 1) for _ in range(m)] for _ in range(m)] for _ in range(N)],
    )


def random_fully_mixed(rng: random.Random, N: int, m: int):
    strategy = []
    for _ in range(N):
        w = [rng.randint(1, 20) for _ in range(m)]
        s = sum(w)
        strategy.append(tuple(Rational(a, s) for a in w))
    return tuple(strategy)


def best_reply_brute(samples: int = 200, seed: int = 0) -> dict:
    rng = random.Random(seed)
    dominated = Property("optimal_against_every_pure_reply")
    bellman = Property("bellman_optimality")
    dead = Property("avoid_set_has_value_zero")
    for _ in range(samples):
        N, m = rng.randint(1, 3), rng.randint(1, 3)
        game = random_game(rng, N, m)
        x = random_fully_mixed(rng, N, m)
        res = bestreply.best_reply(game, x)
        payload = {"game": game.to_json(), "x": [[format_scalar(q) for q in p] for p in x]}
        ok = True
        for y in itertools.product(range(1, m + 1), repeat=N):
            other = bestreply.reach_probabilities(game, x, y)
            ok &= all(a <= b for a, b in zip(res.values, other))
        dominated.check(ok, payload)
        residual, bad = bestreply.bellman_residual(game, x, res)
        bellman.check(residual == 0 and not bad, payload)
        dead.check(all(res.values[i] == 0 for i in bestreply.avoid_set(game, x)), payload)
    return _report(
        "best-reply-brute", {"samples": samples, "seed": seed}, [dominated, bellman, dead]
    )
