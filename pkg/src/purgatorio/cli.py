"""Command-line interface.

Exit codes: 0 success, 1 property failure, 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import analysis, purgatory, solvers, verify
from .core import Game, GameError, NumericMode, format_scalar

# Position-1 valuations after 10**k strategy improvements on P(7, 2), k = 0..8.
PUBLISHED_TABLE1 = (0.013, 0.035, 0.069, 0.102, 0.134, 0.165, 0.194, 0.223, 0.248)


class UsageError(Exception):
    pass


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _load_game(path: str) -> Game:
    try:
        text = Path(path).read_text()
    except FileNotFoundError:
        raise UsageError(f"game file not found: {path}") from None
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    try:
        return Game.from_json(text)
    except (GameError, TypeError) as exc:
        raise UsageError(f"invalid game file {path}: {exc}") from None


def cmd_generate(args) -> int:
    if args.positions < 1 or args.actions < 1:
        raise UsageError("--positions and --actions must be >= 1")
    _write(purgatory.build(args.positions, args.actions).to_json() + "\n", args.out)
    return 0


def cmd_solve(args) -> int:
    game = _load_game(args.game)
    mode = NumericMode.parse(args.mode)
    if args.iters < 1:
        raise UsageError("--iters must be >= 1")
    try:
        schedule = solvers.TraceSchedule.parse(args.record_at, args.iters)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    run = solvers.value_iteration if args.command == "vi" else solvers.strategy_iteration
    records = run(game, args.iters, schedule, mode, cross_check=args.cross_check)
    _write(solvers.trace_csv(records, game.num_positions), args.out)
    return 0


def table1_rows(max_exponent: int) -> list[dict]:
    """Float64 SI on P(7, 2); position-1 valuation after ``10**k`` improvements."""
    targets = [10**k + 1 for k in range(max_exponent + 1)]
    records = solvers.strategy_iteration(
        purgatory.build(7, 2),
        targets[-1],
        solvers.TraceSchedule(tuple(targets)),
        NumericMode.FLOAT,
    )
    rows = []
    for k, rec in enumerate(records):
        rows.append(
            {
                "improvements": rec.improvements,
                "t": rec.t,
                "valuation": rec.valuation[1],
                "published": PUBLISHED_TABLE1[k] if k < len(PUBLISHED_TABLE1) else None,
                "patience": rec.patience,
            }
        )
    return rows


def cmd_table1(args) -> int:
    if not 0 <= args.max_exponent <= 8:
        raise UsageError("--max-exponent must lie in 0..8")
    rows = table1_rows(args.max_exponent)
    if args.json:
        text = json.dumps(rows, indent=2) + "\n"
    else:
        lines = ["improvements,valuation,published,patience"]
        for r in rows:
            lines.append(
                f"{r['improvements']},{r['valuation']:.6f},{r['published']},{r['patience']:.6g}"
            )
        text = "\n".join(lines) + "\n"
    _write(text, args.out)
    return 0


def cmd_bounds(args) -> int:
    N, m = args.positions, args.actions
    reports = []
    if N == 1 and args.T is not None:
        reports.append(analysis.one_pos_report(m, args.T))
    if args.k is not None:
        try:
            reports.append(analysis.many_pos_report(N, m, args.k))
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    reports.append(analysis.patience_lower_eps_optimal(N, m))
    reports.append(analysis.si_lower_iterations(N, m))
    _write(json.dumps([r.to_dict() for r in reports], indent=2) + "\n", args.out)
    return 0


def cmd_verify(args) -> int:
    suite = args.suite
    if suite == "matgame-oracle":
        report = verify.matgame_oracle(args.samples or 1000, args.seed)
    elif suite == "si-lemmas":
        report = verify.si_lemmas(args.positions, args.actions, args.iters or 50)
    elif suite == "vi-si-sync":
        report = verify.vi_si_sync(args.actions, args.iters or 200)
    elif suite == "vi-bounds":
        report = verify.vi_bounds(args.iters or 10_000)
    elif suite == "adversary-mc":
        report = verify.adversary_mc(args.samples or 20, args.trials, args.seed)
    elif suite == "best-reply-brute":
        report = verify.best_reply_brute(args.samples or 200, args.seed)
    else:
        raise UsageError(f"unknown suite {suite!r}; choose from {', '.join(verify.SUITES)}")
    _write(json.dumps(report, indent=2) + "\n", args.out)
    return 0 if report["passed"] else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="purgatorio",
        description="Value and strategy iteration on concurrent reachability games.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write the Generalized Purgatory game P(N, m)")
    p.add_argument("--positions", type=int, required=True)
    p.add_argument("--actions", type=int, required=True)
    p.add_argument("--out", "-o")
    p.set_defaults(func=cmd_generate)

    for name in ("vi", "si"):
        p = sub.add_parser(
            name,
            help="value iteration" if name == "vi" else "strategy iteration",
        )
        p.add_argument("game")
        p.add_argument("--iters", type=int, default=100)
        p.add_argument("--mode", help="rational or float (default $PURGATORIO_MODE or rational)")
        p.add_argument("--record-at", default="pow10", help="pow10, all, all:<n> or t1,t2,...")
        p.add_argument("--cross-check", action="store_true",
                       help="verify every closed-form matrix solution against the LP")
        p.add_argument("--out", "-o")
        p.set_defaults(func=cmd_solve)

    p = sub.add_parser("table1", help="strategy iteration on P(7,2) at 10^k improvements")
    p.add_argument("--max-exponent", type=int, default=5)
    p.add_argument("--json", action="store_true")
    p.add_argument("--out", "-o")
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("bounds", help="evaluate the closed-form bounds for P(N, m)")
    p.add_argument("--positions", type=int, required=True)
    p.add_argument("--actions", type=int, required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--T", type=int)
    p.add_argument("--out", "-o")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("verify", help=f"run a property suite: {', '.join(verify.SUITES)}")
    p.add_argument("suite")
    p.add_argument("--positions", type=int, default=3)
    p.add_argument("--actions", type=int, default=2)
    p.add_argument("--iters", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--out", "-o")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ValueError, OverflowError) as exc:
        print(f"purgatorio: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
