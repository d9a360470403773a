"""Command-line entry point.

Exit status: 0 on success, 2 on invalid arguments, 3 when the requested
reduced model does not exist for the given parameters.
"""

from __future__ import annotations

import argparse
import sys

from . import experiments as ex
from . import spectral, svg
from .graph import GraphSpec, check_vertex
from .protocols import (BACKENDS, INITS, default_switch_time, exact_or_asymptotic, run_search,
                        run_state_transfer, run_switch_transfer)
from .reduced import SEARCH, STA_DIFF, STA_SAME, InfeasibleModel

SWEEP_NAMES = {"search": SEARCH, "same": STA_SAME, "diff": STA_DIFF, "switch": ex.SWITCH}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(2)


def _common(p, sweep=False):
    if sweep:
        p.add_argument("--n", type=int, nargs="+", default=list(ex.DEFAULT_N))
        p.add_argument("--m", type=int, nargs="+", default=list(ex.DEFAULT_M))
    else:
        p.add_argument("--n", type=int, default=40, help="vertices per partition")
        p.add_argument("--m", type=int, default=100, help="number of partitions")
        p.add_argument("--loop-weight", type=float, default=1.0)
        p.add_argument("--steps", type=int, default=None)
    p.add_argument("--backend", choices=BACKENDS + (("auto",) if sweep else ()),
                   default="auto" if sweep else "full")
    p.add_argument("--out", default=None, help="output file (default: standard output)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--svg", default=None, help="also write a plot here")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qwalk", description="Quantum walk search and state transfer "
                                                "on complete M-partite graphs with loops.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("search", help="single marked vertex search")
    _common(p)
    p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("transfer", help="state transfer with sender and receiver marked")
    _common(p)
    p.add_argument("--config", choices=ex.CONFIGS, default="same")
    p.add_argument("--init", choices=INITS, default="loop")
    p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("switch", help="transfer with an active switch; --steps is T")
    _common(p)
    p.add_argument("--config", choices=ex.CONFIGS, default="same")
    p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("sweep", help="gap metric over an (N, M) grid with a log-log fit")
    p.add_argument("scenario", choices=tuple(SWEEP_NAMES))
    _common(p, sweep=True)
    p.add_argument("--config", choices=ex.CONFIGS, default="same",
                   help="placement for the switch sweep")

    p = sub.add_parser("figure", help="regenerate figure data and plot")
    p.add_argument("number", type=int)
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--backend", choices=BACKENDS, default="full")
    return parser


def _emit(text: str, out) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _vertices(spec, args, config):
    if args.seed is not None:
        return ex.random_vertices(spec, config, args.seed)
    s, r = ex.default_vertices(config)
    check_vertex(spec, s)
    check_vertex(spec, r)
    return s, r


def _run(args) -> None:
    if args.command == "figure":
        res = ex.figure(args.number, args.out, args.backend)
        for f in res.files:
            print(f, file=sys.stderr)
        for k, v in res.checks.items():
            print(f"{k} = {v:.6g}")
        return

    if args.command == "sweep":
        res = ex.sweep(SWEEP_NAMES[args.scenario], args.n, args.m, args.backend, args.config)
        _emit(ex.sweep_to_csv(res) if args.format == "csv" else ex.sweep_to_json(res), args.out)
        if args.svg:
            slopes = (1,) if args.scenario in ("search", "same") else (1, 2)
            svg.write(ex.sweep_plot(res, f"{args.scenario} sweep", slopes), args.svg)
        print(f"slope = {res.slope:.4f}  rms = {res.rms:.4f}", file=sys.stderr)
        return

    spec = GraphSpec(args.m, args.n, args.loop_weight)
    if args.steps is not None and args.steps < 0:
        raise ValueError(f"--steps must be >= 0, got {args.steps}")
    overlay = None
    if args.command == "search":
        if args.seed is not None:
            m = ex.random_vertices(spec, "diff", args.seed)[0]
        else:
            m = ex.default_vertices()[0]
            check_vertex(spec, m)
        steps = args.steps if args.steps is not None else 2 * default_switch_time(spec)
        rec = run_search(spec, m, steps, args.backend)
        if spec.loop_weight == 1.0 and spec.N >= 2:
            c = spectral.search_curve(spec, rec.t)
            overlay = (rec.t, c.total, c.loop)
    elif args.command == "transfer":
        s, r = _vertices(spec, args, args.config)
        if args.steps is not None:
            steps = args.steps
        elif args.config == "same":
            steps = 2 * int(round(exact_or_asymptotic(
                lambda a: spectral.sta_same_first_max(spec, a)[0])))
        else:
            steps = 2 * int(round(exact_or_asymptotic(lambda a: spectral.sta_diff_T(spec, a))))
        rec = run_state_transfer(spec, s, r, args.init, steps, args.backend)
    else:
        s, r = _vertices(spec, args, args.config)
        T = args.steps if args.steps is not None else default_switch_time(spec)
        rec, _ = run_switch_transfer(spec, s, r, T, args.backend)
    _emit(ex.record_to_csv(rec) if args.format == "csv" else ex.record_to_json(rec), args.out)
    if args.svg:
        svg.write(ex.curve_plot(rec, overlay, f"{args.command} N={spec.N} M={spec.M}"), args.svg)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        _run(args)
    except InfeasibleModel as e:
        print(f"qwalk: infeasible: {e}", file=sys.stderr)
        return 3
    except ValueError as e:
        print(f"qwalk: error: {e}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
