"""Command-line interface.

Subcommands: generate, run, sweep, curves, compare, plot.  Exit codes:
0 success, 1 validation/configuration error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from . import bench
from .bench import ConfigError, RunConfig, SchemaError
from .instance import (
    GeneratorParams,
    InfeasibleGeneration,
    ParseError,
    ValidationError,
    generate_instance,
    write_instance,
)

_VALIDATION_ERRORS = (
    ConfigError,
    SchemaError,
    ParseError,
    ValidationError,
    ValueError,
    FileNotFoundError,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cbqs",
        description="Biased constrained search benchmarks for gapped knapsack problems",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a random instance file")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--weight-range", type=int, default=1000)
    gen.add_argument("--capacity-fraction", type=float, default=0.5)
    gen.add_argument("--gap-fraction", type=float, default=0.05)
    gen.add_argument("--output", required=True)

    run = sub.add_parser("run", help="run one algorithm, write a trajectory CSV")
    run.add_argument("--config", help="config file; flags override its values")
    run.add_argument("--print-defaults", action="store_true")
    _add_config_overrides(run)

    sweep = sub.add_parser("sweep", help="cross product over f, depth and orderings")
    sweep.add_argument("--config", help="base config file")
    sweep.add_argument("--f", type=float, nargs="+", default=[0.0])
    sweep.add_argument("--depth", type=int, nargs="+", default=[0, 1, 2, 3, 4, 5])
    sweep.add_argument(
        "--orderings", nargs="+", default=["none"], choices=bench.ORDERINGS
    )
    sweep.add_argument("--out-dir", required=True)
    sweep.add_argument("--jobs", type=int, default=1)
    _add_config_overrides(sweep)

    curves = sub.add_parser("curves", help="success-probability tables")
    curves.add_argument("--p", type=float, nargs="+", required=True)
    curves.add_argument("--t-max", type=float, default=65536.0)
    curves.add_argument("--points", type=int, default=17)
    curves.add_argument("--mc-trials", type=int, default=20000)
    curves.add_argument("--seed", type=int, default=0)
    curves.add_argument("--output", required=True)

    comp = sub.add_parser("compare", help="merge trajectory CSVs into one table")
    comp.add_argument("inputs", nargs="+")
    comp.add_argument("--output", required=True)

    plot = sub.add_parser("plot", help="render a figure from benchmark CSVs")
    plot.add_argument("--kind", required=True, choices=("trajectory", "curves", "sweep"))
    plot.add_argument("--input", nargs="+", required=True)
    plot.add_argument("--output", required=True)
    plot.add_argument("--x", default="auto")
    plot.add_argument("--logx", action="store_true")
    plot.add_argument("--logy", action="store_true")
    return parser


_CONFIG_FLAGS = {
    "algorithm": str,
    "instance_path": str,
    "gen_n": int,
    "gen_seed": int,
    "bias_b": float,
    "bias_f": float,
    "lookahead_depth": int,
    "lookahead_blend": float,
    "ordering": str,
    "ordering_seed": int,
    "mode": str,
    "max_oracle_calls": int,
    "max_modeled_seconds": float,
    "max_wall_seconds": float,
    "sa_iters": int,
    "sa_t0": float,
    "sa_cooling": float,
    "gw_trials": int,
    "gw_sweeps": int,
    "seed": int,
    "output": str,
}


def _add_config_overrides(parser: argparse.ArgumentParser) -> None:
    for name, typ in _CONFIG_FLAGS.items():
        parser.add_argument(f"--{name.replace('_', '-')}", type=typ, default=None)


def _config_from_args(args) -> RunConfig:
    config = bench.read_config(args.config) if args.config else RunConfig()
    overrides = {}
    for name in _CONFIG_FLAGS:
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    return replace(config, **overrides)


def _cmd_generate(args) -> int:
    inst = generate_instance(
        args.n,
        args.seed,
        GeneratorParams(
            weight_range=args.weight_range,
            capacity_fraction=args.capacity_fraction,
            gap_fraction=args.gap_fraction,
        ),
    )
    write_instance(inst, args.output)
    print(f"wrote {args.output} (n={inst.n}, c={inst.capacity}, epsilon={inst.gap})")
    return 0


def _cmd_run(args) -> int:
    if args.print_defaults:
        sys.stdout.write(bench.config_to_text(RunConfig()))
        return 0
    config = _config_from_args(args)
    rows = bench.execute_run(config)
    if rows:
        best = rows[-1]
        print(f"final value {best.incumbent_value} after {best.oracle_calls} oracle calls")
    else:
        print("no feasible incumbent recorded")
    if config.output:
        print(f"wrote {config.output}")
    return 0


def _cmd_sweep(args) -> int:
    base = _config_from_args(args)
    summary = bench.sweep(
        base,
        f_values=args.f,
        depths=args.depth,
        orderings=args.orderings,
        out_dir=args.out_dir,
        jobs=args.jobs,
    )
    print(f"wrote {summary}")
    return 0


def _cmd_curves(args) -> int:
    if args.points < 2 or args.t_max < 2:
        raise ConfigError("need t-max >= 2 and at least two points")
    T_values = _log_grid(args.t_max, args.points)
    rows = bench.curves_table(args.p, T_values, mc_trials=args.mc_trials, seed=args.seed)
    bench.write_curves_csv(args.output, rows)
    print(f"wrote {args.output} ({len(rows)} rows)")
    return 0


def _log_grid(t_max: float, points: int) -> list[float]:
    import math

    hi = math.log2(t_max)
    return [2.0 ** (hi * i / (points - 1)) for i in range(points)]


def _cmd_compare(args) -> int:
    merged = bench.compare(args.inputs, args.output)
    print(f"wrote {args.output} ({len(merged)} rows)")
    return 0


def _cmd_plot(args) -> int:
    from .plotting import FigureSpec, render

    spec = FigureSpec(
        kind=args.kind,
        inputs=tuple(args.input),
        output=args.output,
        x_field=args.x,
        logx=args.logx,
        logy=args.logy,
    )
    render(spec)
    print(f"wrote {args.output}")
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "run": _cmd_run,
    "sweep": _cmd_sweep,
    "curves": _cmd_curves,
    "compare": _cmd_compare,
    "plot": _cmd_plot,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except InfeasibleGeneration as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except _VALIDATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # runtime failures
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
