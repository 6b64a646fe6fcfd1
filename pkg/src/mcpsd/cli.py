"""Command-line front end.

Exit codes: 0 success, 1 configuration error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional, Sequence

import numpy as np

from . import experiment as ex
from .core import SamplingPattern
from .errors import McpsdError, NumericalError
from .patterns import diagnose, golomb_ruler, random_pattern, ruler_orders, threshold_sweep
from .synth import generate

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2


def _int_list(text: str) -> list[int]:
    """Parse ``"1,2,7"`` or a range ``"10:26"`` / ``"10:26:2"`` (stop exclusive)."""
    if ":" in text:
        parts = [int(p) for p in text.split(":")]
        return list(range(*parts))
    return [int(p) for p in text.split(",") if p.strip()]


def _write(text: str, out: Optional[str]) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def _load_config(args) -> ex.ExperimentConfig:
    if args.config and args.preset:
        raise ex.ConfigError("config", "give either --config or --preset, not both")
    if args.config:
        cfg = ex.ExperimentConfig.load(args.config)
    elif args.preset:
        cfg = ex.preset(args.preset)
    else:
        raise ex.ConfigError("config", "one of --config or --preset is required")
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if getattr(args, "trials", None) is not None:
        changes["trials"] = args.trials
    if getattr(args, "N", None) is not None:
        changes["N"] = args.N
    return cfg.with_(**changes) if changes else cfg


def _common(p: argparse.ArgumentParser, config: bool = True) -> None:
    if config:
        p.add_argument("--config", metavar="PATH", help="JSON experiment configuration")
        p.add_argument("--preset", metavar="NAME", help=f"one of: {', '.join(sorted(ex.PRESETS))}")
    p.add_argument("--seed", type=int, help="master seed (overrides config)")
    p.add_argument("--jobs", type=int, default=1, help="concurrent trials")
    p.add_argument("--out", metavar="PATH", help="output path (default stdout)")


def cmd_estimate(args) -> int:
    cfg = _load_config(args).with_(trials=1)
    result = ex.run_experiment(cfg, jobs=args.jobs)
    _write(ex.estimates_csv(result), args.out)
    print(json.dumps(result.summary()), file=sys.stderr)
    return EXIT_OK


def cmd_experiment(args) -> int:
    cfg = _load_config(args)
    result = ex.run_experiment(cfg, jobs=args.jobs)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        _write(ex.estimates_csv(result), os.path.join(args.out, "estimates.csv"))
        _write(ex.metrics_csv(result), os.path.join(args.out, "metrics.csv"))
    else:
        _write(ex.metrics_csv(result), None)
    print(json.dumps(result.summary()), file=sys.stderr)
    return EXIT_OK


def cmd_consistency(args) -> int:
    cfg = _load_config(args)
    points = ex.consistency_curve(cfg, _int_list(args.n_list), jobs=args.jobs)
    _write(ex.consistency_csv(points), args.out)
    return EXIT_OK


def cmd_tradeoff(args) -> int:
    _write(ex.emit_tradeoff_table(_int_list(args.L_range), args.W, args.s), args.out)
    return EXIT_OK


def cmd_pattern(args) -> int:
    lines = []
    if args.action == "ruler":
        orders = ruler_orders() if args.order is None else [args.order]
        lines.append("order,length,marks")
        for o in orders:
            r = golomb_ruler(o)
            lines.append(f"{o},{r.length},\"{' '.join(map(str, r.marks))}\"")
    elif args.action == "sweep":
        pts = threshold_sweep(args.L, _int_list(args.q_range), args.trials,
                              args.seed or 0, jobs=args.jobs)
        lines.append("q,ratio,fractionFullRank,meanCondition")
        for p in pts:
            ratio = args.L / (p.q * (p.q - 1) + 1)
            lines.append(f"{p.q},{ratio!r},{p.fraction_full_rank!r},{p.mean_condition!r}")
    else:
        if args.action == "random":
            if args.q is None:
                raise ex.ConfigError("q", "required for 'pattern random'")
            pattern = random_pattern(args.L, args.q, args.seed or 0)
        else:
            if not args.offsets:
                raise ex.ConfigError("offsets", "required for 'pattern diagnose'")
            pattern = SamplingPattern(args.L, _int_list(args.offsets))
        d = diagnose(pattern)
        lines.append("L,q,offsets,rank,fullRank,conditionNumber,ratio")
        lines.append(
            f"{pattern.L},{pattern.q},\"{' '.join(map(str, pattern.offsets))}\","
            f"{d.rank},{str(d.full_rank).lower()},{d.condition_number!r},{d.ratio!r}"
        )
    _write("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_synth(args) -> int:
    cfg = _load_config(args)
    seed = cfg.seed if args.seed is None else args.seed
    x = generate(cfg.process, args.length, seed)
    body = "\n".join(f"{k},{v!r}" for k, v in enumerate(x.samples.tolist()))
    _write("index,value\n" + body + "\n", args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mcpsd", description="Multi-coset sub-Nyquist power spectrum estimation"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="single-realization estimate, CSV per subband")
    _common(p)
    p.add_argument("--N", type=int, help="samples per channel (overrides config)")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("experiment", help="Monte Carlo run; --out DIR gets estimates.csv and metrics.csv")
    _common(p)
    p.add_argument("--trials", type=int)
    p.add_argument("--N", type=int)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("consistency", help="mean squared error versus N")
    _common(p)
    p.add_argument("--trials", type=int)
    p.add_argument("--n-list", default="50,500,5000,50000")
    p.set_defaults(func=cmd_consistency)

    p = sub.add_parser("tradeoff", help="minimum channel counts versus L")
    _common(p, config=False)
    p.add_argument("--L-range", dest="L_range", default="2:1026:2")
    p.add_argument("--W", type=float, default=2e9, help="Nyquist rate in Hz")
    p.add_argument("--s", type=int, help="sparsity for the compressive columns")
    p.set_defaults(func=cmd_tradeoff)

    p = sub.add_parser("pattern", help="Golomb rulers, random patterns, diagnostics")
    _common(p, config=False)
    p.add_argument("action", choices=["ruler", "random", "diagnose", "sweep"])
    p.add_argument("--order", type=int)
    p.add_argument("--L", type=int, default=64)
    p.add_argument("--q", type=int)
    p.add_argument("--offsets", help="comma-separated offsets for 'diagnose'")
    p.add_argument("--q-range", default="10:30")
    p.add_argument("--trials", type=int, default=500, help="patterns per q for 'sweep'")
    p.set_defaults(func=cmd_pattern)

    p = sub.add_parser("synth", help="dump one Nyquist-rate realization as CSV")
    _common(p)
    p.add_argument("--length", type=int, default=4096)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (McpsdError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
