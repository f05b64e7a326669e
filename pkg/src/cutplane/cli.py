"""Command-line front end: run experiments, sweeps, plots, and checks.

Exit codes: 0 success, 1 configuration/usage error, 2 runtime failure.
``NO_COLOR`` in the environment disables the colored pass/fail markers.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import checks
from .contextual import make_lowerbound_instance, run_lowerbound_game
from .cutting_plane import LEARNERS, make_learner
from .errors import ConfigError, CutplaneError
from .harness import (
    ExperimentConfig,
    emit_plot,
    run_experiment,
    run_sweep,
    summarize,
    trace_from_csv,
)
from .rng import RngStream

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _color(text, code, stream=sys.stdout):
    if os.environ.get("NO_COLOR") is not None or not stream.isatty():
        return text
    return f"\x1b[{code}m{text}\x1b[0m"


def _ok(flag):
    return _color("pass", "32") if flag else _color("FAIL", "31")


def _build_parser():
    parser = _Parser(prog="cutplane", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment config")
    p_run.add_argument("config", help="path to a JSON experiment config")
    p_run.add_argument("--seed", type=int, default=None,
                       help="override base_seed")
    p_run.add_argument("--output-dir", default=None,
                       help="override output_dir")
    p_run.add_argument("--no-plot", action="store_true",
                       help="skip the SVG plot")

    p_sweep = sub.add_parser("sweep", help="run a config across values of "
                                           "one parameter")
    p_sweep.add_argument("config")
    p_sweep.add_argument("--param", required=True,
                         help="config field to vary (T, d, H, k or full name)")
    p_sweep.add_argument("--values", required=True, nargs="+", type=int)
    p_sweep.add_argument("--seed", type=int, default=None)
    p_sweep.add_argument("--output-dir", default=None)

    p_plot = sub.add_parser("plot", help="plot one or more trace CSVs")
    p_plot.add_argument("traces", nargs="+", help="trace CSV files")
    p_plot.add_argument("--out", default="plot.svg")

    p_lb = sub.add_parser("lowerbound", help="run the packing lower-bound "
                                             "experiment for every learner")
    p_lb.add_argument("--dim", type=int, required=True)
    p_lb.add_argument("--list-size", type=int, default=None,
                      help="H (default: floor(sqrt(|S|)))")
    p_lb.add_argument("--rounds", type=int, default=None,
                      help="rounds per draw (default: floor(0.1 sqrt(|S|)))")
    p_lb.add_argument("--draws", type=int, default=8)
    p_lb.add_argument("--seed", type=int, default=0)

    p_verify = sub.add_parser("verify", help="run the geometric property "
                                             "suite and print per-lemma "
                                             "results")
    p_verify.add_argument("--dim", type=int, default=None,
                          help="check a single dimension (default: 2 and 3)")
    p_verify.add_argument("--budget", choices=("small", "full"),
                          default="small")
    p_verify.add_argument("--seed", type=int, default=20260824)
    return parser


def _cmd_run(args):
    cfg = ExperimentConfig.from_json(args.config)
    if args.seed is not None:
        cfg.base_seed = args.seed
    if args.output_dir is not None:
        cfg.output_dir = args.output_dir
    cfg.validate()
    traces = run_experiment(cfg)
    if not args.no_plot:
        emit_plot(traces, os.path.join(cfg.output_dir, "plot.svg"))
    print(json.dumps(summarize(cfg, traces), indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_sweep(args):
    cfg = ExperimentConfig.from_json(args.config)
    if args.seed is not None:
        cfg.base_seed = args.seed
    if args.output_dir is not None:
        cfg.output_dir = args.output_dir
    cfg.validate()
    results = run_sweep(cfg, args.param, args.values)
    for value, sub_cfg, traces in results:
        s = summarize(sub_cfg, traces)
        print(f"{args.param}={value}: mean_cum_regret="
              f"{s['mean_cum_regret']:.6f} slope_vs_logT="
              f"{s['slope_vs_logT']:.6f}")
    return EXIT_OK


def _cmd_plot(args):
    traces = []
    for i, path in enumerate(args.traces):
        traces.append(trace_from_csv(path, stream_id=i))
    emit_plot(traces, args.out)
    print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_lowerbound(args):
    if args.dim < 3:
        raise ConfigError("dim", "the lower-bound instance needs dim >= 3")
    probe = make_lowerbound_instance(args.dim, RngStream(args.seed, 0))
    n_pack = len(probe.packing)
    H = args.list_size
    if H is None:
        H = max(2, int(np.sqrt(n_pack)))
    m = args.rounds
    if m is None:
        m = int(0.1 * np.sqrt(n_pack))
    print(f"packing size |S|={n_pack}  H={H}  rounds={m}  draws={args.draws}")
    if m < 1:
        print("no rounds at this scale (m = 0); every learner trivially "
              "meets the bound")
        return EXIT_OK
    # modest sampling budgets: this command is a diagnostic, and the
    # adversary's feedback does not depend on the proposal quality
    diag_params = {
        "steiner_centroid": dict(n=256, chains=128, adaptive=False),
        "centroid": dict(n=256, chains=128),
        "curvature_random": dict(pieces_cap=64, n=32, n_radii=8),
        "steiner_doubling": dict(n=256, chains=128, adaptive=False),
    }
    for name in sorted(LEARNERS):
        totals = []
        for draw in range(args.draws):
            inst = make_lowerbound_instance(args.dim,
                                            RngStream(args.seed, draw))
            learner = make_learner(name, **diag_params.get(name, {}))
            steps = run_lowerbound_game(inst, learner, H, m,
                                        RngStream(args.seed + 1, draw))
            totals.append(sum(s.regret for s in steps))
        print(f"{name:20s} mean regret over {m} rounds: "
              f"{float(np.mean(totals)):.4f}")
    return EXIT_OK


def _cmd_verify(args):
    dims = (args.dim,) if args.dim is not None else (2, 3)
    if args.budget == "small":
        kwargs = dict(n_polytopes=3, mc_budget=20_000, grunbaum_samples=4096,
                      path_probes=10)
    else:
        kwargs = dict(n_polytopes=50, mc_budget=100_000,
                      grunbaum_samples=16384, path_probes=100)
    all_ok = True
    for d in dims:
        results = checks.run_geometry_checks(d, RngStream(args.seed, d),
                                             **kwargs)
        summary = checks.summarize_checks(results)
        print(f"dimension {d}:")
        for lemma, (total, failed) in summary.items():
            ok = failed == 0
            all_ok &= ok
            print(f"  {lemma:20s} {_ok(ok)}  ({total - failed}/{total})")
    return EXIT_OK if all_ok else EXIT_RUNTIME


def cli_main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    handlers = {
        "run": _cmd_run,
        "sweep": _cmd_sweep,
        "plot": _cmd_plot,
        "lowerbound": _cmd_lowerbound,
        "verify": _cmd_verify,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (CutplaneError, OSError, ValueError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def main():
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
