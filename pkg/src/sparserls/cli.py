"""Command line entry point.

    sparserls run fig1_objective_error --runs 20 --out fig1.csv
    sparserls run custom --config scenario.json --out custom.csv
    sparserls invariants
"""

import argparse
import json
import logging
import sys

from .estimator import RegularizationSchedule
from .harness import ALGORITHMS, METRICS, PAPER_RUNS, PRESETS, ExperimentSpec, run_experiment
from .signal import ScenarioConfig


def _scenario_flags(p):
    g = p.add_argument_group("scenario")
    g.add_argument("--K", type=int)
    g.add_argument("--N", type=int)
    g.add_argument("--density", type=float)
    g.add_argument("--noise-variance", dest="noise_variance", type=float)
    g.add_argument("--horizon", type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--nonnegative", action="store_true", default=None)
    g.add_argument("--alpha", type=float, help="AR(1) coefficient of a time-varying signal")
    g.add_argument("--leading-support", dest="leading_support", action="store_true", default=None)

    g = p.add_argument_group("experiment")
    g.add_argument("--runs", type=int, help="Monte-Carlo repetitions (default 20)")
    g.add_argument("--full-scale", action="store_true", help=f"use {PAPER_RUNS} repetitions")
    g.add_argument("--algorithms", nargs="+", choices=ALGORITHMS)
    g.add_argument("--metrics", nargs="+", choices=METRICS)
    g.add_argument("--beta", type=float, help="forgetting factor")
    g.add_argument("--mu-scale", type=float)
    g.add_argument("--mu-decay", type=float)
    g.add_argument("--weighted", action="store_true", default=None)
    g.add_argument("--weight-a", type=float)
    g.add_argument("--prox", type=float)
    g.add_argument("--out", default=None, help="CSV path (default <preset>.csv)")
    g.add_argument("--config", help="JSON file; scenario keys plus optional "
                                    "'schedule', 'algorithms', 'metrics', 'runs', 'beta'")


def _schedule_overrides(args):
    out = {}
    for key, attr in (("scale", "mu_scale"), ("decay", "mu_decay"), ("weighted", "weighted"), ("a", "weight_a")):
        v = getattr(args, attr)
        if v is not None:
            out[key] = v
    return out


def build_spec(args):
    scen_keys = ("K", "N", "density", "noise_variance", "horizon", "seed", "nonnegative",
                 "alpha", "leading_support")
    flags = {k: getattr(args, k) for k in scen_keys if getattr(args, k) is not None}
    runs = PAPER_RUNS if args.full_scale else args.runs
    extra = dict(runs=runs, beta=args.beta, prox=args.prox,
                 algorithms=tuple(args.algorithms) if args.algorithms else None,
                 metrics=tuple(args.metrics) if args.metrics else None)
    out = args.out or f"{args.preset}.csv"

    if args.preset == "custom":
        if not args.config:
            raise SystemExit("run custom needs --config FILE")
        with open(args.config) as fh:
            data = json.load(fh)
        sched = dict(data.pop("schedule", {}))
        sched.update(_schedule_overrides(args))
        opts = {k: data.pop(k) for k in ("algorithms", "metrics", "runs", "beta", "prox") if k in data}
        data.update(flags)
        opts.update({k: v for k, v in extra.items() if v is not None})
        for k in ("algorithms", "metrics"):
            if k in opts:
                opts[k] = tuple(opts[k])
        return ExperimentSpec(preset="custom", scenario=ScenarioConfig.from_mapping(data),
                              schedule=RegularizationSchedule(**sched), output_path=out, **opts)

    sched = _schedule_overrides(args)
    return ExperimentSpec.from_preset(args.preset, schedule=sched or None, output_path=out,
                                      **flags, **extra)


def cmd_run(args):
    spec = build_spec(args)
    res = run_experiment(spec)
    print(f"wrote {len(res.rows)} rows to {spec.output_path}")
    if res.skipped:
        print(f"skipped undefined metric rows: {res.skipped}")
    return 0


def cmd_invariants(args):
    from .invariants import run_all
    results = run_all(quick=args.quick)
    for r in results:
        print(r.line())
    return 0 if all(r.passed for r in results) else 1


def main(argv=None):
    parser = argparse.ArgumentParser(prog="sparserls", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run an experiment preset and write a CSV")
    p.add_argument("preset", choices=sorted(PRESETS) + ["custom"])
    _scenario_flags(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("invariants", help="run the property checks")
    p.add_argument("--quick", action="store_true", help="fewer random instances")
    p.set_defaults(func=cmd_invariants)

    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
