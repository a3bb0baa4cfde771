"""Command line entry point: ``chunglu <command> ...``."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import experiments
from .distributions import DegreeDistribution
from .exact_inverse import PrecisionContext, shift_input
from .feasibility import diagnose, sample_positive_image
from .generator import SAMPLERS, Sampler, average_over_trials, degree_distribution_of, make_rng
from .distributions import expand_to_weights
from .transfer import build_transfer_matrix, predict_output

#: Exit status of ``shift``/``check`` when the target has no non-negative input.
EXIT_INFEASIBLE = 3


def _precision(digits: int | None, m: int) -> PrecisionContext:
    return PrecisionContext(digits) if digits else PrecisionContext.for_m(m)


def cmd_generate(args) -> int:
    d = DegreeDistribution.from_csv(args.dist)
    w = expand_to_weights(d)
    sample = SAMPLERS[Sampler(args.sampler)]
    out = Path(args.out)
    for t in range(args.trials):
        g = sample(w, make_rng(args.seed, t))
        path = out if args.trials == 1 else out.with_name(f"{out.stem}_{t}{out.suffix}")
        g.write_edgelist(path)
    stats = average_over_trials(d, args.trials, args.sampler, args.seed)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["degree", "mean_count"])
    for k, c in enumerate(stats.mean_counts, start=1):
        writer.writerow([k, repr(c)])
    print(f"# nodes={stats.node_count} mean_edges={stats.mean_edges} "
          f"mean_degree_zero={stats.mean_zero_degree} mean_above_m={stats.mean_overflow}", file=sys.stderr)
    return 0


def cmd_predict(args) -> int:
    d = DegreeDistribution.from_csv(args.dist)
    m = args.m or d.m
    if m < d.m:
        raise SystemExit(f"--m {m} is smaller than the distribution's largest degree {d.m}")
    x = list(d.counts) + [0] * (m - d.m)
    y = predict_output(build_transfer_matrix(m), x)
    lines = ["degree,predicted_count"] + [f"{k},{v!r}" for k, v in enumerate(y.tolist(), start=1)]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_shift(args) -> int:
    d = DegreeDistribution.from_csv(args.dist)
    res = shift_input(d, _precision(args.digits, d.m), materialize=args.materialize)
    lines = ["degree,x_real,x_rounded"] + [
        f"{k},{xr},{xi}" for k, (xr, xi) in enumerate(zip(res.x_real, res.x_rounded), start=1)]
    _emit("\n".join(lines) + "\n", args.out)
    if args.json:
        print(json.dumps(res.to_json(), indent=2))
    elif not res.feasible:
        print(f"infeasible: negative classes {[i + 1 for i in res.negative]}", file=sys.stderr)
    return 0 if res.feasible else EXIT_INFEASIBLE


def cmd_check(args) -> int:
    d = DegreeDistribution.from_csv(args.dist)
    report = diagnose(d, _precision(args.digits, d.m), N=args.N, use_shift=not args.scan)
    if args.json:
        print(json.dumps(report.to_json(), indent=2))
    else:
        print(f"direct_feasible={report.direct_feasible} N={report.N:g} "
              f"bounds_ok={sum(report.bounds_ok)}/{report.m} "
              f"hyperplane_residual={float(report.hyperplane_residual):.3e}")
    return 0 if report.direct_feasible else EXIT_INFEASIBLE


def cmd_project(args) -> int:
    sample = sample_positive_image(args.m, args.count, args.box, args.seed)
    sample.to_csv(args.out, bins=args.bins)
    return 0


def cmd_experiment(args) -> int:
    cfg = experiments.default_config(args.suite, full=args.full, seed=args.seed, out_dir=args.out)
    if args.trials:
        cfg = experiments.dataclasses.replace(cfg, trials=args.trials)
    result = experiments.run(cfg)
    for path in experiments.write_outputs(result, args.out):
        print(path)
    print(json.dumps(experiments.summarize(result), indent=2))
    return 0


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chunglu", description="Chung-Lu generation with shifted inputs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="realize Chung-Lu graphs from a degree distribution")
    p.add_argument("--dist", required=True, help="degree,count CSV")
    p.add_argument("--sampler", choices=[s.value for s in Sampler], default="skip")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--out", required=True, help="edge list path (suffixed _<t> when trials > 1)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("predict", help="expected output distribution P x")
    p.add_argument("--dist", required=True)
    p.add_argument("--m", type=int, default=None, help="matrix size; pads the input with zeros")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("shift", help="shifted input x = P^-1 y")
    p.add_argument("--dist", required=True)
    p.add_argument("--digits", type=int, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--json", action="store_true", help="print the full result as JSON")
    p.add_argument("--materialize", action="store_true", help="use a stored P^-1 (debugging)")
    p.set_defaults(func=cmd_shift)

    p = sub.add_parser("check", help="feasibility diagnostics")
    p.add_argument("--dist", required=True)
    p.add_argument("--digits", type=int, default=None)
    p.add_argument("--N", type=float, default=None, help="node count for bounds and hyperplane")
    p.add_argument("--scan", action="store_true", help="pick N by scanning the admissible range")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("project", help="pairwise projections of P applied to random vectors")
    p.add_argument("--m", type=int, default=4)
    p.add_argument("--count", type=int, default=100_000)
    p.add_argument("--box", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bins", type=int, default=50)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("experiment", help="run an experiment suite")
    p.add_argument("suite", choices=experiments.SUITES)
    p.add_argument("--full", action="store_true", help="published scale instead of desk scale")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--out", default="results")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
