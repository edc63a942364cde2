"""Command-line entry point: ``peer-release <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path

import numpy as np

from .bounds import DEFAULT_MAX_TUPLES, compute_bounds
from .exceptions import BoundsError, ConvergenceError, InstanceError
from .instance import read_public_csv, write_assignment_csv, write_public_csv
from .oracle import DEFAULT_MAX_LOAD, DEFAULT_MAX_REVIEWERS, enumerate_theta, prop1_expected_errors
from .project import DEFAULT_MAX_ITER, DEFAULT_TOL, ProjectionProblem, project_intersection
from .simlab import load_config, run_experiment, run_trial_artifacts

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_SOLVER = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _emit(payload, out):
    text = json.dumps(payload)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _read_vector(path) -> np.ndarray:
    data = json.loads(Path(path).read_text())
    if isinstance(data, dict):
        if "r" not in data:
            raise ValueError(f"{path}: expected a JSON list or an object with key 'r'")
        data = data["r"]
    vec = np.asarray(data, dtype=float)
    if vec.ndim != 1:
        raise ValueError(f"{path}: noisy release must be a flat list of numbers")
    return vec


def cmd_bounds(args) -> int:
    pw = read_public_csv(args.public)
    _emit(compute_bounds(pw, max_tuples=args.max_tuples).to_dict(), args.output)
    return EXIT_OK


def cmd_release(args) -> int:
    pw = read_public_csv(args.public)
    r = _read_vector(args.noisy)
    if len(r) != pw.n:
        raise ValueError(f"noisy release has length {len(r)}, expected n={pw.n}")
    if args.method == "ours":
        b = compute_bounds(pw, max_tuples=args.max_tuples)
        lower, upper = b.lower, b.upper
    else:
        lower, upper = np.full(pw.n, args.box[0]), np.full(pw.n, args.box[1])
    target = args.target_sum if args.target_sum is not None else pw.default_target_sum()
    t = project_intersection(ProjectionProblem(r, lower, upper, target, args.tol, args.max_iter))
    _emit({"t": t.tolist(), "method": args.method}, args.output)
    return EXIT_OK


def _slug(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9.]+", "_", text).strip("_")


def cmd_simulate(args) -> int:
    cfg = load_config(args.config, base_seed=args.seed)
    out = args.output or "results.csv"
    rows = run_experiment(cfg, results_path=out, trials_path=args.trials_output, n_jobs=args.jobs)
    if args.dump_dir:
        dump = Path(args.dump_dir)
        dump.mkdir(parents=True, exist_ok=True)
        for d, dist in enumerate(cfg.distributions):
            for n in cfg.n_values:
                for trial in range(cfg.trials):
                    art = run_trial_artifacts(cfg, n, trial, d)
                    stem = dump / f"{_slug(dist.label)}_n{n}_trial{trial}"
                    write_public_csv(art.public, f"{stem}_public.csv")
                    write_assignment_csv(art.assignment, f"{stem}_assignment.csv")
                    Path(f"{stem}_noisy.json").write_text(json.dumps({
                        "r": art.noisy.tolist(), "theta": art.theta.tolist(),
                        "sse_noisy": art.result.sse_noisy, "sse_baseline": art.result.sse_baseline,
                        "sse_ours": art.result.sse_ours,
                    }) + "\n")
    print(f"wrote {len(rows)} rows to {out}", file=sys.stderr)
    return EXIT_OK


def cmd_oracle(args) -> int:
    pw = read_public_csv(args.public)
    theta = enumerate_theta(pw, max_reviewers=args.max_reviewers, max_load=args.max_load)
    vectors = theta.as_array()
    b = compute_bounds(pw)
    below = vectors < b.lower - args.slack
    above = vectors > b.upper + args.slack
    report = {
        "theta_size": len(theta),
        "bounds": b.to_dict(),
        "violations": int(np.sum(below) + np.sum(above)),
        "sound": bool(not below.any() and not above.any()),
    }
    if len(theta) <= 50:
        report["theta"] = vectors.tolist()
    _emit(report, args.output)
    return EXIT_OK


def cmd_prop1(args) -> int:
    res = prop1_expected_errors(mc_samples=args.mc_samples, seed=args.seed)
    payload = {"noisy": res.noisy, "projected": res.projected}
    if args.mc_samples:
        payload.update(mc_noisy=res.mc_noisy, mc_projected=res.mc_projected)
    _emit(payload, args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="peer-release", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("bounds", help="per-index lower/upper bounds from public weights")
    p.add_argument("public", help="public weights CSV")
    p.add_argument("--max-tuples", type=int, default=DEFAULT_MAX_TUPLES)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("release", help="project a noisy release")
    p.add_argument("public", help="public weights CSV")
    p.add_argument("noisy", help="JSON list, or object with key 'r'")
    p.add_argument("--method", choices=["ours", "baseline"], default="ours")
    p.add_argument("--box", type=float, nargs=2, default=(0.0, 1.0), metavar=("LO", "HI"))
    p.add_argument("--target-sum", type=float)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER)
    p.add_argument("--max-tuples", type=int, default=DEFAULT_MAX_TUPLES)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_release)

    p = sub.add_parser("simulate", help="run the simulation grid from a JSON config")
    p.add_argument("config")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("-o", "--output", help="aggregate results CSV (default results.csv)")
    p.add_argument("--trials-output", help="per-trial CSV")
    p.add_argument("--dump-dir", help="write every trial's instance, noise and errors here")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("oracle", help="brute-force the achievable vectors and check the bounds")
    p.add_argument("public")
    p.add_argument("--max-reviewers", type=int, default=DEFAULT_MAX_REVIEWERS)
    p.add_argument("--max-load", type=int, default=DEFAULT_MAX_LOAD)
    p.add_argument("--slack", type=float, default=1e-12)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("prop1", help="expected errors of the nearest-point counterexample")
    p.add_argument("--mc-samples", type=int, default=0)
    p.add_argument("--seed", type=int)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_prop1)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (InstanceError, BoundsError, ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
