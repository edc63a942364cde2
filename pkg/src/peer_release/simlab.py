"""Simulation harness comparing three ways of releasing the sorted mean-weight
vector: the raw noisy vector, the baseline box projection, and projection
onto the bounds polytope computed from public data."""

from __future__ import annotations

import csv
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .bounds import BoundsVector, compute_bounds
from .core import sorted_mean_weights, sse
from .exceptions import InstanceError
from .instance import Assignment, PublicWeights, public_view, sample_assignment
from .privacy import NoiseKind, NoiseMechanism, noisy_release
from .project import DEFAULT_MAX_ITER, DEFAULT_TOL, ProjectionProblem, project_baseline, project_intersection

RESULT_COLUMNS = [
    "n", "dist_label", "trials",
    "mean_noisy", "sem_noisy", "mean_baseline", "sem_baseline", "mean_ours", "sem_ours",
    "mean_bound_width", "wall_ms",
]
TRIAL_COLUMNS = ["n", "trial", "sse_noisy", "sse_baseline", "sse_ours"]


@dataclass(frozen=True)
class WeightDistribution:
    """Where edge weights come from.

    ``beta``: i.i.d. Beta(a, b).  ``per_paper``: slot ``s`` of paper ``i``
    (both 1-based) draws from Beta(s, i).  ``per_edge``: the review of paper
    ``i`` by reviewer ``j`` (1-based) draws from Beta(i, j).
    """

    kind: str = "beta"
    a: float = 1.0
    b: float = 1.0

    def __post_init__(self):
        if self.kind not in ("beta", "per_paper", "per_edge"):
            raise ValueError(f"unknown weight distribution {self.kind!r}")
        if self.kind == "beta" and not (self.a > 0 and self.b > 0):
            raise ValueError("beta parameters must be positive")

    @property
    def label(self) -> str:
        if self.kind == "beta":
            return f"beta({self.a:g},{self.b:g})"
        return self.kind

    def sampler(self):
        if self.kind == "beta":
            a, b = self.a, self.b
            return lambda rng, paper, reviewer, slot: rng.beta(a, b)
        if self.kind == "per_paper":
            return lambda rng, paper, reviewer, slot: rng.beta(slot + 1, paper + 1)
        return lambda rng, paper, reviewer, slot: rng.beta(paper + 1, reviewer + 1)

    @classmethod
    def from_dict(cls, data: dict) -> "WeightDistribution":
        return cls(kind=data.get("kind", "beta"), a=float(data.get("a", 1.0)), b=float(data.get("b", 1.0)))


def beta_sweep(values: Sequence[float] = (0.5, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10)) -> tuple[WeightDistribution, ...]:
    """Symmetric Beta(a, a) distributions for a sweep over ``a``."""
    return tuple(WeightDistribution("beta", a, a) for a in values)


@dataclass(frozen=True)
class ExperimentConfig:
    n_values: tuple[int, ...] = (10, 20, 30, 40, 50)
    reviewer_load: int = 2
    paper_load: int = 2
    distributions: tuple[WeightDistribution, ...] = (WeightDistribution("beta", 5, 1),)
    mechanism: NoiseMechanism = field(default_factory=lambda: NoiseMechanism.laplace_with_variance(2.0))
    trials: int = 200
    base_seed: int = 0
    baseline_box: tuple[float, float] = (0.0, 1.0)
    tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        for n in self.n_values:
            self.papers_for(n)

    def papers_for(self, n: int) -> int:
        total = n * self.reviewer_load
        if total % self.paper_load:
            raise InstanceError(f"n={n}: n*l={total} is not divisible by k={self.paper_load}")
        return total // self.paper_load

    @classmethod
    def from_dict(cls, data: dict, base_seed: Optional[int] = None) -> "ExperimentConfig":
        mech = data.get("mechanism", {"kind": "laplace", "variance": 2.0})
        if "variance" in mech:
            if NoiseKind(mech.get("kind", "laplace")) is NoiseKind.LAPLACE:
                mechanism = NoiseMechanism.laplace_with_variance(float(mech["variance"]))
            else:
                mechanism = NoiseMechanism(mech["kind"], math.sqrt(float(mech["variance"])))
        else:
            mechanism = NoiseMechanism(mech.get("kind", "laplace"), float(mech.get("scale", 1.0)))
        dists = data.get("distributions", [{"kind": "beta", "a": 5, "b": 1}])
        return cls(
            n_values=tuple(int(n) for n in data.get("n_values", (10,))),
            reviewer_load=int(data.get("reviewer_load", 2)),
            paper_load=int(data.get("paper_load", 2)),
            distributions=tuple(WeightDistribution.from_dict(d) for d in dists),
            mechanism=mechanism,
            trials=int(data.get("trials", 200)),
            base_seed=int(base_seed if base_seed is not None else data.get("base_seed", 0)),
            baseline_box=tuple(float(x) for x in data.get("baseline_box", (0.0, 1.0))),
            tol=float(data.get("tol", DEFAULT_TOL)),
            max_iter=int(data.get("max_iter", DEFAULT_MAX_ITER)),
        )


@dataclass(frozen=True)
class TrialResult:
    sse_noisy: float
    sse_baseline: float
    sse_ours: float
    bound_width: float
    timings: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class TrialArtifacts:
    """Everything produced by one trial; useful for dumping and debugging."""

    assignment: Assignment
    public: PublicWeights
    theta: np.ndarray
    noisy: np.ndarray
    bounds: BoundsVector
    ours: np.ndarray
    baseline: np.ndarray
    result: TrialResult


def trial_seeds(base_seed: int, n: int, trial_index: int, dist_index: int = 0) -> tuple:
    """Independent (instance, noise) seed sequences for one trial."""
    root = np.random.SeedSequence([base_seed, n, trial_index, dist_index])
    return tuple(root.spawn(2))


def run_trial_artifacts(cfg: ExperimentConfig, n: int, trial_index: int, dist_index: int = 0) -> TrialArtifacts:
    dist = cfg.distributions[dist_index]
    instance_seed, noise_seed = trial_seeds(cfg.base_seed, n, trial_index, dist_index)
    clock = time.perf_counter

    t0 = clock()
    assignment = sample_assignment(
        n, cfg.papers_for(n), cfg.reviewer_load, cfg.paper_load, dist.sampler(), instance_seed
    )
    public = public_view(assignment)
    theta = sorted_mean_weights(assignment)
    r = noisy_release(theta, cfg.mechanism, noise_seed)
    target = public.default_target_sum()
    t1 = clock()
    bounds = compute_bounds(public)
    t2 = clock()
    ours = project_intersection(
        ProjectionProblem(r, bounds.lower, bounds.upper, target, cfg.tol, cfg.max_iter)
    )
    t3 = clock()
    lo, hi = cfg.baseline_box
    baseline = project_baseline(r, lo, hi, target, cfg.tol, cfg.max_iter)
    t4 = clock()

    result = TrialResult(
        sse_noisy=sse(r, theta),
        sse_baseline=sse(baseline, theta),
        sse_ours=sse(ours, theta),
        bound_width=float(np.mean(bounds.upper - bounds.lower)),
        timings={"sample_ms": 1e3 * (t1 - t0), "bounds_ms": 1e3 * (t2 - t1),
                 "project_ms": 1e3 * (t3 - t2), "baseline_ms": 1e3 * (t4 - t3)},
    )
    return TrialArtifacts(assignment, public, theta, r, bounds, ours, baseline, result)


def run_trial(cfg: ExperimentConfig, n: int, trial_index: int, dist_index: int = 0) -> TrialResult:
    return run_trial_artifacts(cfg, n, trial_index, dist_index).result


@dataclass(frozen=True)
class AggregateRow:
    n: int
    dist_label: str
    trials: int
    mean_noisy: float
    sem_noisy: float
    mean_baseline: float
    sem_baseline: float
    mean_ours: float
    sem_ours: float
    mean_bound_width: float
    wall_ms: float


def _mean_sem(values) -> tuple[float, float]:
    values = np.asarray(values, dtype=float)
    if len(values) < 2:
        return float(values.mean()), float("nan")
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(len(values)))


def aggregate(n: int, label: str, results: Sequence[TrialResult], wall_ms: float) -> AggregateRow:
    noisy = _mean_sem([r.sse_noisy for r in results])
    base = _mean_sem([r.sse_baseline for r in results])
    ours = _mean_sem([r.sse_ours for r in results])
    return AggregateRow(
        n, label, len(results), *noisy, *base, *ours,
        float(np.mean([r.bound_width for r in results])), wall_ms,
    )


def _trial_job(args):
    cfg, n, trial, dist_index = args
    return run_trial(cfg, n, trial, dist_index)


def run_experiment(
    cfg: ExperimentConfig,
    results_path: Optional[str | os.PathLike] = None,
    trials_path: Optional[str | os.PathLike] = None,
    n_jobs: int = 1,
) -> list[AggregateRow]:
    """Run every (distribution, n) group and aggregate the errors.

    Rows come out in distribution-major order.  When ``results_path`` is
    given, rows are written as CSV; if a group fails, the completed rows plus
    an ``error:`` marker row are written before the exception propagates.
    ``trials_path`` receives one line per trial.
    """
    rows: list[AggregateRow] = []
    per_trial: list[tuple] = []
    pool = ProcessPoolExecutor(max_workers=n_jobs) if n_jobs > 1 else None
    try:
        for d, dist in enumerate(cfg.distributions):
            for n in cfg.n_values:
                start = time.perf_counter()
                jobs = [(cfg, n, t, d) for t in range(cfg.trials)]
                results = list(pool.map(_trial_job, jobs)) if pool else [_trial_job(j) for j in jobs]
                wall_ms = 1e3 * (time.perf_counter() - start)
                rows.append(aggregate(n, dist.label, results, wall_ms))
                per_trial.extend(
                    (n, t, r.sse_noisy, r.sse_baseline, r.sse_ours) for t, r in enumerate(results)
                )
    except Exception as exc:
        if results_path is not None:
            write_results_csv(rows, results_path, error=f"{type(exc).__name__}: {exc}")
        if trials_path is not None:
            write_trials_csv(per_trial, trials_path)
        raise
    finally:
        if pool is not None:
            pool.shutdown()
    if results_path is not None:
        write_results_csv(rows, results_path)
    if trials_path is not None:
        write_trials_csv(per_trial, trials_path)
    return rows


def write_results_csv(rows: Sequence[AggregateRow], path, error: Optional[str] = None) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RESULT_COLUMNS)
        for row in rows:
            writer.writerow([getattr(row, c) for c in RESULT_COLUMNS])
        if error is not None:
            writer.writerow(["", f"error: {error}"] + [""] * (len(RESULT_COLUMNS) - 2))


def write_trials_csv(per_trial: Sequence[tuple], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRIAL_COLUMNS)
        writer.writerows(per_trial)


def load_config(path, base_seed: Optional[int] = None) -> ExperimentConfig:
    with open(path) as fh:
        return ExperimentConfig.from_dict(json.load(fh), base_seed=base_seed)
