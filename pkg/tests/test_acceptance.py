"""End-to-end acceptance checks.  Each test reports one PASS/FAIL line."""

import math
import time

import numpy as np
import pytest

from conftest import random_grid_instance, random_mixed_instance
from oracles import grid_projection, isotonic_grid_search
from peer_release.bounds import compute_bounds
from peer_release.estimator import BoundsProjector
from peer_release.instance import PublicWeights, public_view, sample_assignment
from peer_release.oracle import enumerate_theta, prop1_expected_errors
from peer_release.project import ProjectionProblem, isotonic_project, project_intersection
from peer_release.simlab import ExperimentConfig, WeightDistribution, run_trial

GOLDEN = np.array([0.0, 1 / 3, 2 / 3, 1.0])
SETTINGS = (
    WeightDistribution("beta", 5, 1),
    WeightDistribution("beta", 2, 5),
    WeightDistribution("beta", 1, 3),
    WeightDistribution("beta", 2, 2),
    WeightDistribution("beta", 0.5, 0.5),
)
TRIALS = 200


def count_violations(pw, bounds, slack=1e-12):
    theta = enumerate_theta(pw).as_array()
    below = theta < bounds.lower - slack
    above = theta > bounds.upper + slack
    return int(np.sum(np.any(below | above, axis=1))), len(theta)


@pytest.fixture(scope="module")
def sweep_trials():
    """SSE triples for 200 trials at n = 10 per weight distribution."""
    cfg = ExperimentConfig(n_values=(10,), distributions=SETTINGS, trials=TRIALS, base_seed=0)
    assert cfg.mechanism.variance == pytest.approx(2.0)
    start = time.perf_counter()
    out = {}
    for d, dist in enumerate(SETTINGS):
        res = [run_trial(cfg, 10, t, d) for t in range(TRIALS)]
        out[dist.label] = np.array([(r.sse_noisy, r.sse_baseline, r.sse_ours) for r in res])
    return out, time.perf_counter() - start


def test_golden_case(worked_example, acceptance_report):
    start = time.perf_counter()
    b = compute_bounds(worked_example)
    bounds_err = max(np.max(np.abs(b.lower - GOLDEN)), np.max(np.abs(b.upper - GOLDEN)))
    rng = np.random.default_rng(1)
    proj_err = 0.0
    for _ in range(100):
        t = project_intersection(ProjectionProblem(rng.normal(0.5, 3.0, 4), b.lower, b.upper, 2.0))
        proj_err = max(proj_err, float(np.max(np.abs(t - GOLDEN))))
    elapsed = time.perf_counter() - start
    ok = bounds_err <= 1e-12 and proj_err <= 1e-6 and elapsed < 1.0
    acceptance_report("AC1 golden case", ok, f"bounds err {bounds_err:.1e}, projection err {proj_err:.1e}, {elapsed:.2f}s")
    assert ok


def test_prop1_numerics(acceptance_report):
    start = time.perf_counter()
    res = prop1_expected_errors(mc_samples=10_000_000, seed=12345)
    elapsed = time.perf_counter() - start
    closed = abs(res.noisy - 2.0) <= 5e-5 and abs(res.projected - 2.06896) <= 5e-5
    mc = abs(res.mc_noisy / res.noisy - 1) <= 0.01 and abs(res.mc_projected / res.projected - 1) <= 0.01
    ok = closed and mc and elapsed < 30
    acceptance_report(
        "AC2 single-coordinate snapping errors",
        ok,
        f"closed ({res.noisy:.6f}, {res.projected:.6f}), MC ({res.mc_noisy:.4f}, {res.mc_projected:.4f}), {elapsed:.1f}s",
    )
    assert ok


def test_soundness_uniform_loads(acceptance_report):
    start = time.perf_counter()
    rng = np.random.default_rng(2024)
    instances = violations = vectors = 0
    while instances < 240:
        n = int(rng.integers(3, 7))
        load = int(rng.choice([2, 3]))
        if load > n:
            continue
        _, pw = random_grid_instance(int(rng.integers(2**31)), n, load)
        bad, size = count_violations(pw, compute_bounds(pw))
        violations += bad
        vectors += size
        instances += 1
    elapsed = time.perf_counter() - start
    ok = violations == 0 and elapsed < 300
    acceptance_report("AC3 bounds bracket every achievable vector", ok, f"{instances} instances, {vectors} vectors, {violations} violations, {elapsed:.1f}s")
    assert ok


def test_per_trial_nonexpansive(sweep_trials, acceptance_report):
    data, _ = sweep_trials
    sse = np.concatenate(list(data.values()))
    assert len(sse) >= 1000
    bad_ours = int(np.sum(sse[:, 2] > sse[:, 0] + 1e-9))
    bad_base = int(np.sum(sse[:, 1] > sse[:, 0] + 1e-9))
    ok = bad_ours == 0 and bad_base == 0
    acceptance_report("AC4 projection never increases error", ok, f"{len(sse)} trials, {bad_ours} + {bad_base} exceedances")
    assert ok


def test_axioms(acceptance_report):
    rng = np.random.default_rng(7)
    worst = {"identical": 0.0, "load one": 0.0, "one nonzero paper": 0.0}
    for _ in range(30):
        n = int(rng.integers(4, 13))
        noisy = rng.normal(0, 5, size=(4, n))
        noisy[0] *= 100

        # identical weights
        load = int(rng.choice([d for d in (1, 2, 3) if d <= n]))
        paper_load = int(rng.choice([k for k in (1, 2, 3) if (n * load) % k == 0 and k <= n]))
        c = float(rng.uniform(-1, 1))
        pw = PublicWeights.from_rows([[c] * paper_load] * (n * load // paper_load), n, load)
        out = BoundsProjector().fit(pw).transform(noisy)
        worst["identical"] = max(worst["identical"], float(np.max(np.abs(out - c))))

        # load one
        paper_load = int(rng.choice([k for k in (1, 2, 3) if n % k == 0]))
        a = sample_assignment(n, n // paper_load, 1, paper_load, lambda g, p, r, s: float(g.uniform()), int(rng.integers(2**31)))
        out = BoundsProjector().fit(public_view(a)).transform(noisy)
        truth = np.sort([w for _, _, w in a.edges])
        worst["load one"] = max(worst["load one"], float(np.max(np.abs(out - truth))))

        # all papers but one are zero
        load = int(rng.choice([d for d in (2, 3) if d <= n]))
        first = rng.uniform(0.1, 1, load)
        rows = [first.tolist()] + [[0.0] * load for _ in range(n - 1)]
        out = BoundsProjector().fit(rows, reviewer_loads=load).transform(noisy)
        truth = np.sort(np.concatenate([first / load, np.zeros(n - load)]))
        worst["one nonzero paper"] = max(worst["one nonzero paper"], float(np.max(np.abs(out - truth))))
    ok = max(worst.values()) <= 1e-6
    acceptance_report("AC5 axioms", ok, ", ".join(f"{k} {v:.1e}" for k, v in worst.items()))
    assert ok


def test_mean_error_ordering(sweep_trials, acceptance_report):
    data, elapsed = sweep_trials
    lines, ok = [], elapsed < 600
    for label, sse in data.items():
        noisy, base, ours = sse.mean(axis=0)
        good = len(sse) >= 200 and ours < base < noisy and ours <= 0.5 * noisy
        ok &= good
        lines.append(f"{label}: {ours:.3f} < {base:.3f} < {noisy:.2f}")
    acceptance_report("AC6 ours beats baseline beats noisy", ok, "; ".join(lines) + f"; {elapsed:.0f}s")
    assert ok


def test_bounds_scaling(acceptance_report):
    dist = WeightDistribution("beta", 5, 1)
    sizes = (10, 20, 30, 40, 50)
    times = []
    for n in sizes:
        pw = public_view(sample_assignment(n, n, 2, 2, dist.sampler(), n))
        best = math.inf
        for _ in range(3):
            start = time.perf_counter()
            compute_bounds(pw)
            best = min(best, time.perf_counter() - start)
        times.append(best)
    slope = float(np.polyfit(np.log(sizes), np.log(times), 1)[0])
    ok = times[-1] < 60 and slope <= 5
    acceptance_report("AC7 bounds runtime", ok, f"n=50 {times[-1]:.2f}s, log-log slope {slope:.2f}")
    assert ok


def test_solver_optimality(acceptance_report):
    rng = np.random.default_rng(8)
    proj_err = 0.0
    for _ in range(100):
        n = int(rng.integers(1, 4))
        centre = np.sort(rng.uniform(0, 1, n))
        lower = centre - rng.uniform(0, 0.5, n)
        upper = centre + rng.uniform(0, 0.5, n)
        target = float(centre.sum())
        r = centre + rng.normal(0, 1, n)
        t = project_intersection(ProjectionProblem(r, lower, upper, target))
        proj_err = max(proj_err, float(np.max(np.abs(t - grid_projection(r, lower, upper, target)))))
    iso_err = 0.0
    for _ in range(100):
        v = rng.integers(-8, 9, size=int(rng.integers(1, 5))) / 4
        iso_err = max(iso_err, float(np.max(np.abs(isotonic_project(v) - isotonic_grid_search(v, 1 / 48)))))
    ok = proj_err <= 1e-4 and iso_err <= 1e-6
    acceptance_report("AC8 solver optimality", ok, f"projection {proj_err:.1e}, isotonic {iso_err:.1e}")
    assert ok


def test_soundness_mixed_loads(acceptance_report):
    instances = violations = vectors = 0
    for seed in range(60):
        _, pw = random_mixed_instance(10_000 + seed, max_n=5, loads=(1, 2))
        assert pw.n <= 5 and set(pw.load_set) == {1, 2}
        bad, size = count_violations(pw, compute_bounds(pw))
        violations += bad
        vectors += size
        instances += 1
    ok = violations == 0
    acceptance_report("AC9 mixed loads bracketed", ok, f"{instances} instances, {vectors} vectors, {violations} violations")
    assert ok
