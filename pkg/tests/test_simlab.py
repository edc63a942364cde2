import csv

import numpy as np
import pytest

from peer_release.privacy import NoiseMechanism
from peer_release.simlab import (
    RESULT_COLUMNS,
    TRIAL_COLUMNS,
    ExperimentConfig,
    WeightDistribution,
    beta_sweep,
    run_experiment,
    run_trial,
    run_trial_artifacts,
)

# recorded once from this implementation (base_seed=2024, n=10, beta(5,1))
GOLDEN = {
    0: (16.348187928762798, 0.025661778990642044, 0.02458157886892514, 0.2054607846588487),
    1: (40.59252814947066, 0.033851088312701456, 0.017291270207850262, 0.22094847377988175),
}


def small_cfg(**kw):
    base = dict(n_values=(6,), trials=5, base_seed=3)
    base.update(kw)
    return ExperimentConfig(**base)


def test_no_noise_gives_zero_error():
    cfg = small_cfg(mechanism=NoiseMechanism("none", 0.0))
    for trial in range(3):
        res = run_trial(cfg, 6, trial)
        assert res.sse_noisy == 0
        assert res.sse_baseline == pytest.approx(0, abs=1e-15)
        assert res.sse_ours == pytest.approx(0, abs=1e-15)


@pytest.mark.parametrize("trial", sorted(GOLDEN))
def test_golden_trial(trial):
    cfg = ExperimentConfig(n_values=(10,), trials=3, base_seed=2024)
    res = run_trial(cfg, 10, trial)
    assert res == run_trial(cfg, 10, trial)
    np.testing.assert_allclose(
        [res.sse_noisy, res.sse_baseline, res.sse_ours, res.bound_width], GOLDEN[trial], rtol=1e-9, atol=1e-12
    )


def test_artifacts_are_consistent():
    art = run_trial_artifacts(small_cfg(), 6, 0)
    assert art.public.n == 6
    assert np.all(art.bounds.lower <= art.theta + 1e-12)
    assert np.all(art.theta <= art.bounds.upper + 1e-12)
    assert art.result.sse_ours <= art.result.sse_noisy + 1e-9


@pytest.mark.parametrize("dist", [WeightDistribution("beta", 2, 5), WeightDistribution("per_paper"), WeightDistribution("per_edge")])
def test_per_trial_projection_never_hurts(dist):
    cfg = small_cfg(n_values=(8,), distributions=(dist,), trials=20)
    for trial in range(cfg.trials):
        res = run_trial(cfg, 8, trial)
        assert res.sse_ours <= res.sse_noisy + 1e-9
        assert res.sse_baseline <= res.sse_noisy + 1e-9


def test_experiment_shape_and_files(tmp_path):
    cfg = small_cfg(n_values=(4, 6, 8), trials=4)
    out, dump = tmp_path / "res.csv", tmp_path / "trials.csv"
    rows = run_experiment(cfg, out, dump)
    assert [r.n for r in rows] == [4, 6, 8]
    with open(out) as fh:
        table = list(csv.DictReader(fh))
    assert list(table[0]) == RESULT_COLUMNS
    assert len(table) == 3
    with open(dump) as fh:
        trials = list(csv.DictReader(fh))
    assert list(trials[0]) == TRIAL_COLUMNS
    assert len(trials) == 12
    assert all(float(t["sse_ours"]) <= float(t["sse_noisy"]) + 1e-9 for t in trials)


def test_beta_sweep_rows():
    dists = beta_sweep()
    assert [d.a for d in dists] == [0.5, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10]
    rows = run_experiment(small_cfg(n_values=(4,), distributions=dists, trials=2))
    assert len(rows) == 11
    assert rows[0].dist_label == "beta(0.5,0.5)"


def test_failure_writes_marker_row(tmp_path, monkeypatch):
    import peer_release.simlab as simlab

    calls = {"count": 0}
    real = simlab.run_trial

    def flaky(cfg, n, trial, d=0):
        calls["count"] += 1
        if n == 6:
            raise RuntimeError("boom")
        return real(cfg, n, trial, d)

    monkeypatch.setattr(simlab, "run_trial", flaky)
    out = tmp_path / "res.csv"
    with pytest.raises(RuntimeError):
        run_experiment(small_cfg(n_values=(4, 6), trials=2), out)
    lines = list(csv.reader(open(out)))
    assert lines[1][0] == "4"
    assert lines[-1][1].startswith("error: RuntimeError: boom")


def test_sem_shrinks_with_trials():
    few = run_experiment(small_cfg(n_values=(6,), trials=20))[0]
    many = run_experiment(small_cfg(n_values=(6,), trials=80))[0]
    # quadrupling the trials roughly halves the standard error
    assert 0.3 < many.sem_noisy / few.sem_noisy < 0.8


def test_config_from_dict():
    cfg = ExperimentConfig.from_dict(
        {"n_values": [10, 20], "distributions": [{"kind": "beta", "a": 2, "b": 2}, {"kind": "per_edge"}],
         "mechanism": {"kind": "laplace", "variance": 2}, "trials": 7},
        base_seed=5,
    )
    assert cfg.mechanism.scale == 1.0
    assert cfg.base_seed == 5
    assert [d.label for d in cfg.distributions] == ["beta(2,2)", "per_edge"]
    with pytest.raises(ValueError):
        ExperimentConfig(trials=0)
