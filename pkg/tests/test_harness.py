import csv
import io
import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sclab import harness
from sclab.complex import SimplicialComplex
from sclab.harness import (ExperimentConfig, ExperimentError, factorial_moment, observe, poisson_bins,
                           poisson_gof, preset, presets, run, run_trial)
from sclab.sampler import ProbabilitySchedule, mix, sample_probs
from sclab.theory import critical_params
from oracles import brute_tv

P = ProbabilitySchedule


def small_config(**kw):
    base = dict(name="t", n=(12, 15), schedule=P.explicit([0.6, 0.6, 0.5]), k=2, trials=6, master_seed=5,
                observables=("N", "M", "f_vector", "betti", "link_stats", "garland"))
    base.update(kw)
    return ExperimentConfig(**base)


def test_trivial_full_complex():
    cfg = ExperimentConfig("full", (4,), P.explicit([1, 1]), k=2, trials=1, observables=("f_vector",))
    rec = run(cfg).records[0]
    assert rec.f == [4, 6, 4] and rec.seed == mix(0, 0)


def test_config_validation():
    with pytest.raises(ValueError):
        small_config(trials=0)
    with pytest.raises(ValueError):
        small_config(observables=())
    with pytest.raises(ValueError):
        small_config(observables=("bogus",))


def test_config_json_roundtrip():
    for cfg in presets().values():
        assert ExperimentConfig.from_dict(json.loads(json.dumps(cfg.to_dict()))) == cfg


def test_records_are_reproducible_from_trial_index():
    cfg = small_config()
    res = run(cfg)
    assert [(r.n, r.trial) for r in res.records] == [(n, t) for n in cfg.n for t in range(cfg.trials)]
    for r in res.records[::4]:
        again = run_trial(cfg, r.n, r.trial, harness.experiment_prime(cfg.master_seed))
        again.wall_time = r.wall_time
        assert again == r


def test_same_seed_same_csv_bytes():
    cfg = small_config(trials=2)
    assert run(cfg).csv() == run(cfg).csv()
    assert run(cfg).csv() != run(cfg.replace(master_seed=6)).csv()


def test_parallel_matches_serial():
    cfg = small_config()
    assert run(cfg, workers=1).csv() == run(cfg, workers=3).csv()


def test_csv_columns():
    cfg = small_config(trials=1)
    rows = list(csv.reader(io.StringIO(run(cfg).csv())))
    assert rows[0][:10] == ["trial", "seed", "n", "N", "M", "betti_km1", "f0", "f1", "f2", "f3"]
    assert rows[0][10:12] == ["garland", "tv_na"]
    assert rows[1][11] == "NA"


def test_serialized_complex_roundtrip_reproduces_observables(tmp_path):
    cfg = small_config(save_complexes=True)
    res = run(cfg, out=tmp_path)
    prime = harness.experiment_prime(cfg.master_seed)
    for r in res.records[::3]:
        data = json.loads((tmp_path / "complexes" / f"n{r.n}_t{r.trial}.json").read_text())
        assert data["meta"]["seed"] == r.seed
        X = SimplicialComplex.from_dict(data)
        rec = observe(X, cfg, prime, harness.ExperimentRecord(r.trial, r.seed, r.n))
        rec.wall_time = r.wall_time
        assert rec == r
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert set(summary["summaries"]) == {"12", "15"}


def test_io_error_names_path(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(ExperimentError, match=str(blocker)):
        run(small_config(trials=1), out=blocker / "sub")


def test_trial_failure_reports_seed(monkeypatch):
    def boom(*a, **k):
        raise RuntimeError("bad")
    monkeypatch.setattr(harness, "sample_probs", boom)
    with pytest.raises(ExperimentError, match=f"seed={mix(5, 0)}"):
        run(small_config(trials=1))


def test_z_score_definition():
    s = run(small_config(trials=30, n=(14,))).summaries[14]
    for name, z in s.z.items():
        m = s.observables[name]
        if m["se"] > 0:
            assert z == pytest.approx((m["mean"] - s.theory[name]) / m["se"])


def test_garland_violation_detection(monkeypatch):
    cfg = small_config(trials=2, n=(10,), observables=("garland",))
    monkeypatch.setattr(harness, "garland_certificate",
                        lambda X, k: type("C", (), {"certified": True})())
    monkeypatch.setattr(harness, "betti", lambda *a, **k: type("B", (), {"betti": [1, 1, 0, 0]})())
    res = run(cfg)
    assert res.violations == [(10, 0), (10, 1)]


# -- statistics ---------------------------------------------------------------


def test_factorial_moment_examples():
    assert factorial_moment([2, 2, 2], 2) == 2
    assert factorial_moment([1, 4, 7], 1) == 4
    with pytest.raises(ValueError):
        factorial_moment([1], 0)


def test_factorial_moment_poisson(rng):
    mu = 1.7
    x = rng.poisson(mu, 20000)
    f = (x * (x - 1)).astype(float)
    assert abs(factorial_moment(x, 2) - mu ** 2) <= 4 * f.std(ddof=1) / math.sqrt(len(x))


def test_gof_exact_pmf_frequencies():
    mu, T = 1.3, 10 ** 6
    K = poisson_bins(mu)
    counts = []
    for j in range(K + 1):
        counts += [j] * round(T * math.exp(-mu) * mu ** j / math.factorial(j))
    counts += [K + 1] * (T - len(counts))  # the merged tail bin
    fit = poisson_gof(counts, mu)
    assert fit.tv_distance < 1e-5 and fit.passed


def test_gof_mu_zero():
    fit = poisson_gof([0] * 50, 0.0)
    assert fit.tv_distance == 0 and fit.passed
    assert not poisson_gof([0, 1], 0.0).passed


def test_gof_errors():
    with pytest.raises(ValueError):
        poisson_gof([], 1.0)
    with pytest.raises(ValueError):
        poisson_gof([1], -1.0)


@given(st.floats(0.05, 4.0), st.integers(0, 2**32))
def test_gof_matches_brute_force_pmf(mu, seed):
    counts = np.random.default_rng(seed).poisson(mu + 1, 300).tolist()
    fit = poisson_gof(counts, mu)
    assert fit.tv_distance == pytest.approx(brute_tv(counts, mu, poisson_bins(mu)), abs=1e-12)


# -- presets ---------------------------------------------------------------


def test_presets():
    p = presets()
    assert p["prop11"].schedule == P.power_law([3 / 8] * 3) and p["prop11"].d_max == 3
    s = p["critical-poisson"].schedule
    assert critical_params(s.k, s.alpha, s.b, s.c).mu == pytest.approx(math.sqrt(1.5) / 2)
    assert "link_stats" in p["link-law"].observables
    assert {"prop11", "critical-poisson", "betti-dominant", "link-law", "variance-ratio",
            "garland-regime"} <= set(p)
    with pytest.raises(KeyError):
        preset("nope")


@pytest.mark.parametrize("name", ["free-faces", "boundaries", "prop11", "betti-dominant"])
def test_presets_track_theory_within_4se(name):
    cfg = preset(name).replace(trials=150)
    res = run(cfg)
    for n, s in res.summaries.items():
        for obs, z in s.z.items():
            if obs in ("N", "M") or obs.startswith("f"):
                assert z is None or abs(z) <= 4, (n, obs, z)


def test_variance_ratio_shrinks_when_mean_grows():
    res = run(preset("variance-ratio-power").replace(trials=200))
    ratios = [res.summaries[n].extra["M_variance_ratio"] for n in (30, 60, 120)]
    assert ratios[0] > ratios[1] > ratios[2]
