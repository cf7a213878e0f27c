"""Seeded Monte Carlo experiments over the random complex model.

Trial ``t`` of an experiment samples its complex with seed
``mix(master_seed, t)`` (see :func:`sclab.sampler.mix`).  The same trial
indices and seeds are reused for every ``n`` of the experiment.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import stats

from . import theory
from .complex import SimplicialComplex, count_free_faces, unfilled_boundaries
from .homology import betti, random_prime
from .sampler import ProbabilitySchedule, mix, sample_probs
from .spectral import garland_certificate, link_counts

log = logging.getLogger(__name__)

OBSERVABLES = ("N", "M", "f_vector", "betti", "link_stats", "garland")
WORKERS_ENV = "SCLAB_WORKERS"
GOF_THRESHOLD = 0.1


class ExperimentError(RuntimeError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    n: tuple[int, ...]
    schedule: ProbabilitySchedule
    k: int
    trials: int
    master_seed: int = 0
    observables: tuple[str, ...] = ("N", "f_vector")
    output: str | None = None
    betti_dims: tuple[int, ...] = ()  # dims whose joint positivity is reported
    rank_method: str = "modp"
    save_complexes: bool | None = None  # None: only when n <= 60
    gof_threshold: float = GOF_THRESHOLD

    def __post_init__(self):
        object.__setattr__(self, "n", tuple(int(x) for x in (self.n if isinstance(self.n, (list, tuple)) else (self.n,))))
        object.__setattr__(self, "observables", tuple(self.observables))
        object.__setattr__(self, "betti_dims", tuple(self.betti_dims) or (self.k - 1,))
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.observables:
            raise ValueError("observables must be non-empty")
        bad = set(self.observables) - set(OBSERVABLES)
        if bad:
            raise ValueError(f"unknown observables {sorted(bad)}")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if ("garland" in self.observables or "link_stats" in self.observables) and self.k < 2:
            raise ValueError("link observables need k >= 2")

    @property
    def d_max(self) -> int:
        return self.schedule.d_max

    def to_dict(self) -> dict:
        return {"name": self.name, "n": list(self.n), "schedule": self.schedule.to_dict(), "k": self.k,
                "trials": self.trials, "master_seed": self.master_seed,
                "observables": list(self.observables), "output": self.output,
                "betti_dims": list(self.betti_dims), "rank_method": self.rank_method,
                "save_complexes": self.save_complexes, "gof_threshold": self.gof_threshold}

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        d = dict(data)
        d["schedule"] = ProbabilitySchedule.from_dict(d["schedule"])
        d["n"] = tuple(d["n"]) if isinstance(d["n"], list) else d["n"]
        for key in ("observables", "betti_dims"):
            if key in d:
                d[key] = tuple(d[key])
        return cls(**d)

    def replace(self, **changes) -> "ExperimentConfig":
        d = {f: getattr(self, f) for f in self.__dataclass_fields__}
        d.update(changes)
        return ExperimentConfig(**d)


@dataclass
class ExperimentRecord:
    trial: int
    seed: int
    n: int
    N: int | None = None
    M: int | None = None
    betti: list[int] | None = None
    betti_km1: int | None = None
    f: list[int] | None = None
    L_mean: float | None = None
    link_pairs: int | None = None
    link_edges: int | None = None
    garland: bool | None = None
    wall_time: float = 0.0


def experiment_prime(master_seed: int) -> int:
    return random_prime(random.Random(mix(master_seed, 0x5EED)))


def observe(X: SimplicialComplex, config: ExperimentConfig, prime: int | None = None,
            record: ExperimentRecord | None = None) -> ExperimentRecord:
    """Compute the configured observables of one complex."""
    rec = record or ExperimentRecord(-1, -1, X.n)
    obs = config.observables
    k = config.k
    if "N" in obs:
        rec.N = count_free_faces(X, k)
    if "M" in obs:
        rec.M = unfilled_boundaries(X, k)
    if "f_vector" in obs:
        f = X.f_vector()
        rec.f = f + [0] * (config.d_max + 1 - len(f))
    if "link_stats" in obs:
        L, E = link_counts(X, k)
        rec.L_mean = float(L.mean()) if L.size else float("nan")
        rec.link_pairs = int((L * (L - 1) // 2).sum())
        rec.link_edges = int(E.sum())
    b = None
    if "betti" in obs or "garland" in obs:
        method = config.rank_method
        b = betti(X, method=method, prime=prime if method == "modp" else None, dims=config.d_max)
        if "betti" in obs:
            rec.betti = b.betti
        rec.betti_km1 = b.betti[k - 1]
    if "garland" in obs:
        cert = garland_certificate(X, k)
        rec.garland = cert.certified
        if cert.certified and rec.betti_km1 != 0 and config.rank_method != "exact":
            # a modular rank can only undershoot; settle it exactly
            rec.betti_km1 = betti(X, method="exact", dims=config.d_max).betti[k - 1]
    return rec


def run_trial(config: ExperimentConfig, n: int, trial: int, prime: int | None = None) -> ExperimentRecord:
    seed = mix(config.master_seed, trial)
    t0 = time.perf_counter()
    try:
        X = sample_probs(n, config.schedule.probs_at(n), seed)
        rec = observe(X, config, prime, ExperimentRecord(trial, seed, n))
    except Exception as exc:
        log.error("trial %d (n=%d, seed=%d) failed", trial, n, seed)
        raise ExperimentError(f"trial {trial} (n={n}, seed={seed}) failed: {exc}") from exc
    rec.wall_time = time.perf_counter() - t0
    return rec


def _run_chunk(args):
    config, n, trials, prime = args
    return [run_trial(config, n, t, prime) for t in trials]


def worker_count(workers: int | None = None) -> int:
    if workers is not None:
        return max(1, int(workers))
    return max(1, int(os.environ.get(WORKERS_ENV, "1")))


def run_records(config: ExperimentConfig, workers: int | None = None) -> list[ExperimentRecord]:
    """All trial records, ordered by (n, trial)."""
    prime = experiment_prime(config.master_seed) if config.rank_method == "modp" else None
    if prime is not None and ("betti" in config.observables or "garland" in config.observables):
        log.info("%s: modular ranks use prime %d", config.name, prime)
    w = worker_count(workers)
    records: list[ExperimentRecord] = []
    for n in config.n:
        if w == 1:
            records.extend(_run_chunk((config, n, range(config.trials), prime)))
            continue
        size = max(1, math.ceil(config.trials / (4 * w)))
        chunks = [(config, n, range(s, min(s + size, config.trials)), prime)
                  for s in range(0, config.trials, size)]
        with ProcessPoolExecutor(max_workers=w) as pool:
            for part in pool.map(_run_chunk, chunks):
                records.extend(part)
    records.sort(key=lambda r: (config.n.index(r.n), r.trial))
    return records


# -- statistics -------------------------------------------------------------


def factorial_moment(samples: Sequence[int], l: int) -> float:
    """Mean of x (x-1) ... (x-l+1)."""
    if l < 1:
        raise ValueError("order must be >= 1")
    x = np.asarray(samples, dtype=float)
    out = np.ones_like(x)
    for j in range(l):
        out *= x - j
    return float(out.mean())


def factorial_moment_se(samples: Sequence[int], l: int) -> float:
    x = np.asarray(samples, dtype=float)
    out = np.ones_like(x)
    for j in range(l):
        out *= x - j
    return float(out.std(ddof=1) / math.sqrt(len(x))) if len(x) > 1 else float("nan")


@dataclass
class PoissonFit:
    tv_distance: float
    chi2_stat: float
    chi2_pvalue: float
    bins: int
    passed: bool

    def to_dict(self):
        return asdict(self)


def poisson_bins(mu: float) -> int:
    """Last individually kept count; larger counts form one tail bin."""
    if mu < 0:
        raise ValueError("mu must be >= 0")
    if mu == 0:
        return 0
    return int(stats.poisson.ppf(0.999, mu))


def poisson_gof(counts: Sequence[int], mu: float, threshold: float = GOF_THRESHOLD) -> PoissonFit:
    """Total variation and chi-square distance between counts and Poisson(mu).

    Counts 0..K are separate bins (K the 99.9% quantile) and everything above K
    is merged into one tail bin.
    """
    counts = np.asarray(counts)
    if counts.size == 0:
        raise ValueError("counts must be non-empty")
    if (counts < 0).any():
        raise ValueError("counts must be non-negative")
    K = poisson_bins(mu)
    pmf = stats.poisson.pmf(np.arange(K + 1), mu) if mu > 0 else np.array([1.0])
    expected = np.append(pmf, max(0.0, 1.0 - pmf.sum()))
    observed = np.bincount(np.minimum(counts, K + 1), minlength=K + 2).astype(float) / counts.size
    tv = 0.5 * float(np.abs(observed - expected).sum())
    T = counts.size
    chi2 = 0.0
    used = 0
    for o, e in zip(observed * T, expected * T):
        if e > 0:
            chi2 += (o - e) ** 2 / e
            used += 1
        elif o > 0:
            chi2 = math.inf
    pval = float(stats.chi2.sf(chi2, used - 1)) if used > 1 and math.isfinite(chi2) else (
        0.0 if not math.isfinite(chi2) else 1.0)
    return PoissonFit(tv, float(chi2), pval, K + 2, tv < threshold)


def _moments(x) -> dict:
    x = np.asarray(x, dtype=float)
    T = len(x)
    mean = float(x.mean())
    var = float(x.var(ddof=1)) if T > 1 else 0.0
    return {"mean": mean, "var": var, "se": math.sqrt(var / T) if T > 1 else 0.0, "trials": T}


def _z(emp: float, theo: float, se: float) -> float | None:
    return (emp - theo) / se if se > 0 else None


def ratio_of_means(num, den) -> tuple[float, float]:
    """Ratio of sample means with its delta-method standard error."""
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    T = len(num)
    r = num.mean() / den.mean()
    resid = num - r * den
    se = math.sqrt(resid.var(ddof=1) / T) / den.mean() if T > 1 else 0.0
    return float(r), float(se)


@dataclass
class StatSummary:
    n: int
    probs: list[float]
    observables: dict = field(default_factory=dict)
    theory: dict = field(default_factory=dict)
    z: dict = field(default_factory=dict)
    poisson: dict | None = None
    factorial_moments: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)


def summarize(config: ExperimentConfig, records: Sequence[ExperimentRecord], n: int) -> StatSummary:
    recs = [r for r in records if r.n == n]
    k = config.k
    probs = config.schedule.probs_at(n)
    s = StatSummary(n, probs)
    obs = config.observables

    def track(name, values, theo=None):
        m = _moments(values)
        s.observables[name] = m
        if theo is not None:
            s.theory[name] = theo
            s.z[name] = _z(m["mean"], theo, m["se"])

    if "N" in obs:
        N = [r.N for r in recs]
        track("N", N, theory.expected_free_faces(n, k, probs) if n > k else None)
        s.factorial_moments = {str(l): {"value": factorial_moment(N, l), "se": factorial_moment_se(N, l)}
                               for l in (1, 2, 3)}
        if config.schedule.kind == "critical":
            cp = theory.critical_params(config.schedule.k, config.schedule.alpha, config.schedule.b,
                                        config.schedule.c)
            s.poisson = {"mu": cp.mu, **poisson_gof(N, cp.mu, config.gof_threshold).to_dict()}
            s.extra["mu_squared"] = cp.mu ** 2
    if "M" in obs:
        M = [r.M for r in recs]
        track("M", M, theory.expected_boundaries(n, k, probs) if n > k + 1 else None)
        m = s.observables["M"]
        s.extra["M_variance_ratio"] = m["var"] / m["mean"] ** 2 if m["mean"] > 0 else None
    if "f_vector" in obs:
        for d in range(config.d_max + 1):
            track(f"f{d}", [r.f[d] for r in recs], theory.expected_face_count(n, d, probs))
    if "betti" in obs:
        B = np.array([r.betti for r in recs])
        for d in range(B.shape[1]):
            track(f"betti{d}", B[:, d])
            s.extra[f"betti{d}_positive_fraction"] = float(np.mean(B[:, d] > 0))
        dims = [d for d in config.betti_dims if d < B.shape[1]]
        s.extra["betti_joint_positive_fraction"] = float(np.mean((B[:, dims] > 0).all(axis=1)))
        if "f_vector" in obs:
            fk = np.array([r.f[k - 1] for r in recs], dtype=float)
            ratio = np.divide(B[:, k - 1], fk, out=np.zeros_like(fk), where=fk > 0)
            s.extra["betti_over_f_median"] = float(np.median(ratio))
    if "link_stats" in obs:
        lp = theory.link_params(k, probs)
        track("L_mean", [r.L_mean for r in recs], (n - k + 1) * lp.p_bar)
        r, se = ratio_of_means([r.link_edges for r in recs], [r.link_pairs for r in recs])
        s.observables["link_edge_freq"] = {"mean": r, "se": se, "trials": len(recs)}
        s.theory["link_edge_freq"] = lp.p_prime
        s.z["link_edge_freq"] = _z(r, lp.p_prime, se)
    if "garland" in obs:
        cert = np.array([r.garland for r in recs], dtype=bool)
        zero = np.array([r.betti_km1 == 0 for r in recs], dtype=bool)
        s.extra["garland_certified_fraction"] = float(cert.mean())
        s.extra["betti_km1_zero_fraction"] = float(zero.mean())
        s.extra["garland_violations"] = [int(r.trial) for r in recs if r.garland and r.betti_km1 != 0]
    return s


# -- persistence -------------------------------------------------------------


def csv_columns(config: ExperimentConfig) -> list[str]:
    d = config.d_max
    return (["trial", "seed", "n", "N", "M", "betti_km1"] + [f"f{i}" for i in range(d + 1)]
            + ["garland", "tv_na"] + [f"betti{i}" for i in range(d + 1)]
            + ["L_mean", "link_pairs", "link_edges"])


def _cell(x):
    if x is None:
        return ""
    if isinstance(x, bool):
        return int(x)
    if isinstance(x, float):
        return repr(x)
    return x


def records_csv(config: ExperimentConfig, records: Sequence[ExperimentRecord]) -> str:
    d = config.d_max
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(csv_columns(config))
    for r in records:
        f = r.f if r.f is not None else [None] * (d + 1)
        b = r.betti if r.betti is not None else [None] * (d + 1)
        row = [r.trial, r.seed, r.n, r.N, r.M, r.betti_km1, *f, r.garland, "NA", *b,
               r.L_mean, r.link_pairs, r.link_edges]
        w.writerow([_cell(x) for x in row])
    return buf.getvalue()


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    records: list[ExperimentRecord]
    summaries: dict[int, StatSummary]
    prime: int | None = None

    @property
    def violations(self) -> list[tuple[int, int]]:
        """(n, trial) pairs where a Garland certificate coexists with nonzero Betti number."""
        return [(r.n, r.trial) for r in self.records if r.garland and r.betti_km1 != 0]

    def csv(self) -> str:
        return records_csv(self.config, self.records)

    def summary_dict(self) -> dict:
        return {"config": self.config.to_dict(), "prime": self.prime,
                "summaries": {str(n): s.to_dict() for n, s in self.summaries.items()},
                "violations": [list(v) for v in self.violations]}


def _json_default(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    raise TypeError(type(x))


def _clean(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def write_result(result: ExperimentResult, out: str | os.PathLike) -> Path:
    out = Path(out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        (out / "records.csv").write_text(result.csv())
        (out / "summary.json").write_text(
            json.dumps(_clean(result.summary_dict()), indent=2, default=_json_default) + "\n")
    except OSError as exc:
        raise ExperimentError(f"cannot write results to {out}: {exc}") from exc
    return out


def save_complexes(config: ExperimentConfig, out: Path, records: Sequence[ExperimentRecord]):
    cdir = out / "complexes"
    cdir.mkdir(parents=True, exist_ok=True)
    for r in records:
        if config.save_complexes is None and r.n > 60:
            continue
        X = sample_probs(r.n, config.schedule.probs_at(r.n), r.seed)
        (cdir / f"n{r.n}_t{r.trial}.json").write_text(X.to_json({"trial": r.trial, "seed": r.seed}))


def run(config: ExperimentConfig, workers: int | None = None, out: str | None = None) -> ExperimentResult:
    """Execute every trial, summarise each n, and persist when an output path is set."""
    records = run_records(config, workers)
    summaries = {n: summarize(config, records, n) for n in config.n}
    prime = experiment_prime(config.master_seed) if config.rank_method == "modp" else None
    result = ExperimentResult(config, records, summaries, prime)
    out = out or config.output
    if out:
        path = write_result(result, out)
        if config.save_complexes is not False:
            save_complexes(config, path, records)
    return result


# -- presets --------------------------------------------------------------------


def presets() -> dict[str, ExperimentConfig]:
    """Built-in experiment configurations."""
    P = ProbabilitySchedule
    return {
        "prop11": ExperimentConfig(
            "prop11", (40, 80), P.power_law([3 / 8, 3 / 8, 3 / 8]), k=2, trials=200, master_seed=11,
            observables=("N", "M", "f_vector", "betti"), betti_dims=(1, 2)),
        "critical-poisson": ExperimentConfig(
            "critical-poisson", (50, 100, 200), P.critical(2, [0.5, 0.0], [0.5, 0.0], 0.0), k=2,
            trials=2000, master_seed=14, observables=("N", "f_vector")),
        "betti-dominant": ExperimentConfig(
            "betti-dominant", (60,), P.power_law([0.4, 0.4]), k=2, trials=200, master_seed=13,
            observables=("N", "f_vector", "betti")),
        "link-law": ExperimentConfig(
            "link-law", (50,), P.explicit([0.7, 0.7]), k=2, trials=500, master_seed=41,
            observables=("link_stats", "f_vector")),
        "variance-ratio": ExperimentConfig(
            "variance-ratio", (30, 60, 120), P.explicit([0.6, 0.5]), k=2, trials=2000, master_seed=51,
            observables=("M", "N")),
        "variance-ratio-power": ExperimentConfig(
            "variance-ratio-power", (30, 60, 120), P.power_law([0.4, 0.4]), k=2, trials=500,
            master_seed=52, observables=("M", "N")),
        "garland-regime": ExperimentConfig(
            "garland-regime", (40,), P.power_law([0.2, 0.1]), k=2, trials=500, master_seed=12,
            observables=("garland", "N", "f_vector")),
        "free-faces": ExperimentConfig(
            "free-faces", (40,), P.explicit([0.3, 0.3]), k=2, trials=2000, master_seed=31,
            observables=("N", "f_vector")),
        "boundaries": ExperimentConfig(
            "boundaries", (40,), P.explicit([0.6, 0.5]), k=2, trials=2000, master_seed=32,
            observables=("M", "N", "f_vector")),
    }


def preset(name: str) -> ExperimentConfig:
    table = presets()
    if name not in table:
        raise KeyError(f"unknown preset {name!r}; choose from {sorted(table)}")
    return table[name]
