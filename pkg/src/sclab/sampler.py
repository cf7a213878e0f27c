"""Seeded sampling of the multi-parameter random complex X(n, p_1, p_2, ...).

Randomness contract
-------------------
Dimension ``d`` draws from its own Philox (counter-based) stream keyed by
``mix(seed, d)``.  Candidate d-simplices, i.e. (d+1)-vertex sets whose whole
boundary is already present, are enumerated in lexicographic order, and the
t-th candidate is kept iff the t-th uniform of the stream is below ``p_d``.
Candidates with a missing boundary face consume nothing.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .complex import SimplicialComplex, boundary_candidates

log = logging.getLogger(__name__)

MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One step of the SplitMix64 output function (state increment included)."""
    z = (x + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def mix(seed: int, index: int) -> int:
    """Derive an independent 64-bit seed from a master seed and an index."""
    return splitmix64((seed & MASK64) ^ splitmix64(index & MASK64))


def stream(seed: int, d: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=mix(seed, d)))


@dataclass(frozen=True)
class ProbabilitySchedule:
    """Rule producing p_i(n) for i = 1..d_max.

    ``kind`` is ``"explicit"`` (``probs``), ``"power_law"`` (``alpha``, with
    ``math.inf`` meaning p_i = 0) or ``"critical"`` (``k``, ``alpha``, ``b``, ``c``).
    Construct through :meth:`explicit`, :meth:`power_law` or :meth:`critical`.
    """

    kind: str
    d_max: int
    probs: tuple[float, ...] = ()
    alpha: tuple[float, ...] = ()
    b: tuple[float, ...] = ()
    k: int = 0
    c: float = 0.0

    def __post_init__(self):
        if self.d_max < 1:
            raise ValueError("d_max must be >= 1")
        if self.kind == "explicit":
            if len(self.probs) < self.d_max:
                raise ValueError("explicit schedule needs one probability per dimension")
            if any(not 0.0 <= p <= 1.0 for p in self.probs):
                raise ValueError("probabilities must lie in [0, 1]")
        elif self.kind == "power_law":
            if len(self.alpha) < self.d_max:
                raise ValueError("power-law schedule needs one exponent per dimension")
            if any(not a >= 0 for a in self.alpha):
                raise ValueError("exponents must be >= 0 (or inf)")
        elif self.kind == "critical":
            from .theory import critical_params

            if self.d_max > len(self.alpha) or len(self.alpha) != len(self.b):
                raise ValueError("critical schedule needs alpha and b for every dimension up to d_max")
            if self.k < 1 or self.k > len(self.alpha):
                raise ValueError("critical dimension k out of range")
            critical_params(self.k, self.alpha, self.b, self.c)
        else:
            raise ValueError(f"unknown schedule kind {self.kind!r}")

    @classmethod
    def explicit(cls, probs: Sequence[float], d_max: int | None = None) -> "ProbabilitySchedule":
        probs = tuple(float(p) for p in probs)
        d_max = len(probs) if d_max is None else d_max
        if len(probs) < d_max:
            probs = probs + (0.0,) * (d_max - len(probs))
        return cls("explicit", d_max, probs=probs[:d_max])

    @classmethod
    def power_law(cls, alpha: Sequence[float], d_max: int | None = None) -> "ProbabilitySchedule":
        alpha = tuple(float(a) for a in alpha)
        d_max = len(alpha) if d_max is None else d_max
        if len(alpha) < d_max:
            alpha = alpha + (math.inf,) * (d_max - len(alpha))
        return cls("power_law", d_max, alpha=alpha[:d_max])

    @classmethod
    def critical(cls, k: int, alpha: Sequence[float], b: Sequence[float], c: float = 0.0,
                 d_max: int | None = None) -> "ProbabilitySchedule":
        alpha = tuple(float(a) for a in alpha)
        b = tuple(float(x) for x in b)
        return cls("critical", k if d_max is None else d_max, alpha=alpha, b=b, k=k, c=float(c))

    def probs_at(self, n: int) -> list[float]:
        """[p_1, ..., p_{d_max}] at ``n`` vertices."""
        return [prob_at(self, i, n) for i in range(1, self.d_max + 1)]

    def to_dict(self) -> dict:
        if self.kind == "explicit":
            return {"type": "explicit", "p": list(self.probs), "d_max": self.d_max}
        if self.kind == "power_law":
            return {"type": "power_law", "alpha": [_json_float(a) for a in self.alpha], "d_max": self.d_max}
        return {"type": "critical", "k": self.k, "alpha": list(self.alpha), "b": list(self.b),
                "c": self.c, "d_max": self.d_max}

    @classmethod
    def from_dict(cls, data: dict) -> "ProbabilitySchedule":
        kind = data["type"]
        d_max = data.get("d_max")
        if kind == "explicit":
            return cls.explicit(data["p"], d_max)
        if kind == "power_law":
            return cls.power_law([_parse_float(a) for a in data["alpha"]], d_max)
        if kind == "critical":
            return cls.critical(int(data["k"]), data["alpha"], data["b"], data.get("c", 0.0), d_max)
        raise ValueError(f"unknown schedule type {kind!r}")


def _json_float(x: float):
    return "inf" if math.isinf(x) else x


def _parse_float(x) -> float:
    return math.inf if x in ("inf", "Infinity", None) else float(x)


def prob_at(schedule: ProbabilitySchedule, i: int, n: int) -> float:
    """p_i at ``n`` vertices."""
    if not 1 <= i <= schedule.d_max:
        raise ValueError(f"dimension {i} outside 1..{schedule.d_max}")
    if schedule.kind == "explicit":
        return schedule.probs[i - 1]
    a = schedule.alpha[i - 1]
    if schedule.kind == "power_law":
        return 0.0 if math.isinf(a) else float(n) ** (-a)
    from .theory import critical_params

    if n <= math.e:
        raise ValueError("critical schedule needs n > e so that log log n is defined and positive")
    cp = critical_params(schedule.k, schedule.alpha, schedule.b, schedule.c)
    base = cp.rho1 * math.log(n) + cp.rho2 * math.log(math.log(n)) + schedule.c
    if base <= 0:
        raise ValueError(f"log factor {base} is not positive at n={n}")
    p = base ** schedule.b[i - 1] * float(n) ** (-a)
    if p > 1.0:
        log.warning("critical p_%d = %.4g at n=%d clamped to 1", i, p, n)
        p = 1.0
    return max(p, 0.0)


@dataclass(frozen=True)
class SampleSpec:
    n: int
    schedule: ProbabilitySchedule
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")

    def to_dict(self) -> dict:
        return {"n": self.n, "seed": self.seed, "schedule": self.schedule.to_dict()}

    @classmethod
    def from_dict(cls, data: dict) -> "SampleSpec":
        return cls(int(data["n"]), ProbabilitySchedule.from_dict(data["schedule"]), int(data.get("seed", 0)))


def sample_probs(n: int, probs: Sequence[float], seed: int) -> SimplicialComplex:
    """Sample with fixed probabilities p_1..p_{len(probs)}."""
    X = SimplicialComplex(n, [])
    faces = [X.faces(0)]
    for d, p in enumerate(probs, start=1):
        if X.count(d - 1) == 0:
            break
        cand = boundary_candidates(X, d)
        if cand.shape[0] == 0:
            break
        if p >= 1.0:
            # still advance the stream so the variate indexing stays aligned
            keep = stream(seed, d).random(cand.shape[0]) < 1.0
        elif p <= 0.0:
            break
        else:
            keep = stream(seed, d).random(cand.shape[0]) < p
        faces.append(cand[keep])
        X = SimplicialComplex(n, faces)
    return X


def sample(spec: SampleSpec) -> SimplicialComplex:
    return sample_probs(spec.n, spec.schedule.probs_at(spec.n), spec.seed)


def special(name: str, n: int, d_max: int, seed: int, p: float, k: int | None = None) -> SimplicialComplex:
    """Named specialisations: ``erdos_renyi``, ``linial_meshulam`` and ``clique``."""
    if name == "erdos_renyi":
        probs = [p] + [0.0] * (d_max - 1)
    elif name == "linial_meshulam":
        if k is None or not 1 <= k <= d_max:
            raise ValueError("linial_meshulam needs 1 <= k <= d_max")
        probs = [1.0] * (k - 1) + [p] + [0.0] * (d_max - k)
    elif name == "clique":
        probs = [p] + [1.0] * (d_max - 1)
    else:
        raise ValueError(f"unknown special model {name!r}")
    return sample(SampleSpec(n, ProbabilitySchedule.explicit(probs, d_max), seed))


def clique_closure(X: SimplicialComplex, d_max: int) -> SimplicialComplex:
    """Clique (flag) complex of the 1-skeleton of X, up to dimension d_max."""
    G = SimplicialComplex(X.n, [X.faces(0), X.faces(1)])
    faces = [G.faces(0), G.faces(1)]
    for d in range(2, d_max + 1):
        cand = boundary_candidates(G, d)
        if cand.shape[0] == 0:
            break
        faces.append(cand)
        G = SimplicialComplex(X.n, faces)
    return G

