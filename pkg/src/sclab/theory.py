"""Closed-form expectations, threshold inequalities and critical-window parameters.

Probabilities are passed as a sequence ``probs = (p_1, p_2, ...)``; index i
of the model is ``probs[i - 1]``.  Missing trailing entries count as 0.
Exponents ``alpha`` may contain ``math.inf`` (p_i = 0).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from math import comb
from typing import Sequence

TOL = 1e-12


def _p(probs: Sequence[float], i: int) -> float:
    return float(probs[i - 1]) if i - 1 < len(probs) else 0.0


def _prod_pow(probs, terms) -> float:
    out = 1.0
    for i, e in terms:
        if e:
            out *= _p(probs, i) ** e
    return out


def _check_probs(probs):
    if any(not 0.0 <= p <= 1.0 for p in probs):
        raise ValueError("probabilities must lie in [0, 1]")


def fill_probability(k: int, probs: Sequence[float]) -> float:
    """gamma_k: probability that a fixed (k-1)-face and an outside vertex span a k-face."""
    return _prod_pow(probs, ((i, comb(k, i)) for i in range(1, k + 1)))


def boundary_probability(k: int, probs: Sequence[float]) -> float:
    """eta_k: probability of the unfilled boundary of a fixed k-simplex."""
    return (1.0 - _p(probs, k)) * _prod_pow(probs, ((i, comb(k + 1, i + 1)) for i in range(1, k)))


def eta_gamma(k: int, probs: Sequence[float]) -> tuple[float, float]:
    _check_probs(probs)
    return boundary_probability(k, probs), fill_probability(k, probs)


def expected_face_count(n: int, d: int, probs: Sequence[float]) -> float:
    """E[f_d] = C(n, d+1) prod_{i=1}^{d} p_i^C(d+1, i+1)."""
    _check_probs(probs)
    return comb(n, d + 1) * _prod_pow(probs, ((i, comb(d + 1, i + 1)) for i in range(1, d + 1)))


def expected_free_faces(n: int, k: int, probs: Sequence[float]) -> float:
    """E[N_{k-1}], the mean number of (k-1)-faces lying in no k-face."""
    _check_probs(probs)
    if n <= k:
        raise ValueError("need n > k")
    present = _prod_pow(probs, ((i, comb(k, i + 1)) for i in range(1, k)))
    return comb(n, k) * present * (1.0 - fill_probability(k, probs)) ** (n - k)


def expected_boundaries(n: int, k: int, probs: Sequence[float]) -> float:
    """E[M_{k-1}], the mean number of unfilled k-simplex boundaries with free first face."""
    _check_probs(probs)
    if n <= k + 1:
        raise ValueError("need n > k + 1")
    eta = boundary_probability(k, probs)
    return comb(n, k + 1) * eta * (1.0 - fill_probability(k, probs)) ** (n - k - 1)


@dataclass(frozen=True)
class LinkParams:
    p_bar: float
    p_prime: float


def link_params(k: int, probs: Sequence[float]) -> LinkParams:
    """Vertex probability and edge probability of the link of a (k-2)-face."""
    if k < 2:
        raise ValueError("k must be >= 2")
    _check_probs(probs)
    p_bar = _prod_pow(probs, ((i, comb(k - 1, i)) for i in range(1, k)))
    p_prime = _prod_pow(probs, ((i, comb(k - 1, i - 1)) for i in range(1, k + 1)))
    return LinkParams(p_bar, p_prime)


# -- exponent sums --------------------------------------------------------


def _a(alpha: Sequence[float], i: int) -> float:
    return float(alpha[i - 1]) if i - 1 < len(alpha) else math.inf


def _wsum(alpha, weights) -> float:
    s = 0.0
    for i, w in weights:
        if w:
            s += w * _a(alpha, i)
    return s


def vanishing_sum(k: int, alpha) -> float:
    """sum_{i=1}^{k} alpha_i C(k, i); below 1 means no free (k-1)-faces."""
    return _wsum(alpha, ((i, comb(k, i)) for i in range(1, k + 1)))


def link_sum(k: int, alpha) -> float:
    """sum_{i=1}^{k-1} alpha_i C(k-1, i)."""
    return _wsum(alpha, ((i, comb(k - 1, i)) for i in range(1, k)))


def boundary_sum(k: int, alpha) -> float:
    """sum_{i=1}^{k-1} alpha_i C(k+1, i+1); below k+1 means simplex boundaries appear."""
    return _wsum(alpha, ((i, comb(k + 1, i + 1)) for i in range(1, k)))


class Regime(str, Enum):
    VANISHING = "VanishingCohomology"
    BETTI_DOMINANT = "NontrivialBettiDominant"
    VIA_BOUNDARIES = "NontrivialViaBoundaries"
    TRIVIAL_LOWER = "TrivialHomologyLower"
    BOUNDARY = "Boundary"
    INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class RegimeInput:
    k: int
    alpha: tuple[float, ...]
    pk_is_one: bool = False

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if any(not a >= 0 for a in self.alpha):
            raise ValueError("exponents must be >= 0 (or inf)")
        object.__setattr__(self, "alpha", tuple(float(a) for a in self.alpha))


@dataclass(frozen=True)
class RegimeVerdict:
    label: Regime
    k: int
    pk_is_one: bool
    vanishing_sum: float   # compared with 1
    link_sum: float        # compared with 1
    boundary_sum: float    # compared with k + 1
    applicable: tuple[Regime, ...] = field(default=())

    def to_dict(self) -> dict:
        f = lambda x: "inf" if math.isinf(x) else x  # noqa: E731
        return {"k": self.k, "label": self.label.value, "pk_is_one": self.pk_is_one,
                "vanishing_sum": f(self.vanishing_sum), "link_sum": f(self.link_sum),
                "boundary_sum": f(self.boundary_sum),
                "applicable": [r.value for r in self.applicable]}


def label_from_sums(k: int, pk_is_one: bool, s_van: float, s_link: float, s_bd: float,
                    tol: float = TOL) -> tuple[Regime, tuple[Regime, ...]]:
    """Regime label and every regime whose hypotheses hold strictly.

    The boundary-cycle regime takes precedence over the Betti-dominant one when
    both apply, since it is the mechanism that also yields integral classes.
    """
    applicable = []
    if s_van < 1 - tol:
        applicable.append(Regime.VANISHING)
    if s_van > 1 + tol:
        if not pk_is_one and s_bd < k + 1 - tol:
            applicable.append(Regime.VIA_BOUNDARIES)
        if s_link < 1 - tol:
            applicable.append(Regime.BETTI_DOMINANT)
    if s_bd > k + 1 + tol:
        applicable.append(Regime.TRIVIAL_LOWER)
    if applicable:
        return applicable[0], tuple(applicable)
    if abs(s_van - 1) <= tol or abs(s_bd - (k + 1)) <= tol or abs(s_link - 1) <= tol:
        return Regime.BOUNDARY, ()
    return Regime.INDETERMINATE, ()


def classify_regime(inp: RegimeInput) -> RegimeVerdict:
    s_van = vanishing_sum(inp.k, inp.alpha)
    s_link = link_sum(inp.k, inp.alpha)
    s_bd = boundary_sum(inp.k, inp.alpha)
    label, applicable = label_from_sums(inp.k, inp.pk_is_one, s_van, s_link, s_bd)
    return RegimeVerdict(label, inp.k, inp.pk_is_one, s_van, s_link, s_bd, applicable)


@dataclass(frozen=True)
class CriticalParams:
    k: int
    rho1: float
    rho2: float
    c: float
    mu: float
    alpha: tuple[float, ...]
    b: tuple[float, ...]


def critical_params(k: int, alpha: Sequence[float], b: Sequence[float], c: float = 0.0) -> CriticalParams:
    """Log-correction coefficients and limiting Poisson mean for the critical window."""
    if len(alpha) < k or len(b) < k:
        raise ValueError("alpha and b need at least k entries")
    sa = sum(alpha[i - 1] * comb(k, i) for i in range(1, k + 1))
    sb = sum(b[i - 1] * comb(k, i) for i in range(1, k + 1))
    if abs(sa - 1.0) > TOL or abs(sb - 1.0) > TOL:
        raise ValueError(f"critical window needs sum alpha_i C(k,i) = 1 = sum b_i C(k,i); got {sa}, {sb}")
    rho1 = k - sum(alpha[i - 1] * comb(k, i + 1) for i in range(1, k))
    rho2 = sum(b[i - 1] * comb(k, i + 1) for i in range(1, k))
    mu = rho1 ** rho2 * math.exp(-c) / math.factorial(k)
    return CriticalParams(k, rho1, rho2, float(c), mu, tuple(alpha), tuple(b))


def vertex_support_bound(k: int, alpha: Sequence[float]) -> float:
    """Infimal D such that strongly connected (k-1)-subcomplexes have < D + k vertices."""
    denom = link_sum(k, alpha) - 1.0
    if denom <= 0:
        raise ValueError("bound needs sum alpha_i C(k-1, i) > 1")
    return (k - sum(_a(alpha, i) * comb(k, i + 1) for i in range(1, k))) / denom
