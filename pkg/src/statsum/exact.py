"""
Exact law of S(z, M, n) for small instances.

The distribution is built by M-fold convolution of the law of z**w,
merging support points that agree to 1e-12 relative. This is the ground
truth every bound and every sampler in the package is checked against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import logsumexp

from .errors import BudgetError, DomainError
from .exponents import Direction, SumSpec, TailQuery

ENUMERATION_BUDGET = 10**7
WEIGHT_PMF_CAP = 1000
MERGE_RTOL = 1e-12
TAIL_RTOL = 1e-12


@dataclass(frozen=True)
class WeightPmf:
    """Binomial(n, 1/2) probabilities probs[k] = C(n, k) 2**-n."""

    n: int
    probs: np.ndarray


@dataclass(frozen=True)
class DiscreteDistribution:
    support: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        support = np.asarray(self.support, dtype=float)
        probs = np.asarray(self.probs, dtype=float)
        if support.ndim != 1 or support.shape != probs.shape:
            raise ValueError("support and probs must be 1-D arrays of equal length")
        if support.size and np.any(np.diff(support) <= 0):
            raise ValueError("support must be strictly increasing")
        if np.any(probs < 0):
            raise ValueError("probabilities must be nonnegative")
        if abs(math.fsum(probs) - 1.0) > 1e-12:
            raise ValueError("probabilities must sum to 1")
        support.setflags(write=False)
        probs.setflags(write=False)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "probs", probs)

    def mean(self) -> float:
        return math.fsum(self.support * self.probs)

    def prob_at(self, value: float, rtol: float = TAIL_RTOL) -> float:
        hit = np.abs(self.support - value) <= rtol * abs(value)
        return math.fsum(self.probs[hit])


@dataclass(frozen=True)
class DualityReport:
    ok: bool
    max_support_dev: float
    max_prob_dev: float

    def __bool__(self):
        return self.ok


def weight_pmf(n: int) -> WeightPmf:
    """Exact Binomial(n, 1/2) pmf, each entry correctly rounded from C(n,k)/2**n."""
    if int(n) != n or n < 1:
        raise DomainError(f"n must be an integer >= 1, got {n!r}")
    if n > WEIGHT_PMF_CAP:
        raise BudgetError(f"n={n} exceeds the weight pmf cap {WEIGHT_PMF_CAP}")
    denom = 2**n
    probs = np.array([math.comb(n, k) / denom for k in range(n + 1)])
    probs.setflags(write=False)
    return WeightPmf(int(n), probs)


def _merge(values: np.ndarray, probs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    order = np.argsort(values, kind="stable")
    values = values[order]
    probs = probs[order]
    if values.size < 2:
        return values, probs
    new = np.empty(values.size, dtype=bool)
    new[0] = True
    new[1:] = np.diff(values) > MERGE_RTOL * np.abs(values[1:])
    starts = np.flatnonzero(new)
    return values[starts], np.add.reduceat(probs, starts)


def _check_budget(spec: SumSpec) -> None:
    size = (spec.n + 1) ** spec.M
    if size > ENUMERATION_BUDGET:
        raise BudgetError(
            f"enumeration budget exceeded: (n+1)^M = {spec.n + 1}^{spec.M} = {size} "
            f"> {ENUMERATION_BUDGET}"
        )


@lru_cache(maxsize=64)
def _convolved(z: float, M: int, n: int) -> DiscreteDistribution:
    pmf = weight_pmf(n).probs
    base_values, base_probs = _merge(z ** np.arange(n + 1, dtype=float), pmf.copy())
    values, probs = base_values, base_probs
    for _ in range(M - 1):
        values, probs = _merge(
            (values[:, None] + base_values[None, :]).ravel(),
            (probs[:, None] * base_probs[None, :]).ravel(),
        )
    return DiscreteDistribution(values, probs)


def exact_sum_distribution(spec: SumSpec) -> DiscreteDistribution:
    """Law of S(z, M, n); requires (n+1)**M <= ENUMERATION_BUDGET."""
    spec.require_nondegenerate()
    _check_budget(spec)
    return _convolved(spec.z, spec.M, spec.n)


def _log_fsum(probs: np.ndarray) -> float:
    total = math.fsum(probs)
    return math.log(total) if total > 0 else -math.inf


def exact_tail(q: TailQuery) -> float:
    """ln P{S >= MA} or ln P{S <= MA}; an atom at MA counts toward both."""
    dist = exact_sum_distribution(q.spec)
    threshold = q.spec.M * q.A
    if q.direction is Direction.UPPER:
        mask = dist.support >= threshold * (1.0 - TAIL_RTOL)
    else:
        mask = dist.support <= threshold * (1.0 + TAIL_RTOL)
    # 1 - 1e-16 style rounding must not report a log-probability above 0
    return min(_log_fsum(dist.probs[mask]), 0.0)


def exact_deviation_log_probability(spec: SumSpec, threshold: float) -> float:
    """ln P{|ln(S / (M z**(n/2)))| >= threshold}, by enumeration."""
    dist = exact_sum_distribution(spec)
    dev = np.abs(np.log(dist.support) - math.log(spec.M) - 0.5 * spec.n * spec.log_z)
    return min(_log_fsum(dist.probs[dev >= threshold * (1.0 - TAIL_RTOL)]), 0.0)


def exact_mean(spec: SumSpec) -> float:
    """E S = M 2**-n (1+z)**n."""
    return spec.M * ((1.0 + spec.z) / 2.0) ** spec.n


def exact_log_mgf(lam: float, z: float, n: int) -> float:
    """ln E exp(lam z**w), w ~ Binomial(n, 1/2)."""
    if n > WEIGHT_PMF_CAP:
        raise BudgetError(f"n={n} exceeds the weight pmf cap {WEIGHT_PMF_CAP}")
    lc = np.array([math.log(math.comb(n, k)) for k in range(n + 1)])
    return float(logsumexp(lc + lam * z ** np.arange(n + 1, dtype=float)) - n * math.log(2.0))


def duality_transform_check(spec: SumSpec, support_rtol: float = 1e-10,
                            prob_atol: float = 1e-12) -> DualityReport:
    """Compare the law of S(z,M,n) with that of z**n S(1/z,M,n)."""
    direct = exact_sum_distribution(spec)
    dual = exact_sum_distribution(spec.dual())
    mapped = dual.support * spec.z**spec.n
    if mapped.size != direct.support.size:
        return DualityReport(False, math.inf, math.inf)
    # z**n maps the dual support onto itself in the same order
    support_dev = float(np.max(np.abs(mapped - direct.support) / direct.support))
    prob_dev = float(np.max(np.abs(dual.probs - direct.probs)))
    return DualityReport(support_dev <= support_rtol and prob_dev <= prob_atol, support_dev, prob_dev)
