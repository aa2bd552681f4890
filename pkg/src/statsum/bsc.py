"""
BSC(p) application layer.

Likelihoods, message posteriors and odds under random coding, a
random-coding simulator with maximum-posterior decoding, and root solvers
for the sphere-packing curve and related rate equations. Rates are in nats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import optimize

from .errors import DomainError, NoRootError, WindowError
from .exponents import LN2, binary_entropy
from .montecarlo import substream

XTOL = 1e-12
MAXITER = 200
RESIDUAL_TOL = 1e-10
MAX_MESSAGES = 2**20


# ============================================================================
#  Types
# ============================================================================

@dataclass(frozen=True)
class ChannelParams:
    p: float
    q: float = field(init=False)
    z: float = field(init=False)

    def __post_init__(self):
        if not 0.0 < self.p < 0.5:
            raise DomainError(f"crossover probability must lie in (0, 1/2), got {self.p!r}")
        object.__setattr__(self, "q", 1.0 - self.p)
        object.__setattr__(self, "z", self.p / (1.0 - self.p))

    @property
    def capacity(self) -> float:
        return capacity(self)


@dataclass(frozen=True)
class CodeSetup:
    n: int
    R: float
    M: int = field(init=False)

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("block length must be >= 1")
        if not 0.0 <= self.R <= LN2 * (1 + 1e-12):
            raise DomainError(f"rate must lie in [0, ln 2] nats, got {self.R!r}")
        object.__setattr__(self, "M", int(round(math.exp(self.R * self.n))))

    @classmethod
    def from_bits(cls, n: int, rate_bits: float) -> "CodeSetup":
        return cls(n, rate_bits * LN2)


@dataclass(frozen=True)
class PosteriorState:
    k: int
    distances: np.ndarray
    posteriors: np.ndarray
    n: Optional[int] = None

    @classmethod
    def initial(cls, M: int, n: Optional[int] = None) -> "PosteriorState":
        return cls(0, np.zeros(M, dtype=np.int64), np.full(M, 1.0 / M), n)


@dataclass(frozen=True)
class RateSolution:
    rho: float
    R: float
    E_sp: float
    residual: float


@dataclass(frozen=True)
class TangentSolution:
    lambda0: float
    R_crit: float
    rho_crit: float
    residual: float


@dataclass(frozen=True)
class Rho1Solution:
    rho1: Optional[float]
    residual: Optional[float]

    @property
    def exists(self) -> bool:
        return self.rho1 is not None


@dataclass(frozen=True)
class FeedbackRun:
    error: bool
    true_index: int
    pi_true: np.ndarray
    log_odds: np.ndarray
    max_norm_dev: float


@dataclass(frozen=True)
class FeedbackSummary:
    runs: int
    errors: int
    mean_pi_true: np.ndarray
    mean_log_odds: np.ndarray
    max_norm_dev: float

    @property
    def error_rate(self) -> float:
        return self.errors / self.runs


# ============================================================================
#  Likelihoods, posteriors, odds
# ============================================================================

def log_likelihood(y, x, ch: ChannelParams) -> float:
    """ln p(y|x) = n ln q + d(y, x) ln z."""
    y = np.asarray(y)
    x = np.asarray(x)
    if y.shape != x.shape or y.ndim != 1:
        raise DomainError(f"length mismatch: {y.shape} vs {x.shape}")
    d = int(np.count_nonzero(y != x))
    return y.size * math.log(ch.q) + d * math.log(ch.z)


def _lse(x: np.ndarray) -> float:
    # scipy's logsumexp costs ~20us per call, too slow for per-symbol updates
    m = x.max()
    return float(m + math.log(np.exp(x - m).sum()))


def posteriors_from_distances(distances, z: float) -> np.ndarray:
    """pi_i = z**d_i / sum_j z**d_j, shifted by min d before exponentiation."""
    d = np.asarray(distances, dtype=float)
    w = np.exp((d - d.min()) * math.log(z))
    return w / w.sum()


def posterior_update(state: PosteriorState, received_bit: int, codebook_column,
                     ch: ChannelParams) -> PosteriorState:
    if state.n is not None and state.k >= state.n:
        raise DomainError(f"time index {state.k} already at block length {state.n}")
    column = np.asarray(codebook_column)
    if column.shape != state.distances.shape:
        raise DomainError("codebook column must have one bit per message")
    distances = state.distances + (column != received_bit)
    return PosteriorState(state.k + 1, distances,
                          posteriors_from_distances(distances, ch.z), state.n)


def odds_statistic(state: PosteriorState, i: int, z_eval: float) -> float:
    """ln[z_eval**d_i / sum_{j != i} z_eval**d_j].

    With z_eval = p/q this is the log posterior odds of message i; other
    values give the tilted statistic.
    """
    d = state.distances
    if d.size < 2:
        raise DomainError("odds need at least one competing message (M >= 2)")
    if not 0 <= i < d.size:
        raise DomainError(f"message index {i} out of range")
    if not z_eval > 0:
        raise DomainError("z_eval must be positive")
    lz = math.log(z_eval)
    rivals = np.concatenate((d[:i], d[i + 1:]))
    return d[i] * lz - _lse(rivals * lz)


def concentrated_log_odds(d_i: float, n: int, M: int, z_eval: float) -> float:
    """Log odds with the competitor sum replaced by (M-1) z_eval**(n/2)."""
    lz = math.log(z_eval)
    return d_i * lz - math.log(M - 1) - 0.5 * n * lz


def simulate_feedback_run(setup: CodeSetup, ch: ChannelParams,
                          rng: np.random.Generator) -> FeedbackRun:
    """One transmission with a fresh uniform random codebook.

    Decoding is maximum posterior; a tie for the maximum counts as an error.
    """
    M, n = setup.M, setup.n
    if M < 2:
        raise DomainError(f"simulation needs M >= 2 messages, got M={M}")
    if M > MAX_MESSAGES:
        raise DomainError(f"M={M} exceeds the simulation cap {MAX_MESSAGES}")
    codebook = rng.integers(0, 2, size=(M, n), dtype=np.int8)
    true = int(rng.integers(M))
    y = codebook[true] ^ (rng.random(n) < ch.p).astype(np.int8)

    state = PosteriorState.initial(M, n)
    pi_true = np.empty(n + 1)
    log_odds = np.empty(n + 1)
    pi_true[0] = state.posteriors[true]
    log_odds[0] = odds_statistic(state, true, ch.z)
    worst = abs(math.fsum(state.posteriors) - 1.0)
    for k in range(n):
        state = posterior_update(state, y[k], codebook[:, k], ch)
        pi_true[k + 1] = state.posteriors[true]
        log_odds[k + 1] = odds_statistic(state, true, ch.z)
        worst = max(worst, abs(math.fsum(state.posteriors) - 1.0))
    rivals = np.delete(state.distances, true)
    error = bool(rivals.min() <= state.distances[true])
    return FeedbackRun(error, true, pi_true, log_odds, worst)


def simulate_feedback(setup: CodeSetup, ch: ChannelParams, runs: int, seed: int) -> FeedbackSummary:
    """`runs` independent transmissions; run r draws from substream (seed, r)."""
    if runs < 1:
        raise DomainError("runs must be >= 1")
    errors = 0
    pi_sum = np.zeros(setup.n + 1)
    odds_sum = np.zeros(setup.n + 1)
    worst = 0.0
    for r in range(runs):
        run = simulate_feedback_run(setup, ch, substream(seed, r))
        errors += run.error
        pi_sum += run.pi_true
        odds_sum += run.log_odds
        worst = max(worst, run.max_norm_dev)
    return FeedbackSummary(runs, errors, pi_sum / runs, odds_sum / runs, worst)


def empirical_exponent(error_rate: float, n: int) -> float:
    """(1/n) ln(1/P_e); inf when no errors were observed."""
    if not 0.0 <= error_rate <= 1.0:
        raise DomainError("error rate must lie in [0, 1]")
    return math.inf if error_rate == 0.0 else -math.log(error_rate) / n


# ============================================================================
#  Rate / exponent solvers
# ============================================================================

def capacity(ch: ChannelParams) -> float:
    """C(p) = p ln(2p) + q ln(2q) = ln 2 - h(p)."""
    return ch.p * math.log(2 * ch.p) + ch.q * math.log(2 * ch.q)


def sphere_packing_exponent(rho: float, ch: ChannelParams) -> float:
    """rho ln(rho/p) + (1-rho) ln((1-rho)/q)."""
    return rho * math.log(rho / ch.p) + (1.0 - rho) * math.log((1.0 - rho) / ch.q)


def _bisect(f, lo: float, hi: float) -> float:
    return optimize.bisect(f, lo, hi, xtol=XTOL, maxiter=MAXITER)


def invert_rate(R: float, ch: ChannelParams) -> float:
    """rho in [p, 1/2] with ln 2 - h(rho) = R."""
    C = capacity(ch)
    if not -1e-15 <= R <= C + 1e-15:
        raise WindowError(f"rate {R!r} outside [0, C(p)] = [0, {C!r}]")

    def f(rho):
        return LN2 - binary_entropy(rho) - R

    if f(ch.p) <= 0.0:
        return ch.p
    if f(0.5) >= 0.0:
        return 0.5
    return _bisect(f, ch.p, 0.5)


def sphere_packing(R: float, ch: ChannelParams) -> RateSolution:
    rho = invert_rate(R, ch)
    residual = abs(LN2 - binary_entropy(rho) - R)
    return RateSolution(rho, R, sphere_packing_exponent(rho, ch), residual)


def rho_of_lambda(lam: float, ch: ChannelParams) -> float:
    """1/rho = 1 + (q/p)**(1/(1+lam))."""
    if lam < 0:
        raise DomainError("lambda must be >= 0")
    if math.isinf(lam):
        return 0.5
    return 1.0 / (1.0 + (ch.q / ch.p) ** (1.0 / (1.0 + lam)))


def tangent_residual(lam: float, ch: ChannelParams, E0: float) -> float:
    """E0 - lam ln 2 + (1+lam) ln[p**(1/(1+lam)) + q**(1/(1+lam))]."""
    s = 1.0 / (1.0 + lam)
    return E0 - lam * LN2 + (1.0 + lam) * math.log(ch.p**s + ch.q**s)


def critical_tangent(ch: ChannelParams, E0: float, lambda_max: float = 1e6) -> TangentSolution:
    """Slope lambda0 of the line from (0, E0) tangent to the sphere-packing curve.

    The residual decreases from E0 at lam = 0 towards E0 - E_sp(0, p) as
    lam grows, so a root exists only for 0 < E0 < E_sp(0, p).
    """
    if not E0 > 0:
        raise DomainError(f"E0 must be positive, got {E0!r}")
    lo_val = tangent_residual(0.0, ch, E0)
    hi_val = tangent_residual(lambda_max, ch, E0)
    if not (lo_val > 0.0 > hi_val):
        raise NoRootError(
            f"no sign change on [0, {lambda_max:g}]: residual({0})={lo_val!r}, "
            f"residual({lambda_max:g})={hi_val!r}; a tangent needs E0 < E_sp(0,p) = "
            f"{sphere_packing_exponent(0.5, ch)!r}"
        )
    lam0 = _bisect(lambda lam: tangent_residual(lam, ch, E0), 0.0, lambda_max)
    rho = rho_of_lambda(lam0, ch)
    return TangentSolution(lam0, LN2 - binary_entropy(rho), rho, abs(tangent_residual(lam0, ch, E0)))


def f_upper_bound(R: float, ch: ChannelParams, E0: float,
                  tangent: Optional[TangentSolution] = None) -> float:
    """E0 - lambda0 R below the critical rate, E_sp(R, p) above it."""
    C = capacity(ch)
    if not 0.0 <= R <= C + 1e-15:
        raise WindowError(f"rate {R!r} outside [0, C(p)] = [0, {C!r}]")
    t = tangent or critical_tangent(ch, E0)
    if R <= t.R_crit:
        return E0 - t.lambda0 * R
    return sphere_packing(R, ch).E_sp


def rho1_residual(rho: float, ch: ChannelParams) -> float:
    """(1/2 - rho) ln(q/p) - (ln 2 - h(rho))."""
    return (0.5 - rho) * math.log(ch.q / ch.p) - (LN2 - binary_entropy(rho))


def rho1_matching(ch: ChannelParams, grid: int = 1000) -> Rho1Solution:
    """Root of rho1_residual in (0, 1/2), or an empty solution.

    rho = 1/2 is always a root and is excluded; the scan stops short of it,
    where the residual is positive for every p.
    """
    rhos = np.linspace(0.0, 0.5, grid + 1)[:-1]
    vals = np.array([rho1_residual(r, ch) for r in rhos])
    sign_change = np.flatnonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) <= 0)
    if sign_change.size == 0:
        return Rho1Solution(None, None)
    i = int(sign_change[0])
    if vals[i] == 0.0:
        root = float(rhos[i])
    else:
        root = _bisect(lambda r: rho1_residual(r, ch), rhos[i], rhos[i + 1])
    return Rho1Solution(root, abs(rho1_residual(root, ch)))


def z1_of_rate(R: float, ch: ChannelParams) -> float:
    """z1 = exp(-R / (1/2 - rho)) with rho from ln 2 - h(rho) = R."""
    C = capacity(ch)
    if not 0.0 < R < C:
        raise WindowError(f"rate {R!r} outside (0, C(p)) = (0, {C!r})")
    rho = invert_rate(R, ch)
    if rho < ch.p:
        raise WindowError(f"solved rho={rho!r} below p={ch.p!r}")
    return math.exp(-R / (0.5 - rho))


def odds_tail_exponent(ch: ChannelParams, R: float, c: float) -> float:
    """-ln q - a0 ln z - h(a0) with a0 = 1/2 + (R + c)/ln z.

    The exponent of P{X_1(n) <= e^{cn}} once the competitor sum is replaced
    by its typical value M z**(n/2). The expression equals the divergence
    D(a0 || p), the exponent of P{d_1 >= a0 n}, so a0 must lie in [p, 1].
    """
    lz = math.log(ch.z)
    a0 = 0.5 + (R + c) / lz
    if not ch.p - 1e-15 <= a0 <= 1.0 + 1e-15:
        raise WindowError(f"a0={a0!r} outside [p, 1] = [{ch.p!r}, 1]")
    a0 = min(max(a0, ch.p), 1.0)
    return -math.log(ch.q) - a0 * lz - binary_entropy(a0)
