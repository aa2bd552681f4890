"""
Large-deviation exponents for the statistical sum
==================================================

S(z, M, n) = sum_j z**w_j where w_1, ..., w_M are the Hamming weights of
i.i.d. uniform binary n-vectors (so each w_j ~ Binomial(n, 1/2)).

Everything here is a pure function of its arguments. Tail bounds are
reported in normalized form, i.e. as bounds on (1/(M n)) ln P{...}, in nats.

Provides:
  - binary entropy and the binomial-coefficient sandwich
  - the entropy argument a0 / a1 of a threshold A
  - exponent sandwiches for the upper tail (z < 1 and, by duality, z > 1)
  - upper bounds for the lower tail
  - the concentration threshold around ln(M z**(n/2))
  - the exact single-letter Chernoff bound, minimized numerically over the
    tilt parameter, and the closed-form stationary tilt
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import optimize
from scipy.special import entr, logsumexp

from .errors import DegenerateSpecError, DomainError, NumericFailure, WindowError

LN2 = math.log(2.0)

# Window endpoints are compared in log space: |ln A - ln edge| <= WINDOW_RTOL
# is the same as a 1e-12 relative tolerance on A.
WINDOW_RTOL = 1e-12

LAMBDA_CAP = 1e9
LAMBDA_XTOL = 1e-12


# ============================================================================
#  Domain types
# ============================================================================

@dataclass(frozen=True)
class SumSpec:
    """The triple (z, M, n) defining S(z, M, n)."""

    z: float
    M: int
    n: int

    def __post_init__(self):
        if not (math.isfinite(self.z) and self.z > 0):
            raise DomainError(f"z must be a positive finite real, got {self.z!r}")
        if int(self.M) != self.M or self.M < 1:
            raise DomainError(f"M must be an integer >= 1, got {self.M!r}")
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be an integer >= 1, got {self.n!r}")
        object.__setattr__(self, "z", float(self.z))
        object.__setattr__(self, "M", int(self.M))
        object.__setattr__(self, "n", int(self.n))

    @property
    def degenerate(self) -> bool:
        return self.z == 1.0

    @property
    def log_z(self) -> float:
        return math.log(self.z)

    def require_nondegenerate(self) -> None:
        if self.degenerate:
            raise DegenerateSpecError("degenerate z=1: S(1, M, n) = M with probability 1")

    def dual(self) -> "SumSpec":
        """The spec (1/z, M, n); S(z,M,n) has the law of z**n * S(1/z,M,n)."""
        return SumSpec(1.0 / self.z, self.M, self.n)


class Direction(str, Enum):
    UPPER = "upper"  # event S >= M A
    LOWER = "lower"  # event S <= M A


@dataclass(frozen=True)
class TailQuery:
    spec: SumSpec
    A: float
    direction: Direction = Direction.UPPER

    def __post_init__(self):
        if not (math.isfinite(self.A) and self.A > 0):
            raise DomainError(f"A must be a positive finite real, got {self.A!r}")
        object.__setattr__(self, "A", float(self.A))
        object.__setattr__(self, "direction", Direction(self.direction))

    @classmethod
    def of(cls, z: float, n: int, A: float, direction="upper", M: int = 1) -> "TailQuery":
        return cls(SumSpec(z, M, n), A, Direction(direction))


@dataclass(frozen=True)
class ExponentSandwich:
    """Lower/upper bounds on (1/(M n)) ln P, in nats."""

    lower: float
    upper: float
    a_star: float
    slack_lower: float
    slack_upper: float

    @property
    def center(self) -> float:
        return self.lower + self.slack_lower

    def contains(self, value: float, tol: float = 0.0) -> bool:
        return self.lower - tol <= value <= self.upper + tol


@dataclass(frozen=True)
class ChernoffCurve:
    lambda_star: float
    value: float
    a_at_optimum: float


# ============================================================================
#  Entropy and binomial coefficients
# ============================================================================

def binary_entropy(x):
    """h(x) = -x ln x - (1-x) ln(1-x) in nats, with h(0) = h(1) = 0.

    Accepts scalars or arrays; raises DomainError outside [0, 1].
    """
    arr = np.asarray(x, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError(f"binary entropy argument must lie in [0, 1], got {x!r}")
    out = entr(arr) + entr(1.0 - arr)
    return float(out) if out.ndim == 0 else out


def binom_bounds(n: int, k: int) -> tuple[float, float]:
    """(e^{n h(k/n)}/(n+1), e^{n h(k/n)}), which sandwich C(n, k)."""
    if n < 0 or k < 0 or k > n:
        raise DomainError(f"need 0 <= k <= n, got n={n}, k={k}")
    if n == 0:
        return 1.0, 1.0
    upper = math.exp(n * binary_entropy(k / n))
    return upper / (n + 1), upper


def entropy_quadratic_gap(epsilon: float) -> tuple[float, float]:
    """(h(1/2 - eps), ln 2 - 2 eps**2); the first never exceeds the second."""
    if not 0.0 <= epsilon <= 0.5:
        raise DomainError(f"epsilon must lie in [0, 1/2], got {epsilon!r}")
    return binary_entropy(0.5 - epsilon), LN2 - 2.0 * epsilon * epsilon


# ============================================================================
#  Entropy argument and windows
# ============================================================================

def _log_ratio(q: TailQuery) -> float:
    """ln A / (n ln z)."""
    return math.log(q.A) / (q.spec.n * q.spec.log_z)


def entropy_argument(q: TailQuery) -> float:
    """a0 = ln A/(n ln z) for z < 1, a1 = 1 - ln A/(n ln z) for z > 1."""
    q.spec.require_nondegenerate()
    r = _log_ratio(q)
    a = r if q.spec.z < 1.0 else 1.0 - r
    # WINDOW_RTOL on A is WINDOW_RTOL/(n |ln z|) on a
    tol = WINDOW_RTOL / (q.spec.n * abs(q.spec.log_z))
    if a < -tol or a > 1.0 + tol:
        raise WindowError(f"entropy argument {a!r} outside [0, 1] for A={q.A!r}")
    return min(max(a, 0.0), 1.0)


def _check_window(q: TailQuery, lo_exp: float, hi_exp: float, label: str) -> None:
    """Require z**lo_exp <= A <= z**hi_exp (exponents in units of n), in log space."""
    lz = q.spec.log_z
    n = q.spec.n
    edges = sorted((lo_exp * n * lz, hi_exp * n * lz))
    la = math.log(q.A)
    if la < edges[0] - WINDOW_RTOL or la > edges[1] + WINDOW_RTOL:
        raise WindowError(
            f"A={q.A!r} outside the window {label} "
            f"[{math.exp(edges[0])!r}, {math.exp(edges[1])!r}] for z={q.spec.z!r}, n={n}"
        )


def _require(q: TailQuery, direction: Direction, z_below_one: bool) -> None:
    q.spec.require_nondegenerate()
    if q.direction is not direction:
        raise DomainError(f"expected a {direction.value}-tail query, got {q.direction.value}")
    if (q.spec.z < 1.0) != z_below_one:
        raise DomainError(f"z={q.spec.z!r} must be {'< 1' if z_below_one else '> 1'} here")


# ============================================================================
#  Tail bounds
# ============================================================================

def thm1_upper_tail_sandwich(q: TailQuery) -> ExponentSandwich:
    """Sandwich for (1/(Mn)) ln P{S >= MA}, 0 < z < 1, z**(n/2) <= A <= 1."""
    _require(q, Direction.UPPER, z_below_one=True)
    _check_window(q, 0.5, 0.0, "z^{n/2} <= A <= 1")
    n = q.spec.n
    a0 = entropy_argument(q)
    center = binary_entropy(a0) - LN2
    slack_lower = math.log(n + 1) / n
    slack_upper = math.log(n) / n
    return ExponentSandwich(center - slack_lower, center + slack_upper, a0, slack_lower, slack_upper)


def thm1_lower_tail_bound(q: TailQuery) -> float:
    """Upper bound on (1/(Mn)) ln P{S <= MA}, 0 < z < 1, z**n <= A <= z**(n/2)."""
    _require(q, Direction.LOWER, z_below_one=True)
    _check_window(q, 1.0, 0.5, "z^n <= A <= z^{n/2}")
    n = q.spec.n
    a0 = entropy_argument(q)
    return binary_entropy(a0) - LN2 + math.log(n + 1) / n


def dual_threshold(A: float, z: float, n: int) -> float:
    """A z**(-n), in two half-steps so z**(-n) never goes subnormal on its own."""
    half = n // 2
    return A * z ** (-half) * z ** (-(n - half))


def _dual_query(q: TailQuery) -> TailQuery:
    return TailQuery(q.spec.dual(), dual_threshold(q.A, q.spec.z, q.spec.n), q.direction)


def thm2_upper_tail_sandwich(q: TailQuery) -> ExponentSandwich:
    """Sandwich for z > 1, z**(n/2) <= A <= z**n.

    Evaluated on the dual query (1/z, M, n) with threshold A z**(-n).
    """
    _require(q, Direction.UPPER, z_below_one=False)
    _check_window(q, 0.5, 1.0, "z^{n/2} <= A <= z^n")
    return thm1_upper_tail_sandwich(_dual_query(q))


def thm2_lower_tail_bound(q: TailQuery) -> float:
    """Upper bound on (1/(Mn)) ln P{S <= MA} for z > 1, 1 <= A <= z**(n/2)."""
    _require(q, Direction.LOWER, z_below_one=False)
    _check_window(q, 0.0, 0.5, "1 <= A <= z^{n/2}")
    return thm1_lower_tail_bound(_dual_query(q))


def corollary1_bound(spec: SumSpec) -> tuple[float, float]:
    """Return (threshold, log_bound).

    P{|ln(S/(M z**(n/2)))| >= threshold} <= exp(log_bound), with
    threshold = sqrt(n ln(n+1)) |ln z| and log_bound = -M ln(n+1).
    """
    spec.require_nondegenerate()
    n = spec.n
    threshold = math.sqrt(n * math.log(n + 1)) * abs(spec.log_z)
    return threshold, -spec.M * math.log(n + 1)


# ============================================================================
#  Chernoff machinery
# ============================================================================

def _log_binom_row(n: int) -> np.ndarray:
    return np.array([math.log(math.comb(n, k)) for k in range(n + 1)])


def _signed(q: TailQuery) -> float:
    return 1.0 if q.direction is Direction.UPPER else -1.0


def chernoff_objective(lam: float, q: TailQuery) -> float:
    """(1/n)[-s lam A + ln sum_l C(n,l) e^{s lam z^l}] - ln 2, s = +1 upper, -1 lower.

    An upper bound on (1/(Mn)) ln P for every lam >= 0 and every M.
    """
    n = q.spec.n
    s = _signed(q)
    zl = q.spec.z ** np.arange(n + 1, dtype=float)
    return float((-s * lam * q.A + logsumexp(_log_binom_row(n) + s * lam * zl)) / n - LN2)


def _tilted(lam: float, q: TailQuery, lc: np.ndarray, zl: np.ndarray) -> np.ndarray:
    w = lc + _signed(q) * lam * zl
    return np.exp(w - logsumexp(w))


def chernoff_numeric(q: TailQuery) -> ChernoffCurve:
    """Minimize `chernoff_objective` over lam >= 0.

    The objective is convex in lam with derivative s(m(lam) - A)/n, where
    m(lam) is the mean of z**w under the tilted weight law. The upper end of
    the bracket grows geometrically until the derivative turns nonnegative
    (cap LAMBDA_CAP), then the derivative root is bisected.
    """
    q.spec.require_nondegenerate()
    n = q.spec.n
    s = _signed(q)
    lc = _log_binom_row(n)
    zl = q.spec.z ** np.arange(n + 1, dtype=float)
    ks = np.arange(n + 1, dtype=float)

    def slope(lam: float) -> float:
        return s * (float(_tilted(lam, q, lc, zl) @ zl) - q.A)

    if slope(0.0) >= 0.0:
        lam_star = 0.0
    else:
        hi = 1.0
        while slope(hi) < 0.0:
            hi *= 2.0
            if hi > LAMBDA_CAP:
                raise NumericFailure(
                    f"Chernoff minimization did not bracket below lambda={LAMBDA_CAP:g} "
                    f"(A={q.A!r} at or beyond the support edge for the {q.direction.value} tail)"
                )
        lam_star = optimize.bisect(slope, hi / 2.0 if hi > 1.0 else 0.0, hi,
                                   xtol=LAMBDA_XTOL, maxiter=500)
    value = chernoff_objective(lam_star, q)
    a_opt = float(_tilted(lam_star, q, lc, zl) @ ks) / n
    return ChernoffCurve(lam_star, min(value, 0.0), a_opt)


def relaxed_objective(lam: float, a, q: TailQuery):
    """f(lam, a) = -lam A + n h(a) + lam z**(a n) for the upper tail and
    g(lam, a) = lam A + n h(a) - lam z**(a n) for the lower tail."""
    s = _signed(q)
    a = np.asarray(a, dtype=float)
    out = -s * lam * q.A + q.spec.n * binary_entropy(a) + s * lam * q.spec.z ** (a * q.spec.n)
    return float(out) if out.ndim == 0 else out


def stationary_lambda(q: TailQuery) -> float:
    """Tilt at which the stationary point of the relaxed objective sits at
    a = entropy_argument(q).

    Substituting z**(a n) = A into ln((1-a)/a) -/+ lam z**(a n) ln z = 0 gives
    lam = ln((1-a)/a) / (-/+ A ln z). Returns inf at a = 0 (upper) or a = 1 (lower).
    """
    spec = q.spec
    spec.require_nondegenerate()
    if spec.z > 1.0:
        raise DomainError("stationary_lambda is stated for 0 < z < 1")
    if q.direction is Direction.UPPER:
        _check_window(q, 0.5, 0.0, "z^{n/2} <= A <= 1")
        a = entropy_argument(q)
        if a == 0.0:
            return math.inf
        lam = math.log((1.0 - a) / a) / (-q.A * spec.log_z)
    else:
        _check_window(q, 1.0, 0.5, "z^n <= A <= z^{n/2}")
        a = entropy_argument(q)
        if a == 1.0:
            return math.inf
        lam = math.log((1.0 - a) / a) / (q.A * spec.log_z)
    # a = 1/2 gives -0.0
    return max(lam, 0.0)
