"""Brute-force oracles, independent of the package's convolution and Chernoff code."""

import itertools
import math
from collections import defaultdict
from fractions import Fraction


def brute_law(z, M, n):
    """Exact law of S(z, M, n) by enumerating every weight tuple.

    With a Fraction z the support and probabilities are exact rationals.
    """
    pmf = [Fraction(math.comb(n, k), 2**n) for k in range(n + 1)]
    law = defaultdict(Fraction)
    for ws in itertools.product(range(n + 1), repeat=M):
        prob = Fraction(1)
        for w in ws:
            prob *= pmf[w]
        law[sum(z**w for w in ws)] += prob
    return dict(sorted(law.items()))


def brute_tail(z, M, n, A, upper=True):
    """P{S >= MA} (upper) or P{S <= MA}, exact when z and A are Fractions."""
    law = brute_law(z, M, n)
    thr = M * A
    if upper:
        return sum((p for s, p in law.items() if s >= thr), Fraction(0))
    return sum((p for s, p in law.items() if s <= thr), Fraction(0))


def log_binomial_cdf(n, k):
    """ln P{Binomial(n, 1/2) <= k}, exact integer arithmetic before the log."""
    return math.log(sum(math.comb(n, j) for j in range(k + 1))) - n * math.log(2)


def h(x):
    return 0.0 if x in (0.0, 1.0) else -x * math.log(x) - (1 - x) * math.log(1 - x)
