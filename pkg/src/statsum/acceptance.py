"""
Acceptance criteria, runnable from pytest and from ``statsum selftest``.

Each criterion returns a CriterionResult; a criterion passes only when
every check holds at its tolerance and the wall time stays under budget.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import bsc, exact, exponents, montecarlo
from .errors import NoRootError
from .exponents import LN2, Direction, SumSpec, TailQuery, binary_entropy

Z_GRID = (0.3, 0.5, 0.8)
N_GRID = (10, 20, 40)
M_GRID = (1, 2)
A_GRID_UPPER = (0.1, 0.2, 0.3, 0.4)
A_GRID_LOWER = (0.6, 0.7, 0.8, 0.9)


@dataclass(frozen=True)
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float
    budget: float

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return (f"[{mark}] C{self.number:<2d} {self.title} "
                f"({self.seconds:.2f}s / {self.budget:g}s) {self.detail}")


@dataclass(frozen=True)
class Criterion:
    number: int
    title: str
    budget: float
    fast: bool
    check: Callable[[], tuple[bool, str]]

    def run(self) -> CriterionResult:
        t0 = time.perf_counter()
        ok, detail = self.check()
        dt = time.perf_counter() - t0
        if dt >= self.budget:
            ok = False
            detail += f"; runtime {dt:.1f}s over budget"
        return CriterionResult(self.number, self.title, ok, detail, dt, self.budget)


CRITERIA: dict[int, Criterion] = {}


def criterion(number: int, title: str, budget: float, fast: bool = True):
    def register(fn):
        CRITERIA[number] = Criterion(number, title, budget, fast, fn)
        return fn
    return register


def _upper_grid():
    for z in Z_GRID:
        for n in N_GRID:
            for M in M_GRID:
                for a in A_GRID_UPPER:
                    yield z, n, M, a


# ============================================================================

@criterion(1, "Upper-tail sandwich containment (72 points)", 10.0)
def c1_sandwich():
    misses = []
    for z, n, M, a in _upper_grid():
        q = TailQuery(SumSpec(z, M, n), z ** (a * n), Direction.UPPER)
        value = exact.exact_tail(q) / (M * n)
        sw = exponents.thm1_upper_tail_sandwich(q)
        if not sw.contains(value, tol=1e-12):
            misses.append(f"(z={z}, n={n}, M={M}, a={a}): {value:.6f} not in "
                          f"[{sw.lower:.6f}, {sw.upper:.6f}]")
    return not misses, f"{72 - len(misses)}/72 contained" + ("; " + "; ".join(misses) if misses else "")


@criterion(2, "Lower-tail bounds for z < 1 and z > 1 (mirrored grid)", 10.0)
def c2_lower_tails():
    misses = []
    total = 0
    for z in Z_GRID:
        for n in N_GRID:
            for M in M_GRID:
                for a in A_GRID_LOWER:
                    q1 = TailQuery(SumSpec(z, M, n), z ** (a * n), Direction.LOWER)
                    zz = 1.0 / z
                    q2 = TailQuery(SumSpec(zz, M, n), zz ** ((1.0 - a) * n), Direction.LOWER)
                    for q, bound_fn in ((q1, exponents.thm1_lower_tail_bound),
                                        (q2, exponents.thm2_lower_tail_bound)):
                        total += 1
                        value = exact.exact_tail(q) / (M * n)
                        bound = bound_fn(q)
                        if value > bound + 1e-12:
                            misses.append(f"(z={q.spec.z:.4g}, n={n}, M={M}, a={a}): {value} > {bound}")
    return not misses, f"{total - len(misses)}/{total} within bound" + ("; " + "; ".join(misses) if misses else "")


@criterion(3, "Duality of S(z,M,n) and z^n S(1/z,M,n)", 1.0)
def c3_duality():
    reports = []
    ok = True
    for z, M, n in ((1 / 3, 2, 4), (0.5, 1, 1), (0.7, 3, 3)):
        r = exact.duality_transform_check(SumSpec(z, M, n), support_rtol=1e-10, prob_atol=1e-12)
        ok &= r.ok
        reports.append(f"({z:.4g},{M},{n}): support dev {r.max_support_dev:.1e}, prob dev {r.max_prob_dev:.1e}")
    return ok, "; ".join(reports)


@criterion(4, "Chernoff dominance chain and stationary tilt (M=1)", 30.0)
def c4_chernoff():
    chain_misses = []
    lambda_misses = []
    for z, n, M, a in _upper_grid():
        if M != 1:
            continue
        q = TailQuery(SumSpec(z, 1, n), z ** (a * n), Direction.UPPER)
        ex = exact.exact_tail(q) / n
        curve = exponents.chernoff_numeric(q)
        cap = exponents.thm1_upper_tail_sandwich(q).upper + math.log(n + 1) / n
        if not ex - 1e-12 <= curve.value <= cap + 1e-12:
            chain_misses.append(f"(z={z}, n={n}, a={a}): exact {ex:.5f}, chernoff {curve.value:.5f}, "
                                f"analytic+slack {cap:.5f}")
        lam0 = exponents.stationary_lambda(q)
        if abs(curve.lambda_star - lam0) > 1e-6 * lam0:
            lambda_misses.append(f"(z={z}, n={n}, a={a}): lambda* {curve.lambda_star:.6g} vs {lam0:.6g}")
    ok = not chain_misses and not lambda_misses
    detail = (f"chain holds at {36 - len(chain_misses)}/36, tilt matches at {36 - len(lambda_misses)}/36")
    if chain_misses:
        detail += "; chain: " + "; ".join(chain_misses)
    if lambda_misses:
        detail += "; tilt: " + "; ".join(lambda_misses[:5]) + (" ..." if len(lambda_misses) > 5 else "")
    return ok, detail


@criterion(5, "Moment identity (closed form, enumeration, Monte Carlo)", 60.0, fast=False)
def c5_moments():
    worst_rel = 0.0
    worst_z = 0.0
    for z in Z_GRID:
        for n in N_GRID:
            for M in M_GRID:
                spec = SumSpec(z, M, n)
                mu = exact.exact_mean(spec)
                worst_rel = max(worst_rel, abs(exact.exact_sum_distribution(spec).mean() - mu) / mu)
                s = montecarlo.sample_batch(spec, montecarlo.McConfig(42, 10**6))
                se = s.std(ddof=1) / math.sqrt(s.size)
                worst_z = max(worst_z, abs(s.mean() - mu) / se)
    ok = worst_rel <= 1e-12 and worst_z <= 5.0
    return ok, f"max relative mean gap {worst_rel:.1e}; max |MC - mean|/stderr {worst_z:.2f}"


@criterion(6, "Concentration bound at enumerable scale", 1.0)
def c6_corollary():
    details = []
    ok = True
    for n, expect_empty in ((8, True), (12, False)):
        spec = SumSpec(0.5, 2, n)
        thr, bound_log = exponents.corollary1_bound(spec)
        lp = exact.exact_deviation_log_probability(spec, thr)
        ok &= lp <= bound_log and (not expect_empty or lp == -math.inf)
        details.append(f"n={n}: ln P = {lp:.4g} <= {bound_log:.4g}")
    return ok, "; ".join(details)


@criterion(7, "Concentration experiment (M=1e5, n=30, 1e3 runs)", 120.0, fast=False)
def c7_concentration():
    res = montecarlo.concentration_experiment(SumSpec(0.5, 10**5, 30), 1000, montecarlo.McConfig(1, 1000))
    return res.violations == 0, (f"violations {res.violations}; threshold {res.threshold:.4f}; "
                                 f"max deviation {res.max_abs_deviation:.4f}")


@criterion(8, "Monte Carlo tail vs exact oracle", 60.0, fast=False)
def c8_mc_tail():
    details = []
    ok = True
    for spec, A in ((SumSpec(0.5, 2, 2), 0.5), (SumSpec(0.5, 2, 10), 0.5**5)):
        q = TailQuery(spec, A, Direction.UPPER)
        truth = math.exp(exact.exact_tail(q))
        for seed in (7, 8, 9):
            est = montecarlo.estimate_tail(q, montecarlo.McConfig(seed, 10**6))
            gap = abs(est.point - truth)
            ok &= gap <= 4 * est.stderr
            details.append(f"n={spec.n} seed={seed}: {gap / est.stderr:.2f} se")
    return ok, "; ".join(details)


@criterion(9, "Rate solvers", 1.0)
def c9_rates():
    ok = True
    details = []
    worst_esp = max(bsc.sphere_packing(bsc.capacity(ch), ch).E_sp
                    for ch in map(bsc.ChannelParams, (0.01, 0.1, 0.25, 0.4)))
    ok &= abs(worst_esp) <= 1e-12
    details.append(f"max |E_sp(C)| {worst_esp:.1e}")
    worst_rt = 0.0
    for p in (0.01, 0.1, 0.25, 0.4):
        ch = bsc.ChannelParams(p)
        for R in np.linspace(0.0, bsc.capacity(ch), 101):
            rho = bsc.invert_rate(R, ch)
            worst_rt = max(worst_rt, abs(LN2 - binary_entropy(rho) - R))
    ok &= worst_rt <= 1e-10
    details.append(f"round trip {worst_rt:.1e}")
    r4 = bsc.rho1_matching(bsc.ChannelParams(0.4))
    r1 = bsc.rho1_matching(bsc.ChannelParams(0.1))
    ok &= r4.exists and r4.residual <= 1e-10 and not r1.exists
    details.append(f"rho1(0.4) = {r4.rho1!r} (residual {r4.residual!r}); rho1(0.1) = {r1.rho1!r}")
    z1 = bsc.z1_of_rate(LN2 - binary_entropy(0.3), bsc.ChannelParams(0.1))
    ok &= abs(z1 - math.exp(-0.0822829 / 0.2)) <= 1e-6
    details.append(f"z1 = {z1:.8f}")
    return ok, "; ".join(details)


@criterion(10, "Tangency continuity (E0 = 1.0, p = 0.1)", 1.0)
def c10_tangent():
    ch = bsc.ChannelParams(0.1)
    E0 = 1.0
    try:
        t = bsc.critical_tangent(ch, E0)
    except NoRootError as exc:
        return False, f"no tangent: {exc}"
    left = E0 - t.lambda0 * t.R_crit
    right = bsc.sphere_packing(t.R_crit, ch).E_sp
    ok = abs(left - right) <= 1e-8 and t.residual <= 1e-10
    return ok, f"jump {abs(left - right):.1e}; residual {t.residual:.1e}"


@criterion(11, "Feedback simulation sanity", 120.0, fast=False)
def c11_feedback():
    ch = bsc.ChannelParams(0.05)
    norm = bsc.simulate_feedback(bsc.CodeSetup(16, 0.1), ch, 1000, seed=3)
    rates = [bsc.simulate_feedback(bsc.CodeSetup(n, 0.1), ch, 10**4, seed=3).error_rate
             for n in (8, 12, 16)]
    ok = norm.max_norm_dev <= 1e-10 and rates[0] > rates[1] > rates[2]
    return ok, f"max normalization error {norm.max_norm_dev:.1e}; error rates n=8,12,16: {rates}"


DETERMINISM_COMMANDS = (
    ["tail", "--mode", "mc", "--z", "0.5", "--M", "2", "--n", "2", "--A", "0.5",
     "--direction", "upper", "--trials", "1000000", "--seed", "7"],
    ["concentration", "--z", "0.5", "--M", "100000", "--n", "30", "--runs", "1000", "--seed", "1"],
    ["feedback-sim", "--p", "0.05", "--R", "0.1", "--n", "16", "--trials", "1000", "--seed", "3"],
)


@criterion(12, "Determinism of randomized outputs", 120.0, fast=False)
def c12_determinism():
    from .cli import execute

    same = []
    for argv in DETERMINISM_COMMANDS:
        first = execute(list(argv))
        second = execute(list(argv))
        same.append(first == second)
    spec = SumSpec(0.3, 2, 20)
    cfg = montecarlo.McConfig(42, 10**5)
    a = montecarlo.sample_batch(spec, cfg).tobytes()
    b = montecarlo.sample_batch(spec, cfg, workers=4).tobytes()
    same.append(a == b)
    return all(same), f"{sum(same)}/{len(same)} repeated runs byte-identical"


def run_all(fast_only: bool = False, echo: Callable[[str], None] | None = None) -> list[CriterionResult]:
    results = []
    for number in sorted(CRITERIA):
        c = CRITERIA[number]
        if fast_only and not c.fast:
            continue
        r = c.run()
        results.append(r)
        if echo:
            echo(r.line())
    return results
