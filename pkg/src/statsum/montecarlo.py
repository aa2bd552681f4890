"""
Seeded Monte Carlo for S(z, M, n).

Trials are cut into fixed-size chunks. Chunk i draws from its own PCG64
stream keyed by (seed, i), so results depend only on (seed, trials,
chunk_size) and never on how many workers run the chunks.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.special import logsumexp

from .errors import DomainError
from .exact import weight_pmf
from .exponents import Direction, SumSpec, TailQuery, corollary1_bound

INVERSION_MAX_N = 64
# elements of the (rows, M) weight matrix drawn at once
BLOCK_ELEMENTS = 1 << 21
TAIL_LOG_TOL = 1e-12


@dataclass(frozen=True)
class McConfig:
    seed: int
    trials: int
    chunk_size: int = 4096

    def __post_init__(self):
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if self.trials < 1:
            raise DomainError("trials must be >= 1")
        if self.chunk_size < 1:
            raise DomainError("chunk_size must be >= 1")


@dataclass(frozen=True)
class McEstimate:
    point: float
    stderr: float
    trials: int
    log_point: float
    note: Optional[str] = None


@dataclass(frozen=True)
class ConcentrationResult:
    violations: int
    threshold: float
    bound_log: float
    runs: int
    max_abs_deviation: float


def substream(seed: int, index: int) -> np.random.Generator:
    """Independent generator for chunk (or run) `index` under `seed`."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))


class WeightSampler:
    """Draws Binomial(n, 1/2) weights with one uniform per draw.

    Inversion of the exact CDF for n <= 64, Vose's alias table above that.
    """

    def __init__(self, n: int):
        self.n = n
        probs = np.asarray(weight_pmf(n).probs, dtype=float)
        if n <= INVERSION_MAX_N:
            self._cdf = np.cumsum(probs)
            self._cdf[-1] = 1.0
            self._draw = self._inversion
        else:
            self._prob, self._alias = _alias_table(probs)
            self._draw = self._aliased

    def _inversion(self, u: np.ndarray) -> np.ndarray:
        return np.minimum(np.searchsorted(self._cdf, u, side="right"), self.n)

    def _aliased(self, u: np.ndarray) -> np.ndarray:
        scaled = u * (self.n + 1)
        col = np.minimum(scaled.astype(np.int64), self.n)
        return np.where(scaled - col < self._prob[col], col, self._alias[col])

    def draw(self, rng: np.random.Generator, size) -> np.ndarray:
        return self._draw(rng.random(size))


def _alias_table(probs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    k = probs.size
    scaled = probs * k
    prob = np.ones(k)
    alias = np.arange(k)
    small = [i for i in range(k) if scaled[i] < 1.0]
    large = [i for i in range(k) if scaled[i] >= 1.0]
    while small and large:
        s, l = small.pop(), large.pop()
        prob[s] = scaled[s]
        alias[s] = l
        scaled[l] = scaled[l] + scaled[s] - 1.0
        (small if scaled[l] < 1.0 else large).append(l)
    return prob, alias


def log_statsum_rows(weights: np.ndarray, n: int, log_z: float) -> np.ndarray:
    """ln sum_j z**w_j for each row of an integer weight matrix.

    Terms are grouped by weight and combined by log-sum-exp, so nothing
    underflows when z**n does.
    """
    rows = weights.shape[0]
    offsets = (np.arange(rows) * (n + 1))[:, None]
    counts = np.bincount((weights + offsets).ravel(), minlength=rows * (n + 1))
    counts = counts.reshape(rows, n + 1).astype(float)
    return logsumexp(np.arange(n + 1) * log_z, axis=1, b=counts)


def _chunk_log_sums(spec: SumSpec, seed: int, index: int, rows: int,
                    sampler: WeightSampler) -> np.ndarray:
    rng = substream(seed, index)
    per_block = max(1, BLOCK_ELEMENTS // spec.M)
    out = np.empty(rows)
    for start in range(0, rows, per_block):
        stop = min(rows, start + per_block)
        w = sampler.draw(rng, (stop - start, spec.M))
        out[start:stop] = log_statsum_rows(w, spec.n, spec.log_z)
    return out


def _map_chunks(spec: SumSpec, cfg: McConfig, reduce: Callable[[np.ndarray], object],
                workers: int = 1) -> list:
    sampler = WeightSampler(spec.n)
    n_chunks = -(-cfg.trials // cfg.chunk_size)

    def job(i: int):
        rows = min(cfg.chunk_size, cfg.trials - i * cfg.chunk_size)
        return reduce(_chunk_log_sums(spec, cfg.seed, i, rows, sampler))

    if workers <= 1:
        return [job(i) for i in range(n_chunks)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(job, range(n_chunks)))


def sample_log_statsum(spec: SumSpec, rng: np.random.Generator) -> float:
    spec.require_nondegenerate()
    w = WeightSampler(spec.n).draw(rng, (1, spec.M))
    return float(log_statsum_rows(w, spec.n, spec.log_z)[0])


def sample_statsum(spec: SumSpec, rng: np.random.Generator) -> float:
    """One draw of S(z, M, n)."""
    return math.exp(sample_log_statsum(spec, rng))


def sample_batch(spec: SumSpec, cfg: McConfig, workers: int = 1) -> np.ndarray:
    """cfg.trials independent draws of S, in chunk order."""
    spec.require_nondegenerate()
    return np.exp(np.concatenate(_map_chunks(spec, cfg, lambda x: x, workers)))


def estimate_tail(q: TailQuery, cfg: McConfig, workers: int = 1) -> McEstimate:
    """Plain Monte Carlo frequency of {S >= MA} or {S <= MA}."""
    spec = q.spec
    spec.require_nondegenerate()
    log_thr = math.log(spec.M) + math.log(q.A)
    if q.direction is Direction.UPPER:
        def count(x):
            return int(np.count_nonzero(x >= log_thr - TAIL_LOG_TOL))
    else:
        def count(x):
            return int(np.count_nonzero(x <= log_thr + TAIL_LOG_TOL))
    hits = sum(_map_chunks(spec, cfg, count, workers))
    point = hits / cfg.trials
    note = None
    if hits == 0:
        note = (f"zero hits; heuristic one-sided upper bound 3/trials = "
                f"{3.0 / cfg.trials:.3g}")
    return McEstimate(
        point=point,
        stderr=math.sqrt(point * (1.0 - point) / cfg.trials),
        trials=cfg.trials,
        log_point=math.log(point) if hits else -math.inf,
        note=note,
    )


def concentration_experiment(spec: SumSpec, runs: int, cfg: McConfig,
                             workers: int = 1) -> ConcentrationResult:
    """Count draws with |ln(S/(M z**(n/2)))| >= sqrt(n ln(n+1)) |ln z|.

    `runs` overrides cfg.trials; seed and chunk_size come from cfg.
    """
    threshold, bound_log = corollary1_bound(spec)
    center = math.log(spec.M) + 0.5 * spec.n * spec.log_z
    run_cfg = McConfig(cfg.seed, runs, cfg.chunk_size)

    def tally(x):
        dev = np.abs(x - center)
        return int(np.count_nonzero(dev >= threshold)), float(dev.max())

    parts = _map_chunks(spec, run_cfg, tally, workers)
    return ConcentrationResult(
        violations=sum(v for v, _ in parts),
        threshold=threshold,
        bound_log=bound_log,
        runs=runs,
        max_abs_deviation=max(d for _, d in parts),
    )
