"""Tail bounds, exact laws and simulation for the statistical sum
S(z, M, n) = sum_j z**w_j over random binary vectors, with a BSC(p)
posterior and rate-solver layer on top."""

from .errors import (
    BudgetError,
    DegenerateSpecError,
    DomainError,
    NoRootError,
    NumericFailure,
    StatSumError,
    WindowError,
)
from .exponents import (
    ChernoffCurve,
    Direction,
    ExponentSandwich,
    SumSpec,
    TailQuery,
    binary_entropy,
    binom_bounds,
    chernoff_numeric,
    corollary1_bound,
    entropy_argument,
    entropy_quadratic_gap,
    stationary_lambda,
    thm1_lower_tail_bound,
    thm1_upper_tail_sandwich,
    thm2_lower_tail_bound,
    thm2_upper_tail_sandwich,
)
from .exact import (
    DiscreteDistribution,
    WeightPmf,
    duality_transform_check,
    exact_log_mgf,
    exact_mean,
    exact_sum_distribution,
    exact_tail,
    weight_pmf,
)
from .montecarlo import (
    McConfig,
    McEstimate,
    concentration_experiment,
    estimate_tail,
    sample_batch,
    sample_statsum,
)

__version__ = "0.1.0"
