"""
Concentration of ln S around ln(M z^{n/2})
==========================================

For many terms, ln S stays within sqrt(n ln(n+1)) |ln z| of its center
except with probability (n+1)**(-M). Monte Carlo draws never leave the band.
"""

import math

import numpy as np

from statsum import McConfig, SumSpec, concentration_experiment, sample_batch

for M in (10, 1000, 100000):
    spec = SumSpec(0.5, M, 30)
    res = concentration_experiment(spec, 1000, McConfig(seed=1, trials=1000))
    print(f"M={M:>6}: threshold {res.threshold:.4f}, largest deviation {res.max_abs_deviation:.4f}, "
          f"violations {res.violations}")

# %%
# The sample mean matches E S = M ((1+z)/2)**n
spec = SumSpec(0.9, 10, 20)
s = sample_batch(spec, McConfig(seed=42, trials=200000))
mean = spec.M * ((1 + spec.z) / 2) ** spec.n
print(f"\nsample mean {s.mean():.5f} +- {s.std(ddof=1) / math.sqrt(s.size):.5f}, closed form {mean:.5f}")
print("quantiles of ln S:", np.round(np.quantile(np.log(s), [0.01, 0.5, 0.99]), 4))
