"""
Posteriors under random coding
==============================

Sends a random codeword over BSC(p) and tracks the posterior of the true
message symbol by symbol. Errors get rarer as the block grows.
"""

import numpy as np

from statsum import bsc

ch = bsc.ChannelParams(0.05)
summary = bsc.simulate_feedback(bsc.CodeSetup(16, 0.1), ch, 1000, seed=3)
print("mean posterior of the true message, k = 0..16:")
print(np.round(summary.mean_pi_true, 3))
print(f"worst normalization error {summary.max_norm_dev:.1e}")

# %%
for n in (8, 12, 16):
    s = bsc.simulate_feedback(bsc.CodeSetup(n, 0.1), ch, 4000, seed=3)
    print(f"n={n:2d} M={bsc.CodeSetup(n, 0.1).M}: error rate {s.error_rate:.4f}, "
          f"empirical exponent {bsc.empirical_exponent(s.error_rate, n):.3f}")
