"""
Upper-tail exponents of the statistical sum
===========================================

S(z, M, n) sums z**w over M random weights w ~ Binomial(n, 1/2). For a
threshold A = z**(a n) the normalized log tail (1/(M n)) ln P{S >= M A}
sits in a window around h(a) - ln 2 whose width shrinks like ln(n)/n.
"""

import math

import numpy as np

from statsum import SumSpec, TailQuery, binary_entropy, exact_tail, thm1_upper_tail_sandwich

z = 0.5
print(f"{'n':>4} {'a':>5} {'lower':>10} {'exact':>10} {'upper':>10}")
for n in (10, 20, 40):
    for a in (0.1, 0.2, 0.3, 0.4):
        q = TailQuery(SumSpec(z, 1, n), z ** (a * n))
        sw = thm1_upper_tail_sandwich(q)
        value = exact_tail(q) / n
        print(f"{n:4d} {a:5.1f} {sw.lower:10.5f} {value:10.5f} {sw.upper:10.5f}")

# The center of the window is the entropy curve itself
a = np.linspace(0.0, 0.5, 6)
print("\nh(a) - ln 2:", np.round(binary_entropy(a) - math.log(2), 5))

# %%
# For M = 2 the upper edge can be too low. A single light word already
# pushes S past 2A, so the tail decays at about half the claimed rate.
n, a = 40, 0.1
q = TailQuery(SumSpec(z, 2, n), z ** (a * n))
sw = thm1_upper_tail_sandwich(q)
print(f"\nM=2, n={n}, a={a}: exact {exact_tail(q) / (2 * n):.6f} vs upper {sw.upper:.6f}")
