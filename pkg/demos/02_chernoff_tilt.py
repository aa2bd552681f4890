"""
Chernoff bound for a single term
================================

Minimizes (1/n)[-lam A + ln E e^{lam z^w}] over lam >= 0 and compares the
optimum with the exact tail and with the closed-form stationary tilt.
"""

from statsum import SumSpec, TailQuery, chernoff_numeric, exact_tail, stationary_lambda
from statsum import thm1_upper_tail_sandwich

z, n = 0.3, 20
print(f"{'a':>5} {'exact':>10} {'chernoff':>10} {'lam*':>12} {'lam0':>12} {'analytic':>10}")
for a in (0.1, 0.2, 0.3, 0.4):
    q = TailQuery(SumSpec(z, 1, n), z ** (a * n))
    curve = chernoff_numeric(q)
    print(f"{a:5.1f} {exact_tail(q) / n:10.5f} {curve.value:10.5f} {curve.lambda_star:12.5g} "
          f"{stationary_lambda(q):12.5g} {thm1_upper_tail_sandwich(q).upper:10.5f}")

# lam* and lam0 disagree: the single-term Chernoff bound cannot see the
# entropy factor, so its optimum is not the stationary point of the
# relaxed objective. At small a the Chernoff value also sits above the
# analytic upper edge.
