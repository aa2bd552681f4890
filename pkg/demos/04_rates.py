"""
Sphere-packing curve and the tangent line
=========================================

Over BSC(p) the sphere-packing exponent runs from E_sp(0) = ln(1/(4pq))/2
down to zero at capacity. A straight line from (0, E0) touches the curve
only when E0 is below E_sp(0).
"""

import numpy as np

from statsum import bsc
from statsum.errors import NoRootError

ch = bsc.ChannelParams(0.1)
C = bsc.capacity(ch)
print(f"p={ch.p}: capacity {C:.5f} nats, E_sp(0) {bsc.sphere_packing(0.0, ch).E_sp:.5f}")

for R in np.linspace(0, C, 6):
    sol = bsc.sphere_packing(R, ch)
    print(f"R={R:.4f}  rho={sol.rho:.4f}  E_sp={sol.E_sp:.5f}")

# %%
E0 = 0.4
t = bsc.critical_tangent(ch, E0)
print(f"\nE0={E0}: lambda0={t.lambda0:.5f}, R_crit={t.R_crit:.5f}")
for R in (0.0, t.R_crit, 0.3):
    print(f"  F bound at R={R:.4f}: {bsc.f_upper_bound(R, ch, E0, t):.5f}")

try:
    bsc.critical_tangent(ch, 1.0)
except NoRootError as exc:
    print(f"\nE0=1.0: {exc}")

# %%
for p in (0.1, 0.4):
    r = bsc.rho1_matching(bsc.ChannelParams(p))
    print(f"rho1 at p={p}: {r.rho1 if r.exists else 'none'}")
print(f"z1 at R=0.05: {bsc.z1_of_rate(0.05, ch):.5f}")
