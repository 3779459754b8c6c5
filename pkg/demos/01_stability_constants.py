"""Where the A-stability constants come from.

The semi-discrete H3 diffusion symbol, scaled by dt, is -beta * S_k(z) with
z = alpha * dx / ... collapsed into one variable. Explicit SSP-RK of order k
stays inside its stability interval [-2, 0] on the real axis when
beta * max S_k <= 2, so beta_max = 2 / max S_k.
"""
import numpy as np

from kernelpde import beta_max_semi, s_k
from kernelpde.stability import argmax_s, scan_full_1d, scan_semi_1d

# %% The shape of S_k
z = np.logspace(-2, 2, 9)
for k in (1, 2, 3):
    print(f"k={k}  S_k on a log grid:", np.array2string(s_k(z, k), precision=4))

# %% Maximum and the resulting bound
for k in (1, 2, 3):
    print(f"k={k}  argmax z={argmax_s(k):.4f}  beta_max={beta_max_semi(k):.6f}")
# The printed table rounds k=2 up to 3.2275, a hair above the true bound,
# so the scan below uses the computed value.

# %% Scan |Q| over z at the bound and just above it
for k in (1, 2, 3):
    b = beta_max_semi(k)
    _, _, q_ok = scan_semi_1d(k, b)
    _, _, q_bad = scan_semi_1d(k, 1.02 * b)
    print(f"k={k}  min Q at beta_max: {q_ok.min():+.6f}   at 1.02 beta_max: {q_bad.min():+.6f}")

# %% Fully discrete check on a periodic ring, any CFL
rows = scan_full_1d(1, beta_max_semi(1), modes=64)
print("k=1 fully discrete max |lambda| =", max(r[2] for r in rows))
