"""
Signatures of piecewise-linear streams
======================================

Compare the fast segment-by-segment signature with a brute-force
quadrature of the iterated integrals, and look at what the log-signature
keeps.
"""

import numpy as np

from sigscore import brute_force_signature, flatten, stream_log_signature, stream_signature

# the L-shaped path (0,0) -> (1,0) -> (1,1)
path = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]])
sig = stream_signature(path, 2)
print("signature:", flatten(sig))

# level 2 of the log-signature is the signed (Levy) area, antisymmetric
print("log-signature level 2:\n", stream_log_signature(path, 2).level(2, shaped=True))

# quadrature oracle: error shrinks like the square of the cell size,
# and Richardson extrapolation removes the leading term
rng = np.random.default_rng(1)
p = rng.uniform(-1, 1, size=(5, 2))
exact = stream_signature(p, 3)
for steps in (50, 200, 800):
    raw = brute_force_signature(p, 3, steps, extrapolate=False).max_abs_diff(exact)
    rich = brute_force_signature(p, 3, steps).max_abs_diff(exact)
    print(f"steps={steps:4d}  trapezoid {raw:.2e}  extrapolated {rich:.2e}")
