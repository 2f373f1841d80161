"""
Truncated tensor algebra
========================

Products, exponentials and logarithms of truncated tensor series.
"""

import numpy as np

from sigscore import tensor_exp, tensor_log, tensor_mul, unflatten, flatten

# a Lie-like element in dimension 2, truncated at order 3 (scalar term 0)
rng = np.random.default_rng(0)
x = unflatten(rng.normal(size=14), dim=2, order=3, scalar=0.0)

# exp lands on the group (scalar 1); log brings it back
g = tensor_exp(x)
print("scalar of exp(x):", g.scalar)
print("round-trip error:", tensor_log(g).max_abs_diff(x))

# exp(x) * exp(-x) is the unit tensor
inv = tensor_exp(-1.0 * x)
print("exp(x) exp(-x) - 1:", np.abs(flatten(tensor_mul(g, inv))).max())

# words are 1-based: coefficient of e1 e2 in level 2
print("g[(1, 2)] =", g[(1, 2)])
