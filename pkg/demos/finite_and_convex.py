"""Greedy sequences for finite measures, and the means they produce in R^d.

Run:  python demos/finite_and_convex.py
"""

import numpy as np

from signedud import (
    ConvexTarget,
    FiniteSignedMeasure,
    c_constant,
    cesaro_error_trace,
    generate_finite,
    generate_signed_finite,
    subset_discrepancy_trace,
)

# A three-atom probability measure.  The greedy rule always picks the atom
# that is furthest behind its share, so the counts never drift far from N*mu.
mu = FiniteSignedMeasure(["red", "green", "blue"], [0.5, 0.3, 0.2])
seq = generate_finite(mu, 20)
print("first 20 terms:", " ".join(label[0] for label in seq.labels))

trace = subset_discrepancy_trace(generate_finite(mu, 4096))
N = np.arange(1, 4097)
print(f"worst N * discrepancy over N <= 4096: {np.max(trace * N):.3f}  (constant C = {c_constant(3)})")

# A signed measure of norm one: points follow |mu|, signs follow the atoms.
nu = FiniteSignedMeasure(["a", "b", "c"], [0.6, -0.3, 0.1])
s, eps = generate_signed_finite(nu, 1000)
signed_mass = np.array([eps[s.indices == i].sum() for i in range(3)]) / 1000
print("signed empirical masses:", np.round(signed_mass, 4), "target:", nu.weights)

# The same sequence averages vectors: pick the support points of a convex
# combination in proportion to the weights and the running mean converges
# to the barycenter at rate 1/N.
rng = np.random.default_rng(0)
ct = ConvexTarget.from_combination(rng.normal(size=(6, 4)), rng.dirichlet(np.ones(6)))
err = cesaro_error_trace(ct, 10000)
for n in (10, 100, 1000, 10000):
    print(f"N={n:>5}: |mean - x| = {err[n - 1]:.2e}   bound {float(ct.bound(n)):.2e}")
