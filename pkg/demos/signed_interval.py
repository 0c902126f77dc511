"""Signed sequences on [0, 1] for a tent and a two-jump step.

The diagonal construction approximates the target by continuous polygons,
builds a signed van der Corput sequence for each and lists ever longer
prefixes of them.  Both the unsigned and the signed empirical distribution
functions converge at every point.

Run:  python demos/signed_interval.py
"""

import numpy as np

from signedud import (
    BVOracle,
    PLJFunction,
    diagonal_signed_sequence,
    empirical_cdf,
    empirical_functionals,
    riemann_stieltjes,
    total_variation,
)

targets = {
    "tent": PLJFunction.polygon([0.0, 0.5, 1.0], [0.0, 0.5, 0.0]),
    "two-jump step": PLJFunction.step((0.0, 1.0), [1 / 3, 2 / 3], [0.5, -0.5]),
}
probes = np.linspace(0.0, 1.0, 11)

for name, phi in targets.items():
    seq = diagonal_signed_sequence(BVOracle.from_plj(phi))
    ups = total_variation(phi)
    seq.take(100000)
    print(f"\n{name}: approximants scheduled for the first 1e5 terms: {seq.schedule.K_max}")
    for N in (1000, 10000, 100000):
        pre = seq.take(N)
        eu = np.abs(empirical_cdf(pre, probes, signed=False) - ups.value(probes)).max()
        es = np.abs(empirical_cdf(pre, probes) - phi.value(probes)).max()
        print(f"  N={N:>6}: max error unsigned {eu:.4f}, signed {es:.4f}")
    f = empirical_functionals(seq.take(100000), lambda x: x)
    print(f"  mean of x: signed {f.signed:+.5f}, exact {riemann_stieltjes(lambda x: x, phi):+.5f}")
