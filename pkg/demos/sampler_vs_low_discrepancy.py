"""Random sampling against the deterministic construction.

i.i.d. points from |mu| with signs from the sign density converge like
N^(-1/2); the transported van der Corput sequence converges like log(N)/N.

Run:  python demos/sampler_vs_low_discrepancy.py
"""

import numpy as np

from signedud import (
    PLJFunction,
    iid_sampler,
    kolmogorov_statistic,
    signed_sequence_polygonal,
    star_discrepancy_signed,
    total_variation,
)

phi = PLJFunction.polygon([0.0, 0.5, 1.0], [0.0, 0.5, 0.0])
ups = total_variation(phi)
random = iid_sampler(phi, seed=2024).take(100000)
direct = signed_sequence_polygonal(phi, 100000)
print("      N   KS(random)*sqrt(N)   D*(direct)*N/log(N)")
for N in (100, 1000, 10000, 100000):
    ks = kolmogorov_statistic(random.points[:N], ups.value)
    d = star_discrepancy_signed(direct.head(N), phi)
    print(f"{N:>7}   {ks * np.sqrt(N):>18.3f}   {d * N / np.log(N):>19.3f}")
print("share of + signs in the random sample:", np.mean(random.signs == 1), "(exact 0.5)")
