"""
Bessel-Riesz transforms on the half-line
========================================

The Bessel operator on (0, 1] with measure x^(2 lambda) dx is discretized in
divergence form and the Riesz transform is built spectrally.  It is a
contraction for every lambda, and lambda = 0 recovers the plain Lebesgue
construction.
"""

import numpy as np

from schattenosc.operators import BesselSpec, bessel_riesz_operator, bessel_weight, commutator
from schattenosc.schatten import schatten_norm, singular_values
from schattenosc.space import build_grid_space, dimension_bounds, DiagnosticsConfig, half_strip

N = 128
for lam in (0.0, 0.25, 1.0):
    S = build_grid_space(half_strip(0), N, mu=bessel_weight(lam, 1))
    R = bessel_riesz_operator(BesselSpec(lam), S)
    s = singular_values(R).values
    x = S.points[:, 0]
    C = commutator(np.sin(3 * x), R)
    print("lambda %.2f  largest s %.10f  smallest s %.3e  S2([b, R]) %.4f"
          % (lam, s[0], s[-1], schatten_norm(C, 2)))

# near the wall the measure x^2 dx looks three-dimensional, away from it one-dimensional
S = build_grid_space(half_strip(0), 1024, mu=bessel_weight(1.0, 1))
cfg = DiagnosticsConfig(2.0 ** -np.arange(8, 1, -1), np.linspace(0, 1023, 9).round(), min_ratio=32)
print("\nlower / upper dimension of x^2 dx:", np.round(dimension_bounds(S, "mu", cfg), 3))
