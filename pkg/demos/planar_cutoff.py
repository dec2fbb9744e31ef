"""
Refinement in one and two dimensions
====================================

For a smooth nonconstant b the commutator with a Riesz transform in the
plane is Hilbert-Schmidt only at grid level: the discrete S^2 norm keeps
creeping up under refinement, while S^4 settles.  On the line S^2 is
already finite, and the values settle at once.
"""

import numpy as np

from schattenosc.bench import classify
from schattenosc.operators import hilbert_kernel, kernel_commutator, riesz_kernel
from schattenosc.schatten import schatten_norm, singular_values
from schattenosc.space import build_grid_space, interval, square


def b2(P):
    return np.sin(2 * P[:, 0]) + P[:, 1] ** 2


s2, s4 = [], []
for N in (16, 32, 48):
    S = build_grid_space(square(), N)
    P = singular_values(kernel_commutator(b2(S.points), riesz_kernel(2, 1), S))
    s2.append(schatten_norm(P, 2))
    s4.append(schatten_norm(P, 4))
    print("N = %2d^2   S2 %.4f   S4 %.4f" % (N, s2[-1], s4[-1]))

print("S2 steps", np.round(np.array(s2[1:]) / s2[:-1] - 1, 4), "->", classify(s2))
print("S4 total change %.4f" % (abs(s4[-1] - s4[0]) / s4[0]), "->", classify(s4))

# the squared discrete Hilbert-Schmidt norm grows like log N
logs = np.log([16, 32, 48])
print("S2^2 against log N, slope per log-unit:", np.round(np.diff(np.square(s2)) / np.diff(logs), 4))

print()
for N in (64, 128, 256):
    S = build_grid_space(interval(), N)
    b = np.sin(2 * np.pi * S.points[:, 0])
    print("line, N = %3d   S2 %.6f" % (N, schatten_norm(kernel_commutator(b, hilbert_kernel(), S), 2)))
