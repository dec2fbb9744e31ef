"""
The commutator of x with the Hilbert transform
==============================================

On [0, 1] the commutator [x, H] acts as f -> (1/pi) * integral of f, so it
has rank one and every Schatten-Lorentz norm equals 1/pi.  The discrete
commutator reproduces this once the diagonal carries the self-cell term.
"""

import math

import numpy as np

from schattenosc.operators import (apply_weight, commutator, hilbert_kernel, kernel_commutator,
                                   kernel_matrix)
from schattenosc.oscnorms import LorentzParams
from schattenosc.schatten import schatten_norm, singular_values
from schattenosc.space import WeightSpec, build_grid_space, interval

S = build_grid_space(interval(), 256)
x = S.points[:, 0]

# with the self-cell diagonal
P = singular_values(kernel_commutator(x, hilbert_kernel(), S))
print("rank", P.rank(), " s0", P.values[0], " 1/pi", 1 / math.pi)
for pq in [(1, 1), (2, 2), (1, math.inf)]:
    print("S^%s" % (pq,), schatten_norm(P, LorentzParams(*pq)))

# the plain entrywise product (b_i - b_j) T_ij leaves a zero diagonal;
# that missing diagonal is -(1/(N pi)) I, so every other singular value is 1/(N pi)
E = singular_values(commutator(x, kernel_matrix(hilbert_kernel(), S, "zero")))
print("\nzero diagonal: rank", E.rank(), " tail", E.values[1], " 1/(N pi)", 1 / (S.n * math.pi))
print("trace norm", schatten_norm(E, 1))

# an A2 weight changes the norm but not the rank
W = singular_values(apply_weight(kernel_commutator(x, hilbert_kernel(), S),
                                 WeightSpec.power(0.5), S.points))
print("\non L2(x^(1/2)): rank", W.rank(), " s0", W.values[0])

# a smooth nonconstant b: singular values decay fast in one dimension
b = np.sin(2 * np.pi * x)
s = singular_values(kernel_commutator(b, hilbert_kernel(), S)).values
print("\nsin(2 pi x): first singular values", np.round(s[:6], 5))
