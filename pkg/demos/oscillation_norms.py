"""
Oscillatory norms on dyadic systems
===================================

Mean oscillations over the concentric balls of a dyadic system, summed in
l^{p,q}.  Changing the oscillation exponent, switching to the adjacent
one-third family, or replacing a power weight by Lebesgue measure only
moves the value within a bounded band.
"""

import numpy as np

from schattenosc.bench import families
from schattenosc.dyadic import build_adjacent_family, build_dyadic_system, verify_adjacency, \
    random_balls
from schattenosc.oscnorms import LorentzParams, osc_norm, osc_norm_family
from schattenosc.space import WeightSpec, build_grid_space, interval

L22 = LorentzParams(2, 2)
S = build_grid_space(interval(), 512)
system = build_dyadic_system(S, 8)
family = build_adjacent_family(S, 8)
print(len(system.cubes), "cubes in one system,", len(family), "systems in the adjacent family")

# every small ball sits in a cube of comparable size from one of the systems
rep = verify_adjacency(family, S, random_balls(S, 200, 2 / 512, 0.1, seed=1))
print("worst diam(Q) / radius over 200 balls:", round(rep.max_ratio, 3))

rows = []
for name, f in families.standard_family(20, seed=0):
    b = f(S.points)
    o1 = osc_norm(b, S, system, L22, 1.0)
    o2 = osc_norm(b, S, system, L22, 2.0)
    fam = osc_norm_family(b, family, L22, 1.0)
    rows.append((name, o1 / o2, o1 / fam))

print("\n%-18s %10s %12s" % ("function", "r=1 / r=2", "one / family"))
for name, a, c in rows:
    print("%-18s %10.4f %12.4f" % (name, a, c))

# power weight x^(1/2) against Lebesgue measure on the same grid
ratios = []
for N in (128, 256, 512):
    B = build_grid_space(interval(), N, mu=WeightSpec.power(0.5))
    sys_b = build_dyadic_system(B, 8)
    for _, f in families.standard_family(20, seed=0):
        b = f(B.points)
        ratios.append(osc_norm(b, B, sys_b, L22, 1.0, "mu") / osc_norm(b, B, sys_b, L22, 1.0, "nu"))
print("\nOsc(x^(1/2) dx) / Osc(dx) over 60 cells: [%.4f, %.4f]" % (min(ratios), max(ratios)))
