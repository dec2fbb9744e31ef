"""
Minimal Hajlasz upper gradients
===============================

A Hajlasz upper gradient h satisfies |f(x) - f(y)| <= |x - y| (h(x) + h(y))
for every pair of points.  The half-supremum of the difference quotients is
always admissible; the smallest L^p norm comes from a linear program for
p = 1 and infinity and from a projected descent otherwise.
"""

import numpy as np

from schattenosc.bench import families
from schattenosc.funcnorms import hajlasz_norm, sobolev_norm_grid
from schattenosc.space import MetricMeasureSpace, build_grid_space, interval

two = MetricMeasureSpace(np.array([0.0, 1.0]), [0.5, 0.5], [0.5, 0.5])
print("two points, f = (0, 1), p = 1:", hajlasz_norm(np.array([0.0, 1.0]), two, 1.0).objective)

S = build_grid_space(interval(), 120)
print("\n%-16s %10s %10s %10s %8s" % ("function", "sup bound", "program", "sobolev", "status"))
for name, f in families.smooth_family(6):
    b = f(S.points)
    ub = hajlasz_norm(b, S, 2.0, "upper_bound")
    sol = hajlasz_norm(b, S, 2.0, max_iter=3000)
    print("%-16s %10.5f %10.5f %10.5f %8s" % (name, ub.objective, sol.objective,
                                              sobolev_norm_grid(b, S, 2.0),
                                              "done" if sol.converged else "capped"))
