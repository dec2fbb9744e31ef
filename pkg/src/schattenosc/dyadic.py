"""Dyadic cube systems on grid spaces and the one-third-trick adjacent family.

Cubes of generation ``k`` are the half-open boxes

    origin + L * 2**-k * ([0, 1)^D + m + (-1)**k * shift)

intersected with the point set, ``L`` being the domain scale.  For shifts in
``{0, 1/3, 2/3}`` these boxes nest across generations.  For any other shift
each box is additionally intersected with its parent cube, so the tree
invariants (partition per generation, nesting, additivity) hold regardless.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .space import MetricMeasureSpace, ball


@dataclass(eq=False)
class Cube:
    generation: int
    index: tuple[int, ...]
    center: np.ndarray
    side_length: float
    point_indices: np.ndarray
    parent: int | None = None
    children: list[int] = field(default_factory=list)
    system_id: int = 0
    # diameter of the member point set, i.e. of the cube as a subset of the space
    diameter: float = 0.0

    def __repr__(self):
        return (f"Cube(gen={self.generation}, index={self.index}, "
                f"side={self.side_length:g}, points={self.point_indices.size})")


@dataclass(eq=False)
class DyadicSystem:
    cubes: list[Cube]
    shift: np.ndarray
    generations: int
    labels: list[np.ndarray]
    space: MetricMeasureSpace = field(repr=False)
    expansion: float = 3.0
    system_id: int = 0
    _balls: dict = field(default_factory=dict, repr=False)

    def generation(self, k: int) -> list[Cube]:
        return [q for q in self.cubes if q.generation == k]

    def cube_of(self, point: int, k: int) -> Cube:
        return self.cubes[self.labels[k][point]]

    def concentric_balls(self, c: float | None = None) -> list[np.ndarray]:
        """Index sets of ``B_Q`` for every cube, cached per expansion factor."""
        c = self.expansion if c is None else float(c)
        if c not in self._balls:
            self._balls[c] = [concentric_ball(self.space, q, c) for q in self.cubes]
        return self._balls[c]


def _shift_for(k: int, shift: np.ndarray, alternate: bool) -> np.ndarray:
    return shift * (-1) ** k if alternate else shift


def build_dyadic_system(space: MetricMeasureSpace, G: int, shift: Sequence[float] | float = 0.0,
                        *, expansion: float = 3.0, system_id: int = 0,
                        alternate: bool = True) -> DyadicSystem:
    """Dyadic cubes of generations ``0..G`` over a grid space.

    ``alternate`` applies the ``(-1)**k`` sign to the shift at generation
    ``k``, which is what makes the one-third shifts nest.
    """
    if G < 1:
        raise ValueError("need at least one generation below the root")
    if space.domain is None:
        raise ValueError("dyadic systems need a grid space with a domain")
    D = space.dim
    shift = np.broadcast_to(np.asarray(shift, dtype=float), (D,)).copy()
    if np.any(shift < 0) or np.any(shift >= 1):
        raise ValueError("shift components must lie in [0, 1)")
    origin = space.domain.lower
    L = space.domain.scale
    rel = (space.points - origin) / L

    cubes: list[Cube] = []
    labels: list[np.ndarray] = []
    parent_label = np.zeros(space.n, dtype=np.int64)
    for k in range(G + 1):
        s = _shift_for(k, shift, alternate)
        m = np.floor(rel * 2 ** k - s).astype(np.int64)
        key = np.column_stack([m, parent_label])
        uniq, inverse = np.unique(key, axis=0, return_inverse=True)
        inverse = inverse.ravel()
        base = len(cubes)
        side = L * 2.0 ** -k
        order = np.argsort(inverse, kind="stable")
        bounds = np.searchsorted(inverse[order], np.arange(len(uniq) + 1))
        for u, row in enumerate(uniq):
            members = order[bounds[u]:bounds[u + 1]]
            idx = tuple(int(v) for v in row[:D])
            pts = space.points[members]
            q = Cube(k, idx, origin + side * (row[:D] + s + 0.5), side, members,
                     parent=None if k == 0 else int(row[D]), system_id=system_id,
                     diameter=float(np.linalg.norm(pts.max(axis=0) - pts.min(axis=0))))
            if q.parent is not None:
                cubes[q.parent].children.append(base + u)
            cubes.append(q)
        lab = base + inverse
        labels.append(lab)
        parent_label = lab
    return DyadicSystem(cubes, shift, G, labels, space, expansion, system_id)


def build_adjacent_family(space: MetricMeasureSpace, G: int, *,
                          expansion: float = 3.0) -> list[DyadicSystem]:
    """The ``2**D`` systems with shifts in ``{0, 1/3}**D`` (alternating sign per generation)."""
    return [build_dyadic_system(space, G, np.array(s), expansion=expansion, system_id=i)
            for i, s in enumerate(itertools.product((0.0, 1.0 / 3.0), repeat=space.dim))]


def concentric_ball(space: MetricMeasureSpace, cube: Cube, c: float = 3.0) -> np.ndarray:
    """``B(z_Q, c * side)`` with the cube centre snapped to the nearest grid point."""
    if c < 1:
        raise ValueError("expansion factor must be at least 1")
    d = np.linalg.norm(space.points - cube.center, axis=1)
    return ball(space, int(np.argmin(d)), c * cube.side_length)


class AdjacencyReport(NamedTuple):
    ratios: np.ndarray
    max_ratio: float
    failures: list


def verify_adjacency(family: Sequence[DyadicSystem], space: MetricMeasureSpace,
                     balls: Sequence[tuple[int, float]]) -> AdjacencyReport:
    """For each ball ``B(x, t)`` the smallest ``diam(Q) / t`` over cubes ``Q`` containing it."""
    ratios = np.full(len(balls), np.inf)
    failures = []
    for b, (center, t) in enumerate(balls):
        idx = ball(space, int(center), float(t))
        best = np.inf
        for system in family:
            for k in range(system.generations, -1, -1):
                lab = system.labels[k][idx]
                if np.all(lab == lab[0]):
                    best = min(best, system.cubes[lab[0]].diameter / t)
                    break
        if np.isinf(best):
            failures.append((int(center), float(t)))
        ratios[b] = best
    finite = ratios[np.isfinite(ratios)]
    return AdjacencyReport(ratios, float(finite.max()) if finite.size else np.inf, failures)


def random_balls(space: MetricMeasureSpace, count: int, t_min: float, t_max: float,
                 seed: int = 0) -> list[tuple[int, float]]:
    """Balls with uniformly drawn centres and log-uniform radii."""
    rng = np.random.default_rng(seed)
    centers = rng.integers(0, space.n, count)
    radii = np.exp(rng.uniform(np.log(t_min), np.log(t_max), count))
    return [(int(c), float(t)) for c, t in zip(centers, radii)]


def system_to_dict(system: DyadicSystem) -> dict:
    return {
        "system_id": system.system_id,
        "shift": [float(v) for v in system.shift],
        "generations": system.generations,
        "expansion": system.expansion,
        "cubes": [
            {"generation": q.generation, "index": list(q.index),
             "center": [float(v) for v in q.center], "side_length": q.side_length,
             "count": int(q.point_indices.size)}
            for q in system.cubes
        ],
    }


def dump_system_json(system: DyadicSystem, path=None, **kw) -> str:
    text = json.dumps(system_to_dict(system), **kw)
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text
