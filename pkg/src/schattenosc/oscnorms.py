"""Oscillation functional, Lorentz sequence norms and oscillatory norms."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .dyadic import DyadicSystem
from .space import MetricMeasureSpace

_GOLDEN = (math.sqrt(5) - 1) / 2


class UndefinedSetError(ValueError):
    """Oscillation requested over a set of zero measure."""


@dataclass(frozen=True)
class LorentzParams:
    """Exponents ``(p, q)`` of ``l^{p,q}``; ``q=None`` means ``q = p``, ``q=inf`` is allowed."""

    p: float
    q: float | None = None

    def __post_init__(self):
        if not (0 < self.p < math.inf):
            raise ValueError("p must be finite and positive")
        if self.q is None:
            object.__setattr__(self, "q", float(self.p))
        if not self.q > 0:
            raise ValueError("q must be positive")


def _as_params(params) -> LorentzParams:
    if isinstance(params, LorentzParams):
        return params
    if np.isscalar(params):
        return LorentzParams(float(params))
    return LorentzParams(*params)


def lorentz_seq_norm(s: Iterable[float], params: LorentzParams | tuple | float) -> float:
    """``l^{p,q}`` norm of the nonincreasing rearrangement of ``s``.

    With ``s_0 >= s_1 >= ...`` this is ``(sum ((n+1)**(1/p - 1/q) s_n)**q)**(1/q)``
    and ``sup (n+1)**(1/p) s_n`` for ``q = inf``; ``l^{p,p}`` is plain ``l^p``.
    """
    pq = _as_params(params)
    s = np.asarray(list(s) if not isinstance(s, np.ndarray) else s, dtype=float).ravel()
    if np.any(s < 0):
        raise ValueError("Lorentz norm needs a nonnegative sequence")
    if s.size == 0:
        return 0.0
    s = np.sort(s)[::-1]
    n1 = np.arange(1, s.size + 1, dtype=float)
    if math.isinf(pq.q):
        # ratio to the extremal profile (n+1)^(-1/p), which then maps to exactly 1
        return float(np.max(s / n1 ** (-1 / pq.p)))
    if pq.q == pq.p:
        return float(np.sum(s ** pq.p) ** (1 / pq.p))
    return float(np.sum((n1 ** (1 / pq.p - 1 / pq.q) * s) ** pq.q) ** (1 / pq.q))


def _golden_min(g, lo: float, hi: float, tol: float, max_iter: int = 200) -> float:
    # the cap only matters for subnormal ranges, where b - a stops shrinking
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    gc, gd = g(c), g(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if gc <= gd:
            b, d, gd = d, c, gc
            c = b - _GOLDEN * (b - a)
            gc = g(c)
        else:
            a, c, gc = c, d, gd
            d = a + _GOLDEN * (b - a)
            gd = g(d)
    return min(g(a), g(b), gc, gd)


def _osc_values(v: np.ndarray, w: np.ndarray, r: float) -> float:
    w = w / w.sum()
    lo, hi = v.min(), v.max()
    if hi == lo:
        return 0.0
    if r == 2:
        m = np.dot(w, v)
        return math.sqrt(max(np.dot(w, (v - m) ** 2), 0.0))
    if r == 1:
        order = np.argsort(v, kind="stable")
        cw = np.cumsum(w[order])
        med = v[order][min(np.searchsorted(cw, 0.5), v.size - 1)]
        return float(np.dot(w, np.abs(v - med)))
    if r > 1:
        best = _golden_min(lambda c: np.dot(w, np.abs(v - c) ** r), lo, hi,
                           1e-10 * (hi - lo))
        return best ** (1 / r)
    # r < 1: the objective is concave between data values
    cands = np.unique(v)
    best = min(np.dot(np.abs(v[None, :] - chunk[:, None]) ** r, w).min()
               for chunk in np.array_split(cands, max(1, cands.size // 256)))
    return float(best) ** (1 / r)


def osc(f: np.ndarray, E: np.ndarray, r: float = 1.0, weights: np.ndarray | None = None) -> float:
    """``inf_c (avg_E |f - c|^r)^(1/r)`` with respect to the point masses ``weights``.

    The minimiser is the weighted mean for ``r = 2`` and a weighted median
    for ``r = 1``; other ``r >= 1`` use a golden-section search over
    ``[min f, max f]`` and ``r < 1`` scans the data values.
    """
    if not r > 0:
        raise ValueError("r must be positive")
    f = np.asarray(f, dtype=float)
    E = np.asarray(E)
    w = np.ones(f.size) if weights is None else np.asarray(weights, dtype=float)
    wE = w[E]
    if E.size == 0 or wE.sum() <= 0:
        raise UndefinedSetError("oscillation over a set of zero measure")
    return _osc_values(f[E], wE, float(r))


def osc_many(f: np.ndarray, sets: Sequence[np.ndarray], r: float,
             weights: np.ndarray) -> np.ndarray:
    return np.array([osc(f, E, r, weights) for E in sets])


def _systems(systems) -> list[DyadicSystem]:
    return [systems] if isinstance(systems, DyadicSystem) else list(systems)


def osc_norm(f: np.ndarray, space: MetricMeasureSpace, systems, params, r: float = 1.0,
             measure: str = "mu", c: float | None = None) -> float:
    """Oscillatory norm: ``l^{p,q}`` of ``osc_r(f; B_Q)`` over the concentric balls of all cubes."""
    w = space.weights(measure)
    vals = np.concatenate([osc_many(f, s.concentric_balls(c), r, w) for s in _systems(systems)])
    return lorentz_seq_norm(vals, params)


def osc_norm_dyadic(f: np.ndarray, system: DyadicSystem, params, r: float = 1.0,
                    measure: str = "mu") -> float:
    """Dyadic oscillatory norm: oscillations over the cubes themselves."""
    w = system.space.weights(measure)
    vals = osc_many(f, [q.point_indices for q in system.cubes], r, w)
    return lorentz_seq_norm(vals, params)


def osc_norm_family(f: np.ndarray, family: Sequence[DyadicSystem], params, r: float = 1.0,
                    measure: str = "mu") -> float:
    """``sum_m`` of the dyadic oscillatory norms over an adjacent family."""
    return sum(osc_norm_dyadic(f, s, params, r, measure) for s in family)
