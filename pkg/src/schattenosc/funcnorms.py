"""Besov, Hajlasz-Sobolev, grid Sobolev and weak-type norms of grid functions."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from .space import RTOL, MetricMeasureSpace

log = logging.getLogger(__name__)

HAJLASZ_MAX_POINTS = 2000


def open_ball_masses(space: MetricMeasureSpace, measure: str = "nu") -> np.ndarray:
    """``V[i, j] = measure(B(x_i, |x_i - x_j|))`` for the open ball, ties resolved to ``RTOL``."""
    D = space.distances
    w = space.weights(measure)
    order = np.argsort(D, axis=1, kind="stable")
    ds = np.take_along_axis(D, order, axis=1)
    cum = np.cumsum(np.take_along_axis(np.broadcast_to(w, D.shape), order, axis=1), axis=1)
    cum_excl = np.concatenate([np.zeros((D.shape[0], 1)), cum[:, :-1]], axis=1)
    k = np.arange(D.shape[1])
    new_run = np.ones_like(ds, dtype=bool)
    new_run[:, 1:] = ds[:, 1:] > ds[:, :-1] * (1 + RTOL) + 1e-300
    start = np.maximum.accumulate(np.where(new_run, k[None, :], 0), axis=1)
    Vs = np.take_along_axis(cum_excl, start, axis=1)
    V = np.empty_like(Vs)
    np.put_along_axis(V, order, Vs, axis=1)
    return V


def _pair_diffs(b: np.ndarray, p: float) -> np.ndarray:
    b = np.asarray(b, dtype=float)
    return np.abs(b[:, None] - b[None, :]) ** p


def besov_adhoc(b: np.ndarray, space: MetricMeasureSpace, p: float, measure: str = "nu") -> float:
    """``(sum_{x != y} |b(x)-b(y)|^p / nu(B(x, |x-y|))^2 nu(x) nu(y))^(1/p)``."""
    w = space.weights(measure)
    V = open_ball_masses(space, measure)
    off = ~np.eye(space.n, dtype=bool)
    if np.any(V[off] <= 0):
        raise ValueError("zero-measure ball in the Besov sum")
    terms = np.where(off, _pair_diffs(b, p) / np.where(off, V, 1.0) ** 2, 0.0)
    return float(w @ terms @ w) ** (1 / p)


def besov_classical(b: np.ndarray, space: MetricMeasureSpace, p: float, d: float,
                    measure: str = "nu") -> float:
    """``(sum_{x != y} |b(x)-b(y)|^p / |x-y|^(2d) nu(x) nu(y))^(1/p)``."""
    w = space.weights(measure)
    off = ~np.eye(space.n, dtype=bool)
    rho = np.where(off, space.distances, 1.0)
    terms = np.where(off, _pair_diffs(b, p) / rho ** (2 * d), 0.0)
    return float(w @ terms @ w) ** (1 / p)


@dataclass
class HajlaszSolution:
    h: np.ndarray
    objective: float
    mode: str
    residual: float
    converged: bool = True
    iterations: int = 0


def _lp_norm(h, w, p) -> float:
    if math.isinf(p):
        return float(h[w > 0].max(initial=0.0))
    return float(np.dot(w, h ** p) ** (1 / p))


def _quotients(f, space):
    f = np.asarray(f, dtype=float)
    rho = space.distances
    with np.errstate(divide="ignore", invalid="ignore"):
        Q = np.abs(f[:, None] - f[None, :]) / rho
    np.fill_diagonal(Q, 0.0)
    return f, rho, Q


def _residual(f, rho, h) -> float:
    viol = np.abs(f[:, None] - f[None, :]) - rho * (h[:, None] + h[None, :])
    np.fill_diagonal(viol, -np.inf)
    return float(max(viol.max(), 0.0)) if f.size > 1 else 0.0


def _lift(h, Q):
    """Raise both ends of every violated pair by half the deficit (feasible in one pass)."""
    deficit = Q - h[:, None] - h[None, :]
    np.fill_diagonal(deficit, 0.0)
    return h + 0.5 * np.maximum(deficit, 0.0).max(axis=1)


def _upper_bound(Q):
    return 0.5 * Q.max(axis=1) if Q.size else np.zeros(0)


def _solve_lp(Q, w, p):
    n = Q.shape[0]
    iu, ju = np.nonzero(np.triu(Q, 1) > 0)
    m = iu.size
    rows = np.repeat(np.arange(m), 2)
    cols = np.column_stack([iu, ju]).ravel()
    A = sp.csr_matrix((-np.ones(2 * m), (rows, cols)), shape=(m, n))
    b = -Q[iu, ju]
    if math.isinf(p):
        pos = np.flatnonzero(w > 0)
        A = sp.hstack([A, sp.csr_matrix((m, 1))])
        cap = sp.csr_matrix((np.r_[np.ones(pos.size), -np.ones(pos.size)],
                             (np.r_[np.arange(pos.size), np.arange(pos.size)],
                              np.r_[pos, np.full(pos.size, n)])), shape=(pos.size, n + 1))
        A = sp.vstack([A, cap]).tocsr()
        b = np.r_[b, np.zeros(pos.size)]
        c = np.r_[np.zeros(n), 1.0]
    else:
        c = w
    res = linprog(c, A_ub=A, b_ub=b, bounds=(0, None), method="highs")
    if res.status != 0:
        return None
    return np.maximum(res.x[:n], 0.0)


def _solve_descent(Q, w, p, h0, tol, max_iter):
    h = h0.copy()
    best_h, best = h0.copy(), float(np.dot(w, h0 ** p))
    scale = max(float(h0.max()), 1e-300)
    history = [best]
    it = 0
    for it in range(1, max_iter + 1):
        g = p * w * h ** (p - 1)
        gn = np.abs(g).max()
        if gn == 0:
            break
        step = 0.5 * scale / math.sqrt(it)
        h = _lift(np.maximum(h - step * g / gn, 0.0), Q)
        val = float(np.dot(w, h ** p))
        if val < best:
            best, best_h = val, h.copy()
        history.append(best)
        window = 200
        if it >= window and history[-window - 1] - best <= tol * max(best, 1e-300):
            return best_h, True, it
    return best_h, False, it


def hajlasz_norm(f: np.ndarray, space: MetricMeasureSpace, p: float = 2.0,
                 mode: str = "convex_program", measure: str = "mu",
                 tol: float = 1e-6, max_iter: int = 10_000) -> HajlaszSolution:
    """Smallest ``L^p`` norm of a Hajlasz upper gradient over all point pairs.

    ``mode="upper_bound"`` returns the always-feasible ``h(x) = sup_y |f(x)-f(y)| / (2|x-y|)``.
    ``mode="convex_program"`` solves the linear program for ``p`` in ``{1, inf}``
    and runs a projected subgradient descent started at the upper bound for
    ``1 < p < inf``.
    """
    if not (p >= 1):
        raise ValueError("p must lie in [1, inf]")
    if mode not in ("upper_bound", "convex_program"):
        raise ValueError(f"unknown mode {mode!r}")
    if space.n > HAJLASZ_MAX_POINTS:
        raise ValueError(f"Hajlasz norm is capped at {HAJLASZ_MAX_POINTS} points")
    w = space.weights(measure)
    f, rho, Q = _quotients(f, space)
    h0 = _upper_bound(Q)
    if mode == "upper_bound" or not np.any(Q > 0):
        return HajlaszSolution(h0, _lp_norm(h0, w, p), "upper_bound", _residual(f, rho, h0))

    converged, iters = True, 0
    if p == 1 or math.isinf(p):
        h = _solve_lp(Q, w, p)
        if h is None:
            log.warning("hajlasz_norm: linear program failed, returning the upper bound")
            return HajlaszSolution(h0, _lp_norm(h0, w, p), "upper_bound",
                                   _residual(f, rho, h0), converged=False)
        h = _lift(h, Q)
    else:
        h, converged, iters = _solve_descent(Q, w, p, h0, tol, max_iter)
        if not converged:
            log.warning("hajlasz_norm: descent hit the iteration cap, returning best feasible iterate")
    return HajlaszSolution(h, _lp_norm(h, w, p), "convex_program", _residual(f, rho, h),
                           converged, iters)


def sobolev_norm_grid(f: np.ndarray, space: MetricMeasureSpace, p: float = 2.0) -> float:
    """``(sum |grad f|^p cell)^(1/p)`` with central differences inside, one-sided at the edge."""
    if not space.is_grid:
        raise ValueError("grid Sobolev norm needs a uniform grid")
    if not np.allclose(space.nu_weights, space.cell_size, rtol=1e-12, atol=0):
        raise ValueError("grid Sobolev norm needs uniform Lebesgue nu")
    g = space.to_grid(np.asarray(f, dtype=float))
    grads = np.gradient(g, *space.spacing, edge_order=1)
    if space.dim == 1:
        grads = [grads]
    mag = np.sqrt(sum(gr ** 2 for gr in grads)).ravel()
    if math.isinf(p):
        return float(mag.max())
    return float(np.sum(mag ** p * space.cell_size) ** (1 / p))


@dataclass
class MbProfile:
    scales: np.ndarray
    values: np.ndarray  # (scales, points)
    masses: np.ndarray  # same shape, nu_d masses


def default_scales(space: MetricMeasureSpace) -> np.ndarray:
    L = space.domain.scale if space.domain is not None else space.diameter
    h = max(space.spacing) if space.spacing else L / space.n
    k = np.arange(0, int(math.floor(math.log2(L / h))) + 1)
    return L * 2.0 ** -k


def mb_profile(b: np.ndarray, space: MetricMeasureSpace, d: float,
               scales: np.ndarray | None = None, measure: str = "nu") -> MbProfile:
    """Mean deviations ``avg_{B(x,t)} |b - <b>_B| dnu`` and masses ``t^(-d-1) dt nu(x)``.

    Scale ``t`` stands for the dyadic interval ``[t, 2t)``, so ``dt = t``.
    """
    b = np.asarray(b, dtype=float)
    scales = default_scales(space) if scales is None else np.asarray(scales, dtype=float)
    if np.any(scales <= 0):
        raise ValueError("scales must be positive")
    w = space.weights(measure)
    D = space.distances
    vals = np.full((scales.size, space.n), np.nan)
    for k, t in enumerate(scales):
        A = np.where(D < t * (1 - RTOL), w[None, :], 0.0)
        mass = A.sum(axis=1)
        ok = mass > 0
        mean = (A @ b)[ok] / mass[ok]
        vals[k, ok] = (A[ok] * np.abs(b[None, :] - mean[:, None])).sum(axis=1) / mass[ok]
    masses = scales[:, None] ** (-d - 1) * scales[:, None] * w[None, :]
    return MbProfile(scales, vals, masses)


def weak_norm(values: np.ndarray, masses: np.ndarray, d: float) -> float:
    """``sup_s s * mass({values > s})**(1/d)``, attained just below the sample values."""
    v = np.asarray(values, dtype=float).ravel()
    m = np.asarray(masses, dtype=float).ravel()
    keep = np.isfinite(v)
    v, m = v[keep], m[keep]
    if v.size == 0:
        return 0.0
    order = np.argsort(-v, kind="stable")
    cum = np.cumsum(m[order])
    return float(np.max(v[order] * cum ** (1 / d)))


def mb_weak_norm(b: np.ndarray, space: MetricMeasureSpace, d: float,
                 scales: np.ndarray | None = None, measure: str = "nu") -> float:
    """``||m_b||_{L^{d,inf}(nu_d)}`` over the dyadic scale set."""
    prof = mb_profile(b, space, d, scales, measure)
    return weak_norm(prof.values, prof.masses, d)
