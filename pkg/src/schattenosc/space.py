"""Discretized metric measure spaces and their geometric diagnostics.

A space is a finite Euclidean point cloud carrying two measures, ``mu`` and
``nu``, stored as per-point quadrature masses.  Grid spaces are built from
cell centres of a uniform tensor grid, so that power weights never get
evaluated on the boundary of a half-space.

The diagnostics estimate doubling constants, dimension exponents, reverse
Hoelder and A2 constants, the A-infinity relation and Poincare constants as
empirical sups/infs over a deterministic sample of balls.
"""

from __future__ import annotations

import csv
import itertools
import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

log = logging.getLogger(__name__)

MEASURES = ("mu", "nu")

# open balls use ``d < R * (1 - RTOL)`` so grid distances equal up to rounding
# fall on the same side of the boundary
RTOL = 1e-10


def inside_open(d, radius):
    return d < radius * (1 - RTOL)


@dataclass(frozen=True)
class Domain:
    """Axis-aligned box ``prod_k [lo_k, hi_k]`` with a descriptive kind.

    ``kind`` is one of ``interval``, ``square`` or ``halfspace``; for a
    half-space strip the last axis is the one normal to the wall.
    """

    bounds: tuple[tuple[float, float], ...]
    kind: str = "interval"

    def __post_init__(self):
        if self.kind not in ("interval", "square", "halfspace", "box"):
            raise ValueError(f"unknown domain kind {self.kind!r}")
        for lo, hi in self.bounds:
            if not hi > lo:
                raise ValueError(f"empty axis range ({lo}, {hi})")

    @property
    def dim(self) -> int:
        return len(self.bounds)

    @property
    def lower(self) -> np.ndarray:
        return np.array([b[0] for b in self.bounds], dtype=float)

    @property
    def extent(self) -> np.ndarray:
        return np.array([b[1] - b[0] for b in self.bounds], dtype=float)

    @property
    def scale(self) -> float:
        """Side length of the smallest cube containing the domain."""
        return float(self.extent.max())


def interval(lo: float = 0.0, hi: float = 1.0) -> Domain:
    return Domain(((float(lo), float(hi)),), "interval")


def square(lo: float = 0.0, hi: float = 1.0) -> Domain:
    return Domain(((float(lo), float(hi)),) * 2, "square")


def half_strip(n: int = 1, width: float = 1.0, height: float = 1.0) -> Domain:
    """Truncated half-space ``[0, width]^n x (0, height]`` (wall at ``x_{n+1} = 0``)."""
    if n == 0:
        return Domain(((0.0, float(height)),), "halfspace")
    return Domain(((0.0, float(width)),) * n + ((0.0, float(height)),), "halfspace")


@dataclass(frozen=True)
class WeightSpec:
    """A density on the ambient space.

    kind ``constant`` evaluates to ``value`` (default 1), ``power`` to
    ``|x_axis|**exponent`` and ``tabulated`` returns ``values`` as given, in
    the point ordering of the space it is evaluated on.
    """

    kind: str = "constant"
    exponent: float = 0.0
    axis: int = 0
    value: float = 1.0
    values: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind not in ("constant", "power", "tabulated"):
            raise ValueError(f"unknown weight kind {self.kind!r}")
        if self.kind == "tabulated" and self.values is None:
            raise ValueError("tabulated weight needs values")

    @classmethod
    def constant(cls, value: float = 1.0) -> "WeightSpec":
        return cls("constant", value=float(value))

    @classmethod
    def power(cls, exponent: float, axis: int = 0) -> "WeightSpec":
        return cls("power", exponent=float(exponent), axis=int(axis))

    @classmethod
    def tabulated(cls, values: Iterable[float]) -> "WeightSpec":
        return cls("tabulated", values=tuple(float(v) for v in values))

    @classmethod
    def from_dict(cls, d: dict | None) -> "WeightSpec":
        if d is None:
            return cls()
        d = dict(d)
        kind = d.pop("kind", "constant")
        if kind == "power":
            return cls.power(d.get("exponent", 0.0), d.get("axis", 0))
        if kind == "tabulated":
            return cls.tabulated(d["values"])
        return cls.constant(d.get("value", 1.0))

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        n = points.shape[0]
        if self.kind == "constant":
            return np.full(n, self.value)
        if self.kind == "power":
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.abs(points[:, self.axis]) ** self.exponent
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (n,):
            raise ValueError(f"tabulated weight has {vals.size} values for {n} points")
        return vals


@dataclass(eq=False)
class MetricMeasureSpace:
    """Finite Euclidean point cloud with two measures.

    ``resolution`` and ``spacing`` describe the tensor grid when the space
    comes from :func:`build_grid_space`; point clouds built by hand leave
    ``domain`` as ``None`` and grid-only operations refuse them.
    """

    points: np.ndarray
    mu_weights: np.ndarray
    nu_weights: np.ndarray
    domain: Domain | None = None
    resolution: tuple[int, ...] = ()
    cell_size: float | None = None
    spacing: tuple[float, ...] = ()

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        self.points = pts.reshape(-1, 1) if pts.ndim == 1 else pts
        self.mu_weights = np.asarray(self.mu_weights, dtype=float).ravel()
        self.nu_weights = np.asarray(self.nu_weights, dtype=float).ravel()
        n = self.points.shape[0]
        for name, w in (("mu", self.mu_weights), ("nu", self.nu_weights)):
            if w.shape != (n,):
                raise ValueError(f"{name} weights have shape {w.shape}, expected ({n},)")
            if not np.all(np.isfinite(w)):
                raise ValueError(f"{name} weights must be finite")
            if np.any(w < 0):
                raise ValueError(f"{name} weights must be nonnegative")
            if not np.any(w > 0):
                raise ValueError(f"{name} has no positive mass")
        if self.resolution and int(np.prod(self.resolution)) != n:
            raise ValueError("point count does not match the grid resolution")
        if not self.resolution:
            self.resolution = (n,)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def is_grid(self) -> bool:
        return self.domain is not None and len(self.spacing) == self.dim

    def weights(self, measure: str = "mu") -> np.ndarray:
        if measure == "mu":
            return self.mu_weights
        if measure == "nu":
            return self.nu_weights
        raise ValueError(f"measure selector must be 'mu' or 'nu', got {measure!r}")

    @cached_property
    def distances(self) -> np.ndarray:
        diff = self.points[:, None, :] - self.points[None, :, :]
        return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))

    def distances_from(self, center: int) -> np.ndarray:
        if "distances" in self.__dict__:
            return self.distances[center]
        diff = self.points - self.points[center]
        return np.sqrt(np.einsum("ij,ij->i", diff, diff))

    @property
    def diameter(self) -> float:
        lo, hi = self.points.min(axis=0), self.points.max(axis=0)
        return float(np.linalg.norm(hi - lo))

    def density(self) -> np.ndarray:
        """d nu / d mu at every point with positive mu-mass (``inf`` elsewhere if nu > 0)."""
        mu, nu = self.mu_weights, self.nu_weights
        with np.errstate(divide="ignore", invalid="ignore"):
            w = nu / mu
        w[(mu == 0) & (nu == 0)] = 0.0
        return w

    def swapped(self) -> "MetricMeasureSpace":
        return MetricMeasureSpace(self.points, self.nu_weights, self.mu_weights,
                                  self.domain, self.resolution, self.cell_size, self.spacing)

    def with_measures(self, mu: np.ndarray | None = None, nu: np.ndarray | None = None):
        return MetricMeasureSpace(self.points,
                                  self.mu_weights if mu is None else mu,
                                  self.nu_weights if nu is None else nu,
                                  self.domain, self.resolution, self.cell_size, self.spacing)

    def to_grid(self, values: np.ndarray) -> np.ndarray:
        """Reshape per-point values to the grid (lexicographic, last axis fastest)."""
        if not self.is_grid:
            raise ValueError("operation needs a grid space")
        return np.asarray(values).reshape(self.resolution)


def build_grid_space(domain: Domain, resolution: int | Sequence[int],
                     mu: WeightSpec | None = None,
                     nu: WeightSpec | None = None) -> MetricMeasureSpace:
    """Uniform cell-centred grid on ``domain`` with masses ``density * cell volume``."""
    if np.isscalar(resolution):
        resolution = (int(resolution),) * domain.dim
    resolution = tuple(int(r) for r in resolution)
    if len(resolution) != domain.dim:
        raise ValueError("one resolution per axis required")
    if min(resolution) < 2:
        raise ValueError("resolution must be at least 2 per axis")
    spacing = tuple(float(e) / r for e, r in zip(domain.extent, resolution))
    axes = [lo + (np.arange(r) + 0.5) * h
            for (lo, _), r, h in zip(domain.bounds, resolution, spacing)]
    mesh = np.meshgrid(*axes, indexing="ij")
    points = np.stack([m.ravel() for m in mesh], axis=1)
    cell = float(np.prod(spacing))

    def masses(spec, name):
        dens = (spec or WeightSpec()).evaluate(points)
        if not np.all(np.isfinite(dens)):
            raise ValueError(f"{name} density is not finite on the grid")
        return dens * cell

    return MetricMeasureSpace(points, masses(mu, "mu"), masses(nu, "nu"), domain,
                              resolution, cell, spacing)


def space_from_config(cfg: dict, resolution: int | Sequence[int] | None = None) -> MetricMeasureSpace:
    """Build a grid space from a config mapping.

    Recognised keys: ``domain`` (``interval``/``square``/``halfspace``),
    ``bounds`` (list of ``[lo, hi]``), ``resolution``, ``mu``, ``nu``
    (weight mappings with ``kind`` plus parameters).
    """
    kind = cfg.get("domain", "interval")
    if "bounds" in cfg:
        domain = Domain(tuple(tuple(float(v) for v in b) for b in cfg["bounds"]), kind)
    elif kind == "square":
        domain = square()
    elif kind == "halfspace":
        domain = half_strip(int(cfg.get("n", 1)))
    else:
        domain = interval()
    res = resolution if resolution is not None else cfg.get("resolution", 64)
    return build_grid_space(domain, res, WeightSpec.from_dict(cfg.get("mu")),
                            WeightSpec.from_dict(cfg.get("nu")))


def ball(space: MetricMeasureSpace, center: int, radius: float) -> np.ndarray:
    """Indices of the open ball ``{i : |x_i - x_center| < radius}``."""
    if not radius > 0:
        raise ValueError("radius must be positive")
    return np.flatnonzero(inside_open(space.distances_from(center), radius))


# ---------------------------------------------------------------------------
# diagnostics


@dataclass
class DiagnosticsConfig:
    """Sample of balls for the empirical diagnostics.

    ``min_ratio`` discards radius pairs with ``R / r`` below it in the
    dimension estimates; with ratios near one the implicit constants of the
    dimension bounds dominate the exponent.
    """

    radii: np.ndarray
    centers: np.ndarray
    tolerance: float = 0.05
    min_ratio: float = 1.0
    seed: int = 0

    def __post_init__(self):
        self.radii = np.asarray(self.radii, dtype=float).ravel()
        self.centers = np.asarray(self.centers, dtype=int).ravel()
        if np.any(self.radii <= 0):
            raise ValueError("radii must be positive")
        if np.any(np.diff(self.radii) < 0):
            raise ValueError("radii must be sorted")
        if self.min_ratio < 1:
            raise ValueError("min_ratio must be at least 1")

    def validate(self, space: MetricMeasureSpace) -> None:
        if self.centers.size and (self.centers.min() < 0 or self.centers.max() >= space.n):
            raise ValueError("center index out of range")


def default_diagnostics(space: MetricMeasureSpace, n_radii: int = 8, n_centers: int = 9,
                        **kw) -> DiagnosticsConfig:
    """Geometric radii from two grid cells to half the diameter, evenly spread centres."""
    if space.spacing:
        h = max(space.spacing)
    elif space.n > 1:
        h = float(space.distances[np.triu_indices(space.n, 1)].min())
    else:
        h = 1.0
    top = max(space.diameter / 2, 2 * h)
    radii = np.geomspace(2 * h, top, n_radii)
    centers = np.unique(np.linspace(0, space.n - 1, n_centers).round().astype(int))
    return DiagnosticsConfig(radii, centers, **kw)


class DiagnosticRow(NamedTuple):
    diagnostic: str
    measure: str
    center: int
    r: float
    R: float
    value: float


class _BallMasses:
    """Masses of open balls about one centre, for any radius, by sorted cumsum."""

    def __init__(self, space: MetricMeasureSpace, center: int, weights: np.ndarray):
        d = space.distances_from(center)
        order = np.argsort(d, kind="stable")
        self.d = d[order]
        self.cum = np.concatenate([[0.0], np.cumsum(weights[order])])

    def __call__(self, radius):
        return self.cum[np.searchsorted(self.d, np.asarray(radius) * (1 - RTOL), side="left")]


def _doubling_rows(space, measure, cfg) -> Iterator[DiagnosticRow]:
    w = space.weights(measure)
    for c in cfg.centers:
        m = _BallMasses(space, c, w)
        for R in cfg.radii:
            small = m(R)
            if small <= 0:
                yield DiagnosticRow("doubling", measure, int(c), R, 2 * R, math.nan)
                continue
            yield DiagnosticRow("doubling", measure, int(c), R, 2 * R, m(2 * R) / small)


def _finite_max(rows: Iterable[DiagnosticRow], name: str, default=math.nan) -> float:
    vals = np.array([r.value for r in rows], dtype=float)
    skipped = int(np.isnan(vals).sum())
    if skipped:
        log.warning("%s: %d sampled balls skipped (zero measure)", name, skipped)
    vals = vals[~np.isnan(vals)]
    return float(vals.max()) if vals.size else default


def doubling_constant(space: MetricMeasureSpace, measure: str = "mu",
                      cfg: DiagnosticsConfig | None = None) -> float:
    """Largest sampled ratio ``mu(B(x, 2R)) / mu(B(x, R))``."""
    cfg = cfg or default_diagnostics(space)
    cfg.validate(space)
    return _finite_max(_doubling_rows(space, measure, cfg), "doubling_constant")


def _dimension_rows(space, measure, cfg) -> Iterator[DiagnosticRow]:
    w = space.weights(measure)
    pairs = [(r, R) for r, R in itertools.combinations(cfg.radii, 2)
             if R > r and R / r >= cfg.min_ratio]
    for c in cfg.centers:
        m = _BallMasses(space, c, w)
        for r, R in pairs:
            small = m(r)
            val = math.log(m(R) / small) / math.log(R / r) if small > 0 else math.nan
            yield DiagnosticRow("dimension", measure, int(c), r, R, val)


def dimension_bounds(space: MetricMeasureSpace, measure: str = "mu",
                     cfg: DiagnosticsConfig | None = None) -> tuple[float, float]:
    """Empirical lower and upper dimension ``(min, max)`` of the growth exponents."""
    cfg = cfg or default_diagnostics(space)
    cfg.validate(space)
    vals = np.array([r.value for r in _dimension_rows(space, measure, cfg)])
    vals = vals[np.isfinite(vals)]
    if not vals.size:
        raise ValueError("no admissible radius pairs in the sample")
    return float(vals.min()), float(vals.max())


def _greedy_separated(dist_sub: np.ndarray, r: float) -> int:
    """Size of the greedy (index-order) maximal r-separated subset."""
    blocked = np.zeros(dist_sub.shape[0], dtype=bool)
    count = 0
    for i in range(dist_sub.shape[0]):
        if blocked[i]:
            continue
        count += 1
        blocked |= inside_open(dist_sub[i], r)
    return count


def _separation_rows(space, cfg) -> Iterator[DiagnosticRow]:
    for c in cfg.centers:
        d = space.distances_from(c)
        for r, R in itertools.combinations_with_replacement(cfg.radii, 2):
            if R == r:
                yield DiagnosticRow("separation", "-", int(c), r, R, 0.0)
                continue
            idx = np.flatnonzero(inside_open(d, R))
            sub = idx[:, None], idx[None, :]
            if "distances" in space.__dict__:
                dist_sub = space.distances[sub]
            else:
                p = space.points[idx]
                dist_sub = np.linalg.norm(p[:, None] - p[None], axis=-1)
            m = _greedy_separated(dist_sub, r)
            yield DiagnosticRow("separation", "-", int(c), r, R, math.log(m) / math.log(R / r))


def separation_exponent(space: MetricMeasureSpace, cfg: DiagnosticsConfig | None = None) -> float:
    """Largest sampled ``log m / log(R/r)``, ``m`` the size of an r-separated subset of ``B(x, R)``."""
    cfg = cfg or default_diagnostics(space)
    cfg.validate(space)
    return _finite_max(_separation_rows(space, cfg), "separation_exponent", 0.0)


def _ball_averages(space, cfg, values_list, weights):
    """Yield (center, radius, [weighted averages]) over sampled balls with positive mass."""
    for c in cfg.centers:
        d = space.distances_from(c)
        for R in cfg.radii:
            inside = inside_open(d, R)
            mass = weights[inside].sum()
            if mass <= 0:
                yield int(c), R, None
                continue
            yield int(c), R, [np.dot(weights[inside], v[inside]) / mass for v in values_list]


def _reverse_holder_rows(space, cfg, t) -> Iterator[DiagnosticRow]:
    w = space.density()
    mu = space.mu_weights
    for c, R, av in _ball_averages(space, cfg, [w ** t, w], mu):
        if av is None or av[1] == 0:
            yield DiagnosticRow("reverse_holder", "mu", c, R, R, math.nan)
            continue
        yield DiagnosticRow("reverse_holder", "mu", c, R, R, av[0] ** (1 / t) / av[1])


def reverse_holder(space: MetricMeasureSpace, cfg: DiagnosticsConfig | None = None,
                   t: float = 2.0) -> float:
    """Sampled reverse Hoelder constant of ``w = d nu / d mu`` with exponent ``t > 1``."""
    if not t > 1:
        raise ValueError("reverse Hoelder exponent must exceed 1")
    cfg = cfg or default_diagnostics(space)
    cfg.validate(space)
    return _finite_max(_reverse_holder_rows(space, cfg, t), "reverse_holder")


def _ainfty_rows(space, cfg, eps) -> Iterator[DiagnosticRow]:
    mu, nu = space.mu_weights, space.nu_weights
    w = space.density()
    for c in cfg.centers:
        d = space.distances_from(c)
        for R in cfg.radii:
            idx = np.flatnonzero(inside_open(d, R))
            mu_b, nu_b = mu[idx].sum(), nu[idx].sum()
            if mu_b <= 0 or nu_b <= 0:
                yield DiagnosticRow("ainfty", "mu/nu", int(c), R, R, math.nan)
                continue
            order = idx[np.argsort(-w[idx], kind="stable")]
            cum = np.cumsum(mu[order])
            take = np.searchsorted(cum, eps * mu_b * (1 + 1e-12), side="right")
            nu_e = nu[order[:take]].sum()
            yield DiagnosticRow("ainfty", "mu/nu", int(c), R, R, 1.0 - nu_e / nu_b)


def check_ainfty(space: MetricMeasureSpace, eps: float = 0.5,
                 cfg: DiagnosticsConfig | None = None) -> float:
    """Smallest sampled ``delta`` such that ``mu(E) <= eps mu(B)`` forces ``nu(E) <= (1-delta) nu(B)``.

    On each ball the worst subset is filled greedily by decreasing
    ``d nu / d mu`` until the mu-budget is spent.  A result at or below
    ``cfg.tolerance`` is logged as an A-infinity failure.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    cfg = cfg or default_diagnostics(space)
    cfg.validate(space)
    vals = np.array([r.value for r in _ainfty_rows(space, cfg, eps)])
    vals = vals[~np.isnan(vals)]
    if not vals.size:
        raise ValueError("no sampled ball has positive mu and nu mass")
    delta = float(vals.min())
    if delta <= cfg.tolerance:
        log.warning("check_ainfty: delta estimate %.3g, A-infinity relation fails on the sample", delta)
    return delta


def _weight_values(space, weight) -> np.ndarray:
    if isinstance(weight, WeightSpec):
        w = weight.evaluate(space.points)
    else:
        w = np.asarray(weight, dtype=float)
    if w.shape != (space.n,):
        raise ValueError("weight must have one value per point")
    if not np.all(np.isfinite(w)) or np.any(w <= 0):
        raise ValueError("weight must be finite and strictly positive on the grid")
    return w


def _a2_rows(space, weight, cfg, measure) -> Iterator[DiagnosticRow]:
    w = _weight_values(space, weight)
    for c, R, av in _ball_averages(space, cfg, [w, 1 / w], space.weights(measure)):
        val = math.nan if av is None else av[0] * av[1]
        yield DiagnosticRow("a2", measure, c, R, R, val)


def a2_constant(space: MetricMeasureSpace, weight: WeightSpec | np.ndarray,
                cfg: DiagnosticsConfig | None = None, measure: str = "mu") -> float:
    """Sampled ``sup_B (avg_B w)(avg_B 1/w)``."""
    cfg = cfg or default_diagnostics(space)
    cfg.validate(space)
    return _finite_max(_a2_rows(space, weight, cfg, measure), "a2_constant")


def lip_grid(space: MetricMeasureSpace, f: np.ndarray) -> np.ndarray:
    """Max absolute difference quotient over the axis neighbours of each grid point."""
    g = space.to_grid(np.asarray(f, dtype=float))
    out = np.zeros_like(g)
    for axis, h in enumerate(space.spacing):
        q = np.abs(np.diff(g, axis=axis)) / h
        lo = [(0, 0)] * g.ndim
        hi = [(0, 0)] * g.ndim
        lo[axis] = (1, 0)
        hi[axis] = (0, 1)
        out = np.maximum(out, np.pad(q, lo))
        out = np.maximum(out, np.pad(q, hi))
    return out.ravel()


def _poincare_rows(space, p, lam, fns, cfg, measure) -> Iterator[DiagnosticRow]:
    wts = space.weights(measure)
    for f in fns:
        f = np.asarray(f, dtype=float)
        lip_p = lip_grid(space, f) ** p
        for c in cfg.centers:
            d = space.distances_from(c)
            for R in cfg.radii:
                inner, outer = inside_open(d, R), inside_open(d, lam * R)
                mi, mo = wts[inner].sum(), wts[outer].sum()
                if mi <= 0 or mo <= 0:
                    continue
                avg = np.dot(wts[inner], f[inner]) / mi
                num = np.dot(wts[inner], np.abs(f[inner] - avg)) / mi
                den = (np.dot(wts[outer], lip_p[outer]) / mo) ** (1 / p)
                if den == 0:
                    if num > 1e-14 * max(1.0, np.abs(f).max()):
                        yield DiagnosticRow("poincare", measure, int(c), R, lam * R, math.inf)
                    continue
                yield DiagnosticRow("poincare", measure, int(c), R, lam * R, num / den)


def poincare_constant(space: MetricMeasureSpace, p: float, lam: float,
                      fns: Sequence[np.ndarray], cfg: DiagnosticsConfig | None = None,
                      measure: str = "mu") -> float:
    """Sampled (1, p)-Poincare ratio; ``inf`` marks a failure witness."""
    if lam < 1:
        raise ValueError("dilation must be at least 1")
    cfg = cfg or default_diagnostics(space)
    cfg.validate(space)
    vals = [r.value for r in _poincare_rows(space, p, lam, fns, cfg, measure)]
    if any(math.isinf(v) for v in vals):
        log.warning("poincare_constant: failure witness found (zero gradient, nonzero oscillation)")
    return max(vals, default=0.0)


def diagnostic_rows(space: MetricMeasureSpace, cfg: DiagnosticsConfig | None = None, *,
                    t: float = 2.0, eps: float = 0.5,
                    weight: WeightSpec | None = None,
                    poincare: tuple[float, float, Sequence[np.ndarray]] | None = None
                    ) -> list[DiagnosticRow]:
    """Every per-ball diagnostic value, ready for :func:`write_diagnostics_csv`."""
    cfg = cfg or default_diagnostics(space)
    cfg.validate(space)
    rows: list[DiagnosticRow] = []
    for m in MEASURES:
        rows += _doubling_rows(space, m, cfg)
        rows += _dimension_rows(space, m, cfg)
    rows += _separation_rows(space, cfg)
    rows += _reverse_holder_rows(space, cfg, t)
    rows += _ainfty_rows(space, cfg, eps)
    if weight is not None:
        rows += _a2_rows(space, weight, cfg, "mu")
    if poincare is not None:
        p, lam, fns = poincare
        rows += _poincare_rows(space, p, lam, fns, cfg, "nu")
    return rows


def write_diagnostics_csv(rows: Iterable[DiagnosticRow], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(DiagnosticRow._fields)
        for row in rows:
            writer.writerow([row.diagnostic, row.measure, row.center,
                             repr(float(row.r)), repr(float(row.R)), repr(float(row.value))])
