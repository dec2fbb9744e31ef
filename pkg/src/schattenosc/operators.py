"""Dense singular integral operators on ``L^2`` of a discrete measure.

An :class:`OperatorMatrix` acts on functions on the grid as ``(T f)_i = sum_j T_ij f_j``
and is regarded as an operator on ``L^2(inner_weights)``; kernel operators
store ``T_ij = K(x_i, x_j) mu_j`` so that this is the quadrature of
``int K(x, y) f(y) dmu(y)``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np
from scipy.integrate import nquad
from scipy.special import gamma

from .funcnorms import open_ball_masses
from .space import DiagnosticsConfig, MetricMeasureSpace, WeightSpec, default_diagnostics


@dataclass(eq=False)
class OperatorMatrix:
    entries: np.ndarray
    inner_weights: np.ndarray
    label: str = ""
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=float)
        self.inner_weights = np.asarray(self.inner_weights, dtype=float).ravel()
        n = self.inner_weights.size
        if self.entries.shape != (n, n):
            raise ValueError(f"entries of shape {self.entries.shape} do not match {n} weights")
        if not np.all(self.inner_weights > 0):
            raise ValueError("inner weights must be strictly positive")
        if not np.all(np.isfinite(self.entries)):
            raise ValueError("operator entries must be finite")

    @property
    def n(self) -> int:
        return self.inner_weights.size

    def __matmul__(self, f):
        return self.entries @ f


@dataclass(frozen=True)
class KernelSpec:
    """Kernel ``K(x, y)``; ``evaluator(X, Y)`` broadcasts over leading axes of point arrays."""

    kind: str
    evaluator: Callable[[np.ndarray, np.ndarray], np.ndarray]
    params: tuple = ()

    def __call__(self, X, Y):
        return self.evaluator(np.asarray(X, dtype=float), np.asarray(Y, dtype=float))


def riesz_kernel(d: int, j: int) -> KernelSpec:
    """``K(x, y) = c_d (x_j - y_j) / |x - y|^(d+1)``, ``c_d = Gamma((d+1)/2) / pi^((d+1)/2)``; ``j`` is 1-based."""
    if not 1 <= j <= d:
        raise ValueError("component must satisfy 1 <= j <= d")
    c_d = gamma((d + 1) / 2) / math.pi ** ((d + 1) / 2)

    def K(X, Y):
        diff = X - Y
        r = np.sqrt(np.sum(diff ** 2, axis=-1))
        with np.errstate(divide="ignore", invalid="ignore"):
            return c_d * diff[..., j - 1] / r ** (d + 1)

    return KernelSpec("hilbert" if d == 1 else "riesz", K, (d, j))


def hilbert_kernel() -> KernelSpec:
    return riesz_kernel(1, 1)


def custom_kernel(fn: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> KernelSpec:
    return KernelSpec("custom", fn)


def zero_kernel() -> KernelSpec:
    return KernelSpec("custom", lambda X, Y: np.zeros(np.broadcast_shapes(X.shape, Y.shape)[:-1]))


def _off_diagonal_values(kernel: KernelSpec, points: np.ndarray) -> np.ndarray:
    K = np.asarray(kernel(points[:, None, :], points[None, :, :]), dtype=float)
    np.fill_diagonal(K, 0.0)
    if not np.all(np.isfinite(K)):
        raise ValueError("kernel is not finite at some off-diagonal grid pair")
    return K


def kernel_matrix(kernel: KernelSpec, space: MetricMeasureSpace,
                  diagonal_policy: str = "principal_value_rowsum",
                  measure: str = "mu") -> OperatorMatrix:
    """``T_ij = K(x_i, x_j) mu_j`` off the diagonal.

    ``diagonal_policy="zero"`` leaves the diagonal empty;
    ``"principal_value_rowsum"`` sets it so that ``T 1 = 0``.
    """
    w = space.weights(measure)
    T = _off_diagonal_values(kernel, space.points) * w[None, :]
    if diagonal_policy == "principal_value_rowsum":
        T[np.diag_indices_from(T)] = -T.sum(axis=1)
    elif diagonal_policy != "zero":
        raise ValueError(f"unknown diagonal policy {diagonal_policy!r}")
    return OperatorMatrix(T, w, f"{kernel.kind}{kernel.params}",
                          {"diagonal_policy": diagonal_policy})


class KernelReport(NamedTuple):
    size: float
    holder: float
    nondegeneracy: float
    degenerate: bool
    skipped: int


def kernel_diagnostics(kernel: KernelSpec, space: MetricMeasureSpace,
                       cfg: DiagnosticsConfig | None = None, eta: float = 1.0,
                       measure: str = "mu", n_near: int = 8) -> KernelReport:
    """Empirical size, Hoelder and non-degeneracy constants of a kernel.

    Every bound is normalised by ``mu(B(x, |x - y|))``.  The Hoelder probe
    pairs each sampled centre ``x`` with its ``n_near`` nearest neighbours
    ``x'`` and all ``y`` with ``|x - x'| <= |x - y| / 4``.
    """
    cfg = cfg or default_diagnostics(space)
    cfg.validate(space)
    P = space.points
    V = open_ball_masses(space, measure)
    size = holder = 0.0
    nondeg = math.inf
    skipped = 0
    for x in cfg.centers:
        d = space.distances_from(x)
        others = np.flatnonzero(np.arange(space.n) != x)
        kxy = kernel(P[x], P[others])
        kyx = kernel(P[others], P[x])
        vol = V[x, others]
        size = max(size, float(np.max(np.abs(kxy) * vol, initial=0.0)))

        near = others[np.argsort(d[others], kind="stable")[:n_near]]
        for xp in near:
            ok = others[d[others] >= 4 * d[xp]]
            ok = ok[ok != xp]
            if ok.size == 0:
                continue
            diff = (np.abs(kernel(P[x], P[ok]) - kernel(P[xp], P[ok]))
                    + np.abs(kernel(P[ok], P[x]) - kernel(P[ok], P[xp])))
            q = diff * V[x, ok] / (d[xp] / d[ok]) ** eta
            holder = max(holder, float(q.max()))

        both = (np.abs(kxy) + np.abs(kyx)) * vol
        for r in cfg.radii:
            band = (d[others] >= r / 2) & (d[others] <= 2 * r)
            if not band.any():
                skipped += 1
                continue
            nondeg = min(nondeg, float(both[band].max()))
    if math.isinf(nondeg):
        nondeg = 0.0
    degenerate = nondeg <= cfg.tolerance * size or nondeg == 0.0
    return KernelReport(size, holder, nondeg, bool(degenerate), skipped)


@dataclass(frozen=True)
class BesselSpec:
    """Bessel-Riesz transform ``d_j (-Delta_lambda)^(-1/2)``.

    ``component`` is 1-based; the last axis is normal to the wall.
    Tangential axes are periodic, the wall is Neumann and the far end of the
    normal axis is Dirichlet.
    """

    lam: float
    component: int = 1
    tangential: str = "periodic"

    def __post_init__(self):
        if not (0 <= self.lam < math.inf):
            raise ValueError("lambda must be finite and nonnegative")


def bessel_weight(lam: float, dim: int) -> WeightSpec:
    return WeightSpec.power(2 * lam, axis=dim - 1)


def _axis_operator(A: np.ndarray, axis: int, shape: tuple[int, ...]) -> np.ndarray:
    out = np.ones((1, 1))
    for k, nk in enumerate(shape):
        out = np.kron(out, A if k == axis else np.eye(nk))
    return out


def _difference_1d(n: int, h: float, kind: str):
    """Forward differences to the face after each cell, plus face length factors."""
    Dm = (np.eye(n, k=1) - np.eye(n)) / h
    lengths = np.ones(n)
    if kind == "periodic":
        Dm[n - 1, 0] = 1.0 / h
    else:
        # Dirichlet face half a cell beyond the last centre
        Dm[n - 1, n - 1] = -2.0 / h
        lengths[n - 1] = 0.5
    return Dm, lengths


def divergence_form_generator(spec: BesselSpec, space: MetricMeasureSpace):
    """Pieces of ``L u = -w^(-1) div(w grad u)`` on the grid.

    Returns ``(m, grads, face_weights)`` with ``m`` the Bessel masses,
    ``grads[a]`` the difference matrix along axis ``a`` and ``face_weights[a]``
    the energy weights, so that ``L = M^(-1) sum_a grads[a].T diag(face_weights[a]) grads[a]``.
    """
    if not space.is_grid:
        raise ValueError("Bessel operator needs a grid space")
    dim = space.dim
    normal = dim - 1
    if space.domain.bounds[normal][0] != 0.0:
        raise ValueError("the normal axis must start at the wall x = 0")
    shape = space.resolution
    cell = space.cell_size
    xn = space.points[:, normal]
    def w(x):
        return x ** (2 * spec.lam) if spec.lam else np.ones_like(x)

    m = w(xn) * cell
    if not np.allclose(space.mu_weights, m, rtol=1e-10, atol=0):
        raise ValueError("space mu must be the Bessel measure x_n^(2 lambda) dx")

    grads, face_weights = [], []
    for a in range(dim):
        h = space.spacing[a]
        kind = "dirichlet" if a == normal else spec.tangential
        Dm, lengths = _difference_1d(shape[a], h, kind)
        grads.append(_axis_operator(Dm, a, shape))
        along = _axis_operator(np.diag(lengths), a, shape).diagonal()
        if a == normal:
            face_x = xn + space.spacing[a] / 2
            face_weights.append(w(face_x) * cell * along)
        else:
            face_weights.append(w(xn) * cell * along)
    return m, grads, face_weights


def bessel_riesz_operator(spec: BesselSpec, space: MetricMeasureSpace) -> OperatorMatrix:
    """Spectral Bessel-Riesz transform on a half-line or half-space grid.

    The generator is symmetrised by ``M^(1/2)`` conjugation and diagonalised;
    ``L^(-1/2)`` acts as a pseudo-inverse on any kernel.  The difference
    along axis ``j`` lands on faces, which are identified with cells by the
    isometry ``g_f -> g_f sqrt(c_f / m_i)``.
    """
    if not 1 <= spec.component <= space.dim:
        raise ValueError("component out of range")
    m, grads, cw = divergence_form_generator(spec, space)
    A = sum(G.T @ (c[:, None] * G) for G, c in zip(grads, cw))
    s = 1.0 / np.sqrt(m)
    S = s[:, None] * A * s[None, :]
    S = 0.5 * (S + S.T)
    try:
        lam, V = np.linalg.eigh(S)
    except np.linalg.LinAlgError as err:
        raise RuntimeError("eigendecomposition of the Bessel generator failed") from err
    top = max(abs(lam).max(), 1e-300)
    if lam.min() < -1e-8 * top:
        raise RuntimeError(f"Bessel generator has a negative eigenvalue {lam.min():.3g}")
    zero = lam <= 1e-10 * top
    inv_sqrt = np.where(zero, 0.0, 1.0 / np.sqrt(np.where(zero, 1.0, lam)))
    L_inv_half = (s[:, None] * (V * inv_sqrt) @ V.T) * np.sqrt(m)[None, :]
    j = spec.component - 1
    J = np.sqrt(cw[j] / m)
    R = J[:, None] * (grads[j] @ L_inv_half)
    return OperatorMatrix(R, m, f"bessel_riesz(lambda={spec.lam}, j={spec.component})",
                          {"zero_modes": int(zero.sum()), "lambda": spec.lam})


def commutator(b: np.ndarray, T: OperatorMatrix) -> OperatorMatrix:
    """``[b, T] f = b T f - T(b f)``, entrywise ``(b_i - b_j) T_ij``."""
    b = np.asarray(b, dtype=float)
    if b.shape != (T.n,):
        raise ValueError("multiplier must have one value per point")
    C = (b[:, None] - b[None, :]) * T.entries
    return OperatorMatrix(C, T.inner_weights, f"[b, {T.label}]", dict(T.info))


def self_cell_moment(spacing, j: int) -> float:
    """``int_cell z_j^2 / |z|^(d+1) dz`` over the grid cell centred at the origin (``j`` 0-based)."""
    half = np.asarray(spacing, dtype=float) / 2
    d = half.size
    if d == 1:
        return float(2 * half[0])
    if d == 2:
        a, b = half[j], half[1 - j]
        return float(4 * b * np.arcsinh(a / b))

    def f(*z):
        z = np.asarray(z)
        return z[j] ** 2 / np.linalg.norm(z) ** (d + 1)

    val, _ = nquad(f, [(0, h) for h in half])
    return float(2 ** d * val)


def kernel_commutator(b: np.ndarray, kernel: KernelSpec, space: MetricMeasureSpace,
                      measure: str = "mu") -> OperatorMatrix:
    """``[b, T]`` for a Riesz-type kernel with the self-cell term on the diagonal.

    Off the diagonal this is :func:`commutator` of :func:`kernel_matrix`.  The
    kernel ``(b(x) - b(y)) K(x, y)`` of the commutator has no singularity
    strong enough to vanish on the own cell: to first order it integrates to
    ``c_d d_j b(x) int_cell z_j^2 / |z|^(d+1) dz`` times the density.  For
    ``b`` linear and the Hilbert kernel this makes the matrix exactly rank one.
    Kernels other than ``hilbert`` / ``riesz`` get a zero diagonal.
    """
    T = kernel_matrix(kernel, space, "zero", measure)
    C = commutator(b, T)
    if kernel.kind in ("hilbert", "riesz") and space.is_grid:
        d, j = kernel.params
        c_d = gamma((d + 1) / 2) / math.pi ** ((d + 1) / 2)
        grads = np.gradient(space.to_grid(np.asarray(b, dtype=float)), *space.spacing,
                            edge_order=2 if min(space.resolution) > 2 else 1)
        dj = (grads if d == 1 else grads[j - 1]).ravel()
        density = space.weights(measure) / space.cell_size
        C.entries[np.diag_indices(space.n)] = density * c_d * dj * self_cell_moment(space.spacing, j - 1)
    C.label = f"[b, {kernel.kind}{kernel.params}]"
    C.info["diagonal"] = "self_cell"
    return C


def apply_weight(T: OperatorMatrix, w: WeightSpec | np.ndarray,
                 points: np.ndarray | None = None) -> OperatorMatrix:
    """The same matrix viewed on ``L^2(w dmu)``."""
    if isinstance(w, WeightSpec):
        if points is None:
            raise ValueError("points are needed to evaluate a WeightSpec")
        w = w.evaluate(points)
    w = np.asarray(w, dtype=float)
    if w.shape != (T.n,) or not np.all(np.isfinite(w)) or np.any(w <= 0):
        raise ValueError("weight must be finite and strictly positive")
    return OperatorMatrix(T.entries, T.inner_weights * w, f"{T.label} on L2(w)", dict(T.info))


def save_operator(T: OperatorMatrix, path) -> None:
    """Write ``.csv`` (one line per row: weight then entries) or raw ``.bin``.

    The binary layout is little-endian: int64 ``n``, ``n`` float64 weights,
    then the ``n*n`` float64 entries in row-major order.
    """
    path = str(path)
    if path.endswith(".csv"):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["weight"] + [f"col{j}" for j in range(T.n)])
            for wi, row in zip(T.inner_weights, T.entries):
                writer.writerow([repr(float(wi))] + [repr(float(v)) for v in row])
    else:
        with open(path, "wb") as fh:
            fh.write(np.int64(T.n).astype("<i8").tobytes())
            fh.write(T.inner_weights.astype("<f8").tobytes())
            fh.write(np.ascontiguousarray(T.entries).astype("<f8").tobytes())


def load_operator(path) -> OperatorMatrix:
    path = str(path)
    if path.endswith(".csv"):
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        return OperatorMatrix(data[:, 1:], data[:, 0], "loaded")
    raw = open(path, "rb").read()
    n = int(np.frombuffer(raw[:8], dtype="<i8")[0])
    vals = np.frombuffer(raw[8:], dtype="<f8")
    return OperatorMatrix(vals[n:].reshape(n, n), vals[:n], "loaded")
