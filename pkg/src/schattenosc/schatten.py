"""Singular values on weighted ``L^2`` and Schatten-Lorentz norms."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .operators import OperatorMatrix
from .oscnorms import LorentzParams, lorentz_seq_norm


@dataclass
class SingularValueProfile:
    """Nonincreasing singular values; ``values[n]`` is the approximation number ``a_n``."""

    values: np.ndarray
    label: str = ""
    inner: str = "L2(weights)"

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if np.any(np.diff(self.values) > 0) or np.any(self.values < 0):
            raise ValueError("profile must be nonnegative and nonincreasing")

    def __len__(self):
        return self.values.size

    def rank(self, tol: float = 1e-8) -> int:
        return int(np.sum(self.values > tol))


def weighted_matrix(T: OperatorMatrix) -> np.ndarray:
    """``W^(1/2) T W^(-1/2)``: the matrix of ``T`` in an orthonormal basis of ``L^2(W)``."""
    r = np.sqrt(T.inner_weights)
    return r[:, None] * T.entries / r[None, :]


def singular_values(T: OperatorMatrix) -> SingularValueProfile:
    A = weighted_matrix(T)
    try:
        s = np.linalg.svd(A, compute_uv=False)
    except np.linalg.LinAlgError as err:
        w = T.inner_weights
        raise np.linalg.LinAlgError(
            f"SVD failed (weight ratio {w.max() / w.min():.3g}, "
            f"max entry {np.abs(T.entries).max():.3g})") from err
    return SingularValueProfile(np.sort(s)[::-1], T.label)


def schatten_norm(profile: SingularValueProfile | OperatorMatrix,
                  params: LorentzParams | tuple | float) -> float:
    """``S^{p,q}`` (quasi-)norm: the ``l^{p,q}`` norm of the approximation numbers."""
    if isinstance(profile, OperatorMatrix):
        profile = singular_values(profile)
    return lorentz_seq_norm(profile.values, params)


def save_profile_csv(profile: SingularValueProfile, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "value"])
        for i, v in enumerate(profile.values):
            writer.writerow([i, repr(float(v))])


class PEta(NamedTuple):
    value: float
    relation: str | None


def p_eta(eta: float, Delta: float, d: float | None = None) -> PEta:
    """``max(1, (eta/Delta + 1/2)^(-1))`` and how it compares with ``d`` (default ``Delta``).

    ``relation`` is ``"<d"`` or ``">=d"`` when ``d > 1``, ``"=1"`` or ``">1"``
    when ``d == 1``, and ``None`` for ``d < 1``.
    """
    if not 0 < eta <= 1:
        raise ValueError("eta must lie in (0, 1]")
    if not Delta > 0:
        raise ValueError("Delta must be positive")
    d = Delta if d is None else d
    value = max(1.0, 1.0 / (eta / Delta + 0.5))
    if d > 1:
        rel = "<d" if value < d else ">=d"
    elif d == 1:
        rel = "=1" if value == 1.0 else ">1"
    else:
        rel = None
    return PEta(value, rel)
