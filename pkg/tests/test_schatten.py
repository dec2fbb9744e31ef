import csv
import itertools
import math

import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from schattenosc.operators import OperatorMatrix, hilbert_kernel, kernel_commutator
from schattenosc.oscnorms import LorentzParams
from schattenosc.schatten import (SingularValueProfile, p_eta, save_profile_csv,
                                  schatten_norm, singular_values, weighted_matrix)
from schattenosc.space import build_grid_space, interval


def weighted_adjoint_oracle(T, w):
    """Singular values from the generalized eigenproblem ``T^T W T x = s^2 W x``.

    The adjoint of ``T`` on ``L^2(w)`` is ``W^-1 T^T W``, so ``T* T`` is
    self-adjoint there and ``eigh(T^T W T, W)`` returns its spectrum.
    """
    W = np.diag(w)
    ev = sla.eigh(T.T @ W @ T, W, eigvals_only=True)
    return np.sqrt(np.clip(ev, 0, None))[::-1]


def op(A, w=None):
    A = np.asarray(A, dtype=float)
    return OperatorMatrix(A, np.ones(len(A)) if w is None else np.asarray(w, dtype=float))


# singular values

def test_identity_any_weights():
    w = np.array([0.1, 3.0, 7.0, 0.5])
    np.testing.assert_allclose(singular_values(op(np.eye(4), w)).values, 1.0, rtol=1e-14)


def test_diagonal():
    np.testing.assert_array_equal(singular_values(op(np.diag([1.0, 2.0]))).values, [2.0, 1.0])


def test_matches_weighted_adjoint_oracle(rng):
    T = rng.normal(size=(3, 3))
    w = rng.uniform(0.1, 5, 3)
    np.testing.assert_allclose(singular_values(op(T, w)).values, weighted_adjoint_oracle(T, w),
                               rtol=0, atol=1e-10)


@given(st.integers(2, 7), st.integers(0, 10 ** 6))
def test_oracle_property(n, seed):
    rng = np.random.default_rng(seed)
    T = rng.normal(size=(n, n))
    w = rng.uniform(0.05, 20, n)
    s = singular_values(op(T, w)).values
    np.testing.assert_allclose(s, weighted_adjoint_oracle(T, w), rtol=1e-8, atol=1e-10)


@given(st.integers(2, 6), st.integers(0, 10 ** 6))
def test_permutation_invariance(n, seed):
    rng = np.random.default_rng(seed)
    T = rng.normal(size=(n, n))
    w = rng.uniform(0.1, 10, n)
    p = rng.permutation(n)
    a = singular_values(op(T, w)).values
    b = singular_values(op(T[np.ix_(p, p)], w[p])).values
    np.testing.assert_allclose(a, b, rtol=1e-10, atol=1e-12)


@given(st.floats(-50, 50), st.integers(0, 10 ** 6))
def test_homogeneity(c, seed):
    rng = np.random.default_rng(seed)
    T = rng.normal(size=(5, 5))
    w = rng.uniform(0.1, 10, 5)
    np.testing.assert_allclose(singular_values(op(c * T, w)).values,
                               abs(c) * singular_values(op(T, w)).values, rtol=1e-10, atol=1e-12)


@given(st.integers(0, 10 ** 6))
def test_frobenius_identity(seed):
    rng = np.random.default_rng(seed)
    T = op(rng.normal(size=(6, 6)), rng.uniform(0.1, 10, 6))
    s2 = schatten_norm(singular_values(T), 2) ** 2
    assert s2 == pytest.approx(np.sum(weighted_matrix(T) ** 2), rel=1e-10)


def test_svd_truncation_beats_low_rank_competitors(rng):
    # a_n is an infimum over rank < n+1 operators, attained by truncated SVD
    A = rng.normal(size=(4, 4))
    s = singular_values(op(A)).values
    for k in range(1, 4):
        for _ in range(200):
            B = rng.normal(size=(4, k)) @ rng.normal(size=(k, 4))
            assert np.linalg.norm(A - B, 2) >= s[k] - 1e-12
        U, sv, Vt = np.linalg.svd(A)
        best = (U[:, :k] * sv[:k]) @ Vt[:k]
        assert np.linalg.norm(A - best, 2) == pytest.approx(s[k], rel=1e-12)


def test_svd_failure_reports_condition(monkeypatch):
    def boom(*a, **k):
        raise np.linalg.LinAlgError("SVD did not converge")

    monkeypatch.setattr(np.linalg, "svd", boom)
    T = op([[1.0, 0.0], [0.0, 1.0]], [1.0, 1e6])
    with pytest.raises(np.linalg.LinAlgError, match="weight ratio"):
        singular_values(T)


# profile

def test_profile_validation():
    with pytest.raises(ValueError):
        SingularValueProfile(np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        SingularValueProfile(np.array([1.0, -1.0]))
    P = SingularValueProfile(np.array([3.0, 1e-3, 1e-12]))
    assert len(P) == 3 and P.rank() == 2 and P.rank(1e-2) == 1


def test_profile_csv(tmp_path):
    P = SingularValueProfile(np.array([0.5, 1 / 3]))
    save_profile_csv(P, tmp_path / "p.csv")
    with open(tmp_path / "p.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["index", "value"]
    assert [int(r[0]) for r in rows[1:]] == [0, 1]
    assert float(rows[2][1]) == 1 / 3


# Schatten norms

@pytest.mark.parametrize("pq", [(1, 1), (2, 2), (0.5, 0.5), (1, math.inf), (3, 1.5)])
def test_rank_one_all_params(pq):
    assert schatten_norm(SingularValueProfile(np.array([0.7, 0, 0])), LorentzParams(*pq)) == \
        pytest.approx(0.7, rel=1e-14)


def test_trace_norm_of_diagonal():
    assert schatten_norm(op(np.diag([2.0, 1.0])), 1) == 3.0


def test_commutator_rank_one_value():
    S = build_grid_space(interval(), 256)
    P = singular_values(kernel_commutator(S.points[:, 0], hilbert_kernel(), S))
    for pq in [(1, 1), (2, 2), (1, math.inf), (0.5, 2), (4, 1)]:
        assert schatten_norm(P, LorentzParams(*pq)) == pytest.approx(1 / math.pi, rel=1e-10)


def test_weak_type_exact():
    s = (np.arange(100) + 1.0) ** -0.5
    assert schatten_norm(SingularValueProfile(s), LorentzParams(2, math.inf)) == \
        pytest.approx(1.0, rel=1e-14)


@given(arrays(float, st.integers(1, 12), elements=st.floats(0, 10)),
       st.floats(0.5, 4), st.floats(0.5, 4))
def test_schatten_brute_force(vals, p, q):
    s = np.sort(vals)[::-1]
    brute = sum(((n + 1) ** (1 / p - 1 / q) * v) ** q for n, v in enumerate(s)) ** (1 / q)
    assert schatten_norm(SingularValueProfile(s), LorentzParams(p, q)) == \
        pytest.approx(brute, rel=1e-10, abs=1e-300)


@given(arrays(float, st.integers(1, 12), elements=st.floats(0, 10)))
def test_schatten_nonincreasing_in_p(vals):
    P = SingularValueProfile(np.sort(vals)[::-1])
    norms = [schatten_norm(P, p) for p in (0.5, 1, 1.5, 2, 4, 8)]
    for a, b in itertools.pairwise(norms):
        assert a >= b * (1 - 1e-12)


# p(eta)

@pytest.mark.parametrize("eta, Delta, value", [(1, 2, 1.0), (1, 1, 1.0),
                                                (0.1, 2, 1 / 0.55)])
def test_p_eta_examples(eta, Delta, value):
    assert p_eta(eta, Delta).value == pytest.approx(value, rel=1e-14)


def test_p_eta_relations():
    assert p_eta(1, 2).relation == "<d"
    assert p_eta(0.1, 2).relation == "<d"
    assert p_eta(1, 1).relation == "=1"
    assert p_eta(1, 0.5).relation is None
    assert p_eta(0.1, 1.5, d=1.2).relation == ">=d"


@given(st.floats(1e-3, 1), st.floats(1.0001, 50))
def test_p_eta_below_dimension(eta, Delta):
    # the index stays below 2, hence below d as soon as d >= 2
    r = p_eta(eta, Delta)
    assert 1 <= r.value < max(2.0, Delta)
    assert r.value < Delta or Delta < 2


@pytest.mark.parametrize("eta, Delta", [(0, 1), (1.5, 1), (0.5, 0), (0.5, -1)])
def test_p_eta_rejects(eta, Delta):
    with pytest.raises(ValueError):
        p_eta(eta, Delta)
