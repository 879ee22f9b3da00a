import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from granex import smallalg as sa

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
vec3 = arrays(np.float64, 3, elements=finite)
ten3 = arrays(np.float64, (3, 3), elements=finite)


def test_ricci_examples():
    np.testing.assert_array_equal(sa.ricci([0, 0, 1]) @ [1, 0, 0], [0, 1, 0])
    np.testing.assert_array_equal(sa.axial(sa.ricci([2, -1, 3])), [2, -1, 3])
    np.testing.assert_array_equal(sa.ricci([0, 0, 0]), np.zeros((3, 3)))


def test_axial_rejects_nonskew():
    with pytest.raises(ValueError):
        sa.axial(np.eye(3))


@given(vec3, vec3)
def test_ricci_is_cross_product(q, a):
    lhs = sa.ricci(q) @ a
    rhs = np.cross(q, a)
    scale = max(np.linalg.norm(q) * np.linalg.norm(a), 1e-300)
    assert np.linalg.norm(lhs - rhs) / scale < 1e-15


@pytest.mark.parametrize("T, sym, skw, tr", [
    (np.eye(3), np.eye(3), np.zeros((3, 3)), 3.0),
    (sa.ricci([0, 0, 1]), np.zeros((3, 3)), sa.ricci([0, 0, 1]), 0.0),
    (np.outer([1, 0, 0], [0, 1, 0]),
     0.5 * (np.outer([1, 0, 0], [0, 1, 0]) + np.outer([0, 1, 0], [1, 0, 0])),
     0.5 * (np.outer([1, 0, 0], [0, 1, 0]) - np.outer([0, 1, 0], [1, 0, 0])), 0.0),
])
def test_decompose_examples(T, sym, skw, tr):
    s, w, t = sa.decompose(T)
    np.testing.assert_allclose(s, sym, atol=1e-15)
    np.testing.assert_allclose(w, skw, atol=1e-15)
    assert t == pytest.approx(tr)


@given(ten3)
def test_decompose_idempotent(T):
    s, w, _ = sa.decompose(T)
    np.testing.assert_allclose(s + w, T, atol=1e-12)
    s2, w2, _ = sa.decompose(s)
    np.testing.assert_array_equal(s2, s)
    assert not np.any(w2)
    s3, w3, t3 = sa.decompose(w)
    np.testing.assert_array_equal(w3, w)
    assert not np.any(s3) and t3 == 0.0


def test_solve_minimum_norm_examples():
    np.testing.assert_allclose(sa.solve_minimum_norm(np.diag([0.0, 1, 1]), [0, 0, 5]), [0, 0, 5])
    b = np.array([0.3, -7.0, 2.5])
    np.testing.assert_allclose(sa.solve_minimum_norm(np.eye(3), b), b)
    with pytest.raises(sa.InconsistentSystemError):
        sa.solve_minimum_norm(np.diag([0.0, 1, 1]), [1, 0, 0])


def test_solve_minimum_norm_tensor_rhs():
    A = np.diag([2.0, 1.0, 0.0])
    X = sa.solve_minimum_norm(A, np.diag([4.0, 3.0, 0.0]))
    np.testing.assert_allclose(X, np.diag([2.0, 3.0, 0.0]))


def test_solve_minimum_norm_projection_oracle(rng):
    worst = 0.0
    for _ in range(1000):
        rank = rng.integers(1, 4)
        Q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
        w = np.zeros(3)
        w[:rank] = rng.uniform(0.1, 10.0, rank)
        A = (Q * w) @ Q.T
        x0 = rng.standard_normal(3)
        x = sa.solve_minimum_norm(A, A @ x0)
        P = Q[:, :rank] @ Q[:, :rank].T
        worst = max(worst, np.linalg.norm(x - P @ x0) / np.linalg.norm(x0))
    assert worst < 1e-10


@settings(max_examples=50)
@given(arrays(np.float64, (3, 3), elements=st.floats(-10, 10)))
def test_pinv_penrose(M):
    A = M @ M.T
    P = sa.spectral_pinv(A)
    scale = max(np.abs(A).max(), 1.0)
    np.testing.assert_allclose(A @ P @ A, A, atol=1e-8 * scale)
    np.testing.assert_allclose(P, P.T, atol=1e-12 * max(np.abs(P).max(), 1.0))


def test_orthogonality_predicates():
    th = 0.3
    R = np.array([[np.cos(th), -np.sin(th), 0], [np.sin(th), np.cos(th), 0], [0, 0, 1]])
    assert sa.is_orthogonal(R)
    assert not sa.is_orthogonal(2 * R)
    assert sa.is_symmetric(np.eye(3)) and sa.is_skew(sa.ricci([1, 2, 3]))
