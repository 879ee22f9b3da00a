"""Small 3D vector/tensor helpers.

Vectors are numpy arrays of shape (3,), tensors arrays of shape (3, 3).
Everything here is a pure function of its arguments.
"""

from __future__ import annotations

import numpy as np

RTOL = 1e-12


class InconsistentSystemError(ValueError):
    """Right-hand side has a component outside the range of the operator."""


def _scale(*arrays) -> float:
    s = max(float(np.max(np.abs(a))) if np.size(a) else 0.0 for a in arrays)
    return s if s > 0.0 else 1.0


def vec(a) -> np.ndarray:
    v = np.asarray(a, dtype=float).reshape(3)
    if not np.all(np.isfinite(v)):
        raise ValueError("vector components must be finite")
    return v


def ten(a) -> np.ndarray:
    t = np.asarray(a, dtype=float).reshape(3, 3)
    if not np.all(np.isfinite(t)):
        raise ValueError("tensor components must be finite")
    return t


def ricci(q) -> np.ndarray:
    """Skew tensor ``Q`` with ``Q @ a == cross(q, a)``."""
    q1, q2, q3 = vec(q)
    return np.array([[0.0, -q3, q2], [q3, 0.0, -q1], [-q2, q1, 0.0]])


def axial(w) -> np.ndarray:
    """Inverse of :func:`ricci`; rejects tensors that are not skew."""
    w = ten(w)
    if not is_skew(w):
        raise ValueError("axial() needs a skew tensor")
    return np.array([w[2, 1] - w[1, 2], w[0, 2] - w[2, 0], w[1, 0] - w[0, 1]]) / 2.0


def sym(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    return 0.5 * (t + t.T)


def skw(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    return 0.5 * (t - t.T)


def decompose(t):
    """Split ``t`` into ``(sym, skw, trace)``."""
    t = ten(t)
    return sym(t), skw(t), float(np.trace(t))


def is_symmetric(t, tol: float = RTOL) -> bool:
    t = np.asarray(t, dtype=float)
    return bool(np.max(np.abs(t - t.T)) <= tol * _scale(t))


def is_skew(t, tol: float = RTOL) -> bool:
    t = np.asarray(t, dtype=float)
    return bool(np.max(np.abs(t + t.T)) <= tol * _scale(t))


def is_orthogonal(t, tol: float = RTOL) -> bool:
    t = np.asarray(t, dtype=float)
    return bool(np.max(np.abs(t.T @ t - np.eye(3))) <= tol * 10)


def outer(a, b) -> np.ndarray:
    return np.outer(a, b)


def dot(a, b) -> float:
    """Full contraction ``a . b = sum_ij a_ij b_ij`` (or the vector dot)."""
    return float(np.sum(np.asarray(a) * np.asarray(b)))


def frob(t) -> float:
    return float(np.linalg.norm(np.asarray(t, dtype=float)))


def rel_norm(diff, *refs) -> float:
    """Frobenius norm of ``diff`` relative to the largest reference norm (or 1)."""
    scale = max((frob(r) for r in refs), default=0.0)
    return frob(diff) / (scale if scale > 0.0 else 1.0)


def spectral_pinv(a, rtol: float = RTOL) -> np.ndarray:
    """Minimum-norm inverse of a symmetric PSD tensor via eigen-decomposition."""
    a = sym(ten(a))
    w, v = np.linalg.eigh(a)
    cut = rtol * max(float(np.max(np.abs(w))), 0.0)
    inv = np.array([1.0 / x if x > cut and x > 0.0 else 0.0 for x in w])
    return (v * inv) @ v.T


def solve_minimum_norm(a, b, rtol: float = RTOL) -> np.ndarray:
    """Minimum-norm solution of ``a @ x = b`` for symmetric PSD ``a``.

    ``b`` may be a vector or a tensor (columns solved independently).
    Eigencomponents below ``rtol`` times the largest eigenvalue are treated
    as null; a right-hand side with weight on them raises
    :class:`InconsistentSystemError`.
    """
    a = ten(a)
    if not is_symmetric(a, 1e-10):
        raise ValueError("solve_minimum_norm needs a symmetric operator")
    b = np.asarray(b, dtype=float)
    if b.shape not in ((3,), (3, 3)) or not np.all(np.isfinite(b)):
        raise ValueError("right-hand side must be a finite 3-vector or 3x3 tensor")
    w, v = np.linalg.eigh(sym(a))
    wmax = float(np.max(np.abs(w)))
    keep = w > rtol * wmax if wmax > 0.0 else np.zeros(3, dtype=bool)
    coef = v.T @ b
    bscale = _scale(b) if np.any(b) else 1.0
    # tolerance on the null-space projection of b, relative to b itself
    if np.any(np.abs(coef[~keep]) > 1e-9 * bscale):
        raise InconsistentSystemError("right-hand side lies outside range(A)")
    inv = np.where(keep, 1.0 / np.where(keep, w, 1.0), 0.0)
    if b.ndim == 1:
        return v @ (inv * coef)
    return v @ (inv[:, None] * coef)
