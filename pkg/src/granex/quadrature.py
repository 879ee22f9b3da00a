"""Adaptive Simpson quadrature with Richardson acceptance."""

from __future__ import annotations

import math


class QuadratureError(ArithmeticError):
    pass


def _simpson(f, a, fa, b, fb):
    m = 0.5 * (a + b)
    fm = f(m)
    return m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb)


def adaptive_simpson(f, a: float, b: float, tol: float = 1e-10, max_depth: int = 60) -> float:
    """Integrate ``f`` over the finite interval ``[a, b]`` to absolute ``tol``.

    Panels are bisected until the two-panel Simpson estimate differs from the
    one-panel estimate by less than ``15 tol``; the accepted value carries the
    Richardson correction ``(S2 - S1) / 15``.
    """
    if a == b:
        return 0.0
    fa, fb = f(a), f(b)
    m, fm, whole = _simpson(f, a, fa, b, fb)
    # explicit stack; recursion depth is bounded by max_depth anyway
    total = 0.0
    stack = [(a, fa, b, fb, m, fm, whole, tol, 0)]
    while stack:
        a, fa, b, fb, m, fm, whole, eps, depth = stack.pop()
        lm, flm, left = _simpson(f, a, fa, m, fm)
        rm, frm, right = _simpson(f, m, fm, b, fb)
        delta = left + right - whole
        if abs(delta) <= 15.0 * eps and depth >= 2:
            total += left + right + delta / 15.0
            continue
        if depth >= max_depth:
            raise QuadratureError(f"no convergence on [{a}, {b}]")
        stack.append((a, fa, m, fm, lm, flm, left, eps / 2.0, depth + 1))
        stack.append((m, fm, b, fb, rm, frm, right, eps / 2.0, depth + 1))
    if not math.isfinite(total):
        raise QuadratureError("non-finite integral")
    return total


def integrate(f, a: float, b: float, tol: float = 1e-10) -> float:
    """Integrate over ``[a, b]``; ``b = inf`` maps ``[a, inf)`` onto ``[0, 1)``
    through ``xi = a + u / (1 - u)``."""
    if math.isinf(b):
        def g(u):
            if u >= 1.0:
                return 0.0
            s = 1.0 - u
            return f(a + u / s) / (s * s)

        return adaptive_simpson(g, 0.0, 1.0, tol)
    return adaptive_simpson(f, a, b, tol)
