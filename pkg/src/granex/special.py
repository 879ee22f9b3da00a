"""Dilogarithm and the transcendental equations behind the truncated
exponential and Bose/Fermi-like energy distributions."""

from __future__ import annotations

import math

PI2_6 = math.pi ** 2 / 6.0


def _li2_series(y: float) -> float:
    # |y| <= 1/2: terms fall below 2^-k / k^2
    total, term, k = 0.0, y, 1
    while True:
        add = term / (k * k)
        total += add
        if abs(add) < 1e-18 * max(1.0, abs(total)):
            return total
        k += 1
        term *= y


def dilog(y: float) -> float:
    """Real dilogarithm ``Li2(y) = sum y^k / k^2`` for ``y <= 1``.

    Arguments below -1 use the inversion formula, (-1, -1/2) the Landen
    map onto (0, 1/2) and (1/2, 1] the reflection formula.
    """
    y = float(y)
    if not math.isfinite(y):
        raise ValueError("dilog argument must be finite")
    if y > 1.0:
        raise ValueError("dilog is complex for y > 1")
    if y == 1.0:
        return PI2_6
    if y < -1.0:
        return -PI2_6 - 0.5 * math.log(-y) ** 2 - dilog(1.0 / y)
    if y < -0.5:
        # Landen: Li2(y) = -Li2(y/(y-1)) - log^2(1-y)/2, with y/(y-1) in (1/3, 1/2]
        return -_li2_series(y / (y - 1.0)) - 0.5 * math.log1p(-y) ** 2
    if y <= 0.5:
        return _li2_series(y)
    return PI2_6 - math.log(y) * math.log1p(-y) - _li2_series(1.0 - y)


def bisect_newton(f, df, lo: float, hi: float, tol: float = 1e-12, polish: int = 4) -> float:
    """Root of ``f`` bracketed by ``[lo, hi]``: bisection, then Newton steps.

    Newton iterates leaving the bracket are discarded.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise ValueError("root is not bracketed")
    while hi - lo > 1e-9 * max(1.0, abs(lo), abs(hi)):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    for _ in range(polish):
        d = df(x)
        if d == 0.0:
            break
        nx = x - f(x) / d
        if not (lo - tol <= nx <= hi + tol):
            break
        done = abs(nx - x) <= tol * max(1.0, abs(x))
        x = nx
        if done:
            break
    return x


def _trunc_exp_mean(alpha: float, xi2: float) -> float:
    """Mean of the density proportional to exp(-alpha xi) on [0, xi2]."""
    x = alpha * xi2
    if abs(x) < 1e-4:
        return xi2 / 2 - alpha * xi2 ** 2 / 12 + alpha ** 3 * xi2 ** 4 / 720
    if x > 700.0:
        return 1.0 / alpha
    return 1.0 / alpha - xi2 / math.expm1(x)


def _trunc_exp_mean_rate(alpha: float, xi2: float) -> float:
    x = alpha * xi2
    if abs(x) < 1e-4:
        return -xi2 ** 2 / 12 + alpha ** 2 * xi2 ** 4 / 240
    if x > 700.0:
        return -1.0 / alpha ** 2
    e = math.expm1(x)
    return -1.0 / alpha ** 2 + xi2 ** 2 * (e + 1.0) / e ** 2


def solve_alpha(xi2: float) -> float:
    """Decay rate of the truncated exponential on ``[0, xi2]`` with unit mean.

    Solves ``1/alpha - xi2 / (exp(alpha xi2) - 1) = 1``, the root of
    ``alpha - 1 = alpha xi2 / (1 - exp(alpha xi2))`` other than the spurious
    ``alpha = 0`` (which is the root only for ``xi2 = 2``).
    """
    xi2 = float(xi2)
    if not xi2 > 1.0:
        raise ValueError("no unit-mean truncated exponential exists for xi2 <= 1")
    if xi2 == 2.0:
        return 0.0
    lo = -1.0 / (xi2 - 1.0)  # mean(lo) > 1
    hi = 1.0  # mean(1) < 1
    alpha = bisect_newton(lambda a: _trunc_exp_mean(a, xi2) - 1.0,
                          lambda a: _trunc_exp_mean_rate(a, xi2), lo, hi)
    if xi2 >= 8.0:
        # alpha = 1 / (1 + xi2 / (e^(alpha xi2) - 1)) contracts by ~xi2^2 e^-xi2
        # and rounds monotonically as alpha saturates at one
        for _ in range(20):
            nxt = 1.0 / (1.0 + xi2 / math.expm1(alpha * xi2))
            if nxt == alpha:
                break
            alpha = nxt
    return alpha


def bose_fermi_residual(beta: float) -> float:
    """``beta^2 - |Li2(1 - e^beta)|``; zero at the two admissible rates."""
    return beta * beta - abs(dilog(-math.expm1(beta)))


def _bose_fermi_rate(beta: float) -> float:
    y = -math.expm1(beta)
    # d/dbeta Li2(1 - e^beta) = beta e^beta / (1 - e^beta)
    dli = beta * math.exp(beta) / y
    sign = 1.0 if dilog(y) >= 0.0 else -1.0
    return 2.0 * beta - sign * dli


def solve_bose_fermi() -> tuple[float, float]:
    """Negative (Bose-like) and positive (Fermi-like) roots of
    ``beta^2 = |Li2(1 - e^beta)|``."""
    bose = bisect_newton(bose_fermi_residual, _bose_fermi_rate, -2.0, -0.1)
    fermi = bisect_newton(bose_fermi_residual, _bose_fermi_rate, 0.1, 3.0)
    return bose, fermi
