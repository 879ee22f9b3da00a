"""Agitation-energy distributions, granular temperatures and the extended
canonical ensemble.

Every density lives on the non-dimensional energy axis ``xi`` (energy per
unit mass over its mean) and satisfies ``int gamma = int xi gamma = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import smallalg as sa
from .quadrature import integrate
from .special import solve_alpha, solve_bose_fermi

INF = math.inf


class Distribution:
    """Base class: subclasses provide ``_pdf``, ``_dpdf`` and ``support``."""

    name = "distribution"

    def support(self) -> tuple[float, float]:
        return 0.0, INF

    def params(self) -> dict:
        return {}

    def pdf(self, xi: float) -> float:
        if xi < 0:
            raise ValueError("xi must be non-negative")
        lo, hi = self.support()
        if xi < lo or xi > hi:
            return 0.0
        return self._pdf(xi)

    __call__ = pdf

    def dpdf(self, xi: float) -> float:
        lo, hi = self.support()
        if xi < lo or xi > hi:
            return 0.0
        return self._dpdf(xi)

    def edge_values(self) -> tuple[float, float]:
        """Density at the left end of the support and its limit at the right end."""
        lo, hi = self.support()
        return self._pdf(lo), (0.0 if math.isinf(hi) else self._pdf(hi))


@dataclass(frozen=True)
class Canonical(Distribution):
    name = "canonical"

    def _pdf(self, xi):
        return math.exp(-xi)

    def _dpdf(self, xi):
        return -math.exp(-xi)


@dataclass(frozen=True)
class PowerLaw(Distribution):
    name = "power_law"

    def _pdf(self, xi):
        return 24.0 * (2.0 + xi) ** -4

    def _dpdf(self, xi):
        return -96.0 * (2.0 + xi) ** -5


@dataclass(frozen=True)
class PiecewiseConstant(Distribution):
    beta: float = 0.0
    name = "piecewise_constant"

    def __post_init__(self):
        if not 0.0 <= self.beta < 1.0:
            raise ValueError("piecewise-constant beta must lie in [0, 1)")

    def support(self):
        return self.beta, 2.0 - self.beta

    def params(self):
        return {"beta": self.beta}

    def _pdf(self, xi):
        return 0.5 / (1.0 - self.beta)

    def _dpdf(self, xi):
        return 0.0


@dataclass(frozen=True)
class PiecewiseLinear(Distribution):
    beta: float = 3.0
    name = "piecewise_linear"

    def __post_init__(self):
        if not 1.5 <= self.beta <= 3.0:
            raise ValueError("piecewise-linear beta must lie in [3/2, 3]")

    def support(self):
        return 0.0, self.beta

    def params(self):
        return {"beta": self.beta}

    def _pdf(self, xi):
        b = self.beta
        return 2.0 * b ** -3 * (3.0 * (2.0 - b) * xi + (2.0 * b - 3.0) * b)

    def _dpdf(self, xi):
        b = self.beta
        return 6.0 * b ** -3 * (2.0 - b)


@dataclass(frozen=True)
class PiecewiseExponential(Distribution):
    """Exponential truncated to ``[0, xi2]``; ``alpha`` is solved for unit mean."""

    xi2: float = 3.0
    alpha: float = field(init=False)
    name = "piecewise_exponential"

    def __post_init__(self):
        object.__setattr__(self, "alpha", solve_alpha(self.xi2))

    def support(self):
        return 0.0, self.xi2

    def params(self):
        return {"xi2": self.xi2, "alpha": self.alpha}

    @property
    def prefactor(self) -> float:
        a = self.alpha
        if a == 0.0:
            return 1.0 / self.xi2
        return a / -math.expm1(-a * self.xi2)

    def _pdf(self, xi):
        return self.prefactor * math.exp(-self.alpha * xi)

    def _dpdf(self, xi):
        return -self.alpha * self._pdf(xi)


@dataclass(frozen=True)
class Sinusoidal(Distribution):
    """Half-period cosine profile; ``|alpha| > 1`` gives negative values near one end."""

    alpha: float = 1.0
    name = "sinusoidal"

    def __post_init__(self):
        if not self.alpha < math.pi ** 2 / 4:
            raise ValueError("sinusoidal alpha must be below pi^2/4")

    @property
    def _c(self):
        return 1.0 - 4.0 * self.alpha / math.pi ** 2

    def support(self):
        return 0.0, 2.0 / self._c

    def params(self):
        return {"alpha": self.alpha}

    def _pdf(self, xi):
        c = self._c
        return 0.5 * c * (1.0 + self.alpha * math.cos(0.5 * math.pi * c * xi))

    def _dpdf(self, xi):
        c = self._c
        return -0.25 * math.pi * c * c * self.alpha * math.sin(0.5 * math.pi * c * xi)


@dataclass(frozen=True)
class BoseLike(Distribution):
    """``[(1 - e^-b)^-1 e^(b xi) - 1]^-1`` with ``b = |beta_bose|``."""

    rate: float = field(init=False)
    name = "bose"

    def __post_init__(self):
        object.__setattr__(self, "rate", abs(solve_bose_fermi()[0]))

    def params(self):
        return {"beta": -self.rate}

    def _pdf(self, xi):
        z = -math.expm1(-self.rate)
        e = z * math.exp(-self.rate * xi)
        return e / (1.0 - e)

    def _dpdf(self, xi):
        g = self._pdf(xi)
        return -self.rate * g * (1.0 + g)


@dataclass(frozen=True)
class FermiLike(Distribution):
    """``[(e^b - 1)^-1 e^(b xi) + 1]^-1`` with ``b = beta_fermi``."""

    rate: float = field(init=False)
    name = "fermi"

    def __post_init__(self):
        object.__setattr__(self, "rate", solve_bose_fermi()[1])

    def params(self):
        return {"beta": self.rate}

    def _pdf(self, xi):
        w = math.expm1(self.rate)
        e = w * math.exp(-self.rate * xi)
        return e / (1.0 + e)

    def _dpdf(self, xi):
        g = self._pdf(xi)
        return -self.rate * g * (1.0 - g)


class GenericDensity(Distribution):
    """``gamma(xi) = (sigma / rho^2) lam(sigma xi / rho)`` built from any weight ``lam``."""

    name = "generic"

    def __init__(self, lam, rho: float, sigma: float, lam_support=(0.0, INF), dlam=None):
        self.lam, self.rho, self.sigma, self.dlam = lam, rho, sigma, dlam
        lo, hi = lam_support
        self._support = (rho * lo / sigma, rho * hi / sigma)

    def support(self):
        return self._support

    def params(self):
        return {"rho": self.rho, "sigma": self.sigma}

    def _pdf(self, xi):
        return self.sigma / self.rho ** 2 * self.lam(self.sigma * xi / self.rho)

    def _dpdf(self, xi):
        if self.dlam is None:
            raise NotImplementedError("derivative of the generic weight was not supplied")
        return self.sigma ** 2 / self.rho ** 3 * self.dlam(self.sigma * xi / self.rho)


def normalize_generic(lam, rho: float | None = None, sigma: float | None = None,
                      support=(0.0, INF), dlam=None) -> GenericDensity:
    """Rescale a non-negative integrable weight into a unit-mass, unit-mean density.

    ``lam`` may be a callable or a table ``(u_values, lam_values)`` (linear
    interpolation, zero outside the table). Missing ``rho``/``sigma`` are
    computed by quadrature.
    """
    if not callable(lam):
        u, val = (np.asarray(a, dtype=float) for a in lam)
        support = (float(u[0]), float(u[-1]))
        table_u, table_v = u, val
        lam = lambda s: float(np.interp(s, table_u, table_v, left=0.0, right=0.0))  # noqa: E731
    lo, hi = support
    if rho is None:
        rho = integrate(lam, lo, hi)
    if sigma is None:
        sigma = integrate(lambda s: s * lam(s), lo, hi)
    for name, val in (("rho", rho), ("sigma", sigma)):
        if not (math.isfinite(val) and val > 0.0):
            raise ValueError(f"{name} must be finite and positive")
    return GenericDensity(lam, float(rho), float(sigma), support, dlam)


def moments(dist: Distribution, tol: float = 1e-10) -> tuple[float, float]:
    """``(int gamma, int xi gamma)`` over the support by adaptive quadrature."""
    lo, hi = dist.support()
    f = dist._pdf
    return integrate(f, lo, hi, tol), integrate(lambda x: x * f(x), lo, hi, tol)


CATALOG = {
    "canonical": Canonical,
    "power_law": PowerLaw,
    "piecewise_constant": PiecewiseConstant,
    "piecewise_linear": PiecewiseLinear,
    "piecewise_exponential": PiecewiseExponential,
    "sinusoidal": Sinusoidal,
    "bose": BoseLike,
    "fermi": FermiLike,
}


def make(name: str, **params) -> Distribution:
    try:
        cls = CATALOG[name]
    except KeyError:
        raise ValueError(f"unknown distribution {name!r}; known: {sorted(CATALOG)}") from None
    return cls(**params)


# ---------------------------------------------------------------- temperature


@dataclass(frozen=True)
class TemperatureReport:
    kind: str  # "pointwise" | "weak"
    value: float
    support: tuple


def theta(dist: Distribution, xi: float) -> TemperatureReport:
    """Pointwise temperature ``-gamma / gamma'``; ``+inf`` where ``gamma' = 0``."""
    lo, hi = dist.support()
    if not lo <= xi <= hi:
        raise ValueError("temperature is only defined on the support")
    g, dg = dist._pdf(xi), dist._dpdf(xi)
    value = INF if dg == 0.0 else -g / dg
    return TemperatureReport("pointwise", value, (lo, hi))


def _monotonicity(dist: Distribution, samples: int = 2001) -> int:
    lo, hi = dist.support()
    top = hi if math.isfinite(hi) else lo + 50.0
    xs = np.linspace(lo, top, samples)[1:-1]
    d = np.array([dist._dpdf(x) for x in xs])
    if np.all(d == 0.0):
        return 0
    if np.all(d < 0.0):
        return -1
    if np.all(d > 0.0):
        return 1
    raise ValueError(f"{dist.name} is not strictly monotone on its support")


def theta_w(dist: Distribution) -> TemperatureReport:
    """Weak temperature ``1 / (gamma(xi1) - gamma(xi2))`` of a monotone density.

    ``gamma(xi2)`` is the limit at the right end of the support (zero for an
    unbounded support). A constant density has infinite temperature.
    """
    lo, hi = dist.support()
    if _monotonicity(dist) == 0:
        return TemperatureReport("weak", INF, (lo, hi))
    g1, g2 = dist.edge_values()
    return TemperatureReport("weak", 1.0 / (g1 - g2), (lo, hi))


def theta_w_quadrature(dist: Distribution, tol: float = 1e-11) -> float:
    """Weak temperature as the average of ``theta`` over the range of ``gamma``:
    ``int theta (-gamma') dxi / (gamma(xi1) - gamma(xi2))``."""
    if _monotonicity(dist) == 0:
        return INF
    lo, hi = dist.support()
    g1, g2 = dist.edge_values()

    def integrand(x):
        g, dg = dist._pdf(x), dist._dpdf(x)
        # isolated zeros of gamma' (e.g. the crest of a cosine) carry the limit gamma
        return g if dg == 0.0 else (-g / dg) * (-dg)

    return integrate(integrand, lo, hi, tol) / (g1 - g2)


def printed_theta_w(dist: Distribution) -> float | None:
    """The tabulated closed forms of the weak temperature, where one exists."""
    if isinstance(dist, PowerLaw):
        return 1.5
    if isinstance(dist, PiecewiseLinear):
        b = dist.beta
        return INF if b == 2.0 else b * b / (6.0 * (b - 2.0))
    if isinstance(dist, Sinusoidal):
        a = dist.alpha
        return INF if a == 0.0 else math.pi ** 2 / ((math.pi ** 2 - 4.0 * a) * a)
    if isinstance(dist, (BoseLike, FermiLike)):
        b = dist.params()["beta"]
        return abs((2.0 - math.exp(b)) / math.expm1(b))
    return None


def table(dist: Distribution, xs) -> list:
    """Rows ``(xi, gamma, theta)``; theta is NaN outside the support."""
    lo, hi = dist.support()
    rows = []
    for x in xs:
        x = float(x)
        th = theta(dist, x).value if lo <= x <= hi else math.nan
        rows.append((x, dist.pdf(x), th))
    return rows


def summary(dist: Distribution) -> dict:
    m0, m1 = moments(dist)
    try:
        tw = theta_w(dist).value
    except ValueError:
        tw = None
    out = {"name": dist.name, "parameters": dist.params(), "support": list(dist.support()),
           "moments": [m0, m1], "theta_w": tw}
    printed = printed_theta_w(dist)
    if printed is not None:
        out["theta_w_printed"] = printed
    return out


# ---------------------------------------------------------------- tensor case


@dataclass(frozen=True)
class EnsembleReport:
    n: int
    target: np.ndarray  # H / 2
    second_moment: np.ndarray
    rel_error: float
    anisotropy: float
    samples: np.ndarray
    densities: np.ndarray


def canonical_tensor_density(v, H_inv) -> float:
    """Unnormalised ``exp(-H^-1 . v⊗v)``."""
    v = np.asarray(v, dtype=float)
    return float(np.exp(-v @ H_inv @ v))


def extended_canonical(H, n: int, seed: int) -> EnsembleReport:
    """Sample agitation velocities with density proportional to ``exp(-v . H^-1 v)``.

    That density is the zero-mean normal law with covariance ``H / 2``; the
    report compares the empirical Reynolds tensor with it. ``anisotropy`` is
    the ratio of the empirical moment along the largest and smallest
    principal directions of ``H``.
    """
    H = sa.ten(H)
    if not sa.is_symmetric(H):
        raise ValueError("H must be symmetric")
    w, vecs = np.linalg.eigh(sa.sym(H))
    if np.min(w) <= 0.0:
        raise ValueError("H must be positive definite")
    if int(n) < 1:
        raise ValueError("n must be at least 1")
    rng = np.random.default_rng(seed)
    L = vecs * np.sqrt(w / 2.0)
    v = rng.standard_normal((int(n), 3)) @ L.T
    second = v.T @ v / n
    target = sa.sym(H) / 2.0
    along = vecs.T @ second @ vecs
    H_inv = np.linalg.inv(sa.sym(H))
    dens = np.exp(-np.einsum("ia,ab,ib->i", v[:1000], H_inv, v[:1000]))
    return EnsembleReport(int(n), target, second, sa.rel_norm(second - target, target),
                          float(along[2, 2] / along[0, 0]), v, dens)
