"""Aggregates of a mass-point system and best-fit rigid/affine backgrounds.

The affine fit picks the spin tensor ``B`` minimising the kinetic-energy
discrepancy ``sum m |ydot - B y|^2``; what is left over (the shuffle rates)
is observer independent and its second moment is the Reynolds tensor ``H``.
All tensors are per unit mass unless a name says otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import smallalg as sa


@dataclass(frozen=True)
class ParticleCloud:
    masses: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.masses, dtype=float).reshape(-1)
        x = np.asarray(self.positions, dtype=float)
        u = np.asarray(self.velocities, dtype=float)
        if m.size < 1:
            raise ValueError("cloud needs at least one particle")
        if x.shape != (m.size, 3) or u.shape != (m.size, 3):
            raise ValueError("positions and velocities must have shape (N, 3)")
        if not np.all(m > 0.0) or not np.all(np.isfinite(m)):
            raise ValueError("masses must be positive and finite")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(u))):
            raise ValueError("positions and velocities must be finite")
        for name, arr in (("masses", m), ("positions", x), ("velocities", u)):
            arr = arr.copy()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def n(self) -> int:
        return self.masses.size

    @property
    def total_mass(self) -> float:
        return float(self.masses.sum())

    def with_state(self, positions, velocities) -> "ParticleCloud":
        return ParticleCloud(self.masses, positions, velocities)


@dataclass(frozen=True)
class AggregateState:
    mu: float
    x: np.ndarray
    v: np.ndarray
    Y: np.ndarray
    J: np.ndarray
    k: np.ndarray
    K: np.ndarray
    kappa: float
    W: np.ndarray


@dataclass(frozen=True)
class EnergySplit:
    """Per-unit-mass kinetic energy split; ``total`` equals kappa."""

    translational: float
    entrainment: float
    agitation: float
    cross: float

    @property
    def total(self) -> float:
        return self.translational + self.entrainment + self.agitation + self.cross


@dataclass(frozen=True)
class BackgroundFit:
    kind: str  # "rigid" | "affine"
    G: np.ndarray
    q: np.ndarray | None
    B: np.ndarray | None
    shuffle_rates: np.ndarray  # (N, 3), reference shuffle rates sdot
    H_star: np.ndarray
    H: np.ndarray
    energy: EnergySplit
    mixed: np.ndarray = field(default_factory=lambda: np.zeros((3, 3)))

    @property
    def axis(self) -> np.ndarray:
        """Unit axis of the rigid entrainment (zero vector if q vanishes)."""
        if self.q is None:
            raise AttributeError("affine fits have no rotation axis")
        n = np.linalg.norm(self.q)
        return self.q / n if n > 0.0 else np.zeros(3)

    @property
    def spatial_shuffle_rates(self) -> np.ndarray:
        """``G sdot`` for each particle."""
        return self.shuffle_rates @ self.G.T


def relative(cloud: ParticleCloud):
    """Centre, centre velocity and the relative positions/velocities."""
    m = cloud.masses
    mu = cloud.total_mass
    x = m @ cloud.positions / mu
    v = m @ cloud.velocities / mu
    return x, v, cloud.positions - x, cloud.velocities - v


def aggregates(cloud: ParticleCloud) -> AggregateState:
    m = cloud.masses
    mu = cloud.total_mass
    x, v, y, yd = relative(cloud)
    Y = np.einsum("i,ia,ib->ab", m, y, y) / mu
    K = np.einsum("i,ia,ib->ab", m, y, yd) / mu
    k = m @ np.cross(y, yd) / mu
    W = 0.5 * np.einsum("i,ia,ib->ab", m, cloud.velocities, cloud.velocities) / mu
    J = np.trace(Y) * np.eye(3) - Y
    return AggregateState(mu=mu, x=x, v=v, Y=Y, J=J, k=k, K=K, kappa=float(np.trace(W)), W=W)


def rigid_fit(cloud: ParticleCloud) -> BackgroundFit:
    """Rotation speed ``q`` solving ``J q = k`` (minimum-norm when J is singular)."""
    agg = aggregates(cloud)
    m, mu = cloud.masses, agg.mu
    _, v, y, yd = relative(cloud)
    try:
        q = sa.solve_minimum_norm(agg.J, agg.k)
    except sa.InconsistentSystemError as exc:  # k is always in range(J)
        raise AssertionError("moment of momentum outside range of inertia") from exc
    ent = np.cross(q, y)
    sd = yd - ent
    Hs = np.einsum("i,ia,ib->ab", m, sd, sd) / mu
    energy = EnergySplit(
        translational=0.5 * float(v @ v),
        entrainment=0.5 * float(q @ agg.J @ q),
        agitation=0.5 * float(np.trace(Hs)),
        cross=float(np.sum(m * np.einsum("ia,ia->i", sd, ent)) / mu),
    )
    mixed = np.einsum("i,ia,ib->ab", m, sd, ent) / mu
    return BackgroundFit("rigid", np.eye(3), q, None, sd, Hs, Hs.copy(), energy, mixed)


def affine_fit(cloud: ParticleCloud, G=None) -> BackgroundFit:
    """Spin tensor ``B`` with ``B Y = K^T``, shuffle rates and Reynolds tensors.

    ``G`` is the gross shape (identity by default); it changes the reference
    shuffle rates ``sdot = G^-1 (ydot - B y)`` and ``H* ``, not ``H``.
    """
    G = np.eye(3) if G is None else sa.ten(G)
    if np.linalg.det(G) <= 0.0:
        raise ValueError("gross shape G must have positive determinant")
    agg = aggregates(cloud)
    m, mu = cloud.masses, agg.mu
    _, v, y, yd = relative(cloud)
    B = agg.K.T @ sa.spectral_pinv(agg.Y)
    w = yd - y @ B.T
    sd = np.linalg.solve(G, w.T).T
    Hs = np.einsum("i,ia,ib->ab", m, sd, sd) / mu
    H = G @ Hs @ G.T
    By = y @ B.T
    mixed = np.einsum("i,ia,ib->ab", m, sd, By) / mu
    energy = EnergySplit(
        translational=0.5 * float(v @ v),
        entrainment=0.5 * float(np.trace(B @ agg.Y @ B.T)),
        agitation=0.5 * float(np.trace(H)),
        cross=float(np.sum(m * np.einsum("ia,ia->i", w, By)) / mu),
    )
    return BackgroundFit("affine", G, None, B, sd, Hs, H, energy, mixed)


def discrepancy(cloud: ParticleCloud, B) -> float:
    """Mass-averaged squared misfit ``sum m |ydot - B y|^2 / mu``."""
    B = sa.ten(B)
    _, _, y, yd = relative(cloud)
    r = yd - y @ B.T
    return float(np.sum(cloud.masses * np.einsum("ia,ia->i", r, r)) / cloud.total_mass)


def energy_tensor_from_fit(agg: AggregateState, fit: BackgroundFit) -> np.ndarray:
    """Kinetic energy tensor rebuilt as ``v⊗v/2 + B Y B^T/2 + H/2``."""
    if fit.B is None:
        raise ValueError("energy tensor assembly needs an affine fit")
    return 0.5 * np.outer(agg.v, agg.v) + 0.5 * fit.B @ agg.Y @ fit.B.T + 0.5 * fit.H


def random_cloud(rng: np.random.Generator, n: int, spread: float = 1.0, speed: float = 1.0) -> ParticleCloud:
    """Cloud with lognormal masses and Gaussian positions/velocities."""
    return ParticleCloud(
        rng.lognormal(0.0, 0.5, size=n),
        rng.normal(0.0, spread, size=(n, 3)),
        rng.normal(0.0, speed, size=(n, 3)),
    )
