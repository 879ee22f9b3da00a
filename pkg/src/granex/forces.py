"""Force models: uniform field, quadratic trap, damped pair springs.

Potential energies follow the physics convention ``f = -dU/dx``; the total
``kappa * mu + U`` is conserved when no dampers are present.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import smallalg as sa


class DegenerateGeometryError(ValueError):
    pass


@dataclass(frozen=True)
class UniformField:
    g: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "g", sa.vec(self.g))

    external = True
    dissipative = False

    def forces(self, masses, x, u):
        return masses[:, None] * self.g[None, :]

    def potential(self, masses, x):
        return -float(np.sum(masses * (x @ self.g)))


@dataclass(frozen=True)
class QuadraticTrap:
    """Per-particle restoring force ``-k_t (x_i - c)``; a scalar stiffness means ``k I``."""

    stiffness: np.ndarray
    center: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        k = np.asarray(self.stiffness, dtype=float)
        k = k * np.eye(3) if k.ndim == 0 else sa.ten(k)
        if not sa.is_symmetric(k) or np.min(np.linalg.eigvalsh(sa.sym(k))) < -1e-12:
            raise ValueError("trap stiffness must be symmetric positive semi-definite")
        object.__setattr__(self, "stiffness", sa.sym(k))
        object.__setattr__(self, "center", sa.vec(self.center))

    external = True
    dissipative = False

    def forces(self, masses, x, u):
        return -(x - self.center) @ self.stiffness

    def potential(self, masses, x):
        d = x - self.center
        return 0.5 * float(np.einsum("ia,ab,ib->", d, self.stiffness, d))


@dataclass(frozen=True)
class PairSpring:
    """Linear springs with optional dashpots along the connecting line."""

    pairs: tuple
    stiffness: float
    rest_length: float = 0.0
    damping: float = 0.0

    def __post_init__(self):
        pairs = tuple((int(i), int(j)) for i, j in self.pairs)
        if any(i == j or i < 0 or j < 0 for i, j in pairs):
            raise ValueError("spring pairs must join two distinct particles")
        if self.stiffness < 0 or self.rest_length < 0 or self.damping < 0:
            raise ValueError("stiffness, rest length and damping must be non-negative")
        object.__setattr__(self, "pairs", pairs)

    external = False

    @property
    def dissipative(self) -> bool:
        return self.damping > 0.0

    def _geometry(self, x):
        idx = np.array(self.pairs, dtype=int).reshape(-1, 2)
        r = x[idx[:, 0]] - x[idx[:, 1]]
        ell = np.linalg.norm(r, axis=1)
        return idx, r, ell

    def check(self, n: int):
        if any(max(p) >= n for p in self.pairs):
            raise ValueError("spring pair references a particle that does not exist")

    def forces(self, masses, x, u, conservative_only=False):
        f = np.zeros_like(x)
        if not self.pairs:
            return f
        idx, r, ell = self._geometry(x)
        if np.any(ell == 0.0):
            if self.rest_length > 0.0 and self.stiffness > 0.0:
                raise DegenerateGeometryError("coincident spring endpoints with nonzero rest length")
        safe = np.where(ell > 0.0, ell, 1.0)
        e = r / safe[:, None]
        # written as -k (1 - L/l) r so that L = 0 stays regular at l = 0
        fp = -self.stiffness * (1.0 - self.rest_length / safe)[:, None] * r
        if self.damping > 0.0 and not conservative_only:
            rate = np.einsum("pa,pa->p", u[idx[:, 0]] - u[idx[:, 1]], e)
            fp = fp - self.damping * rate[:, None] * e
        np.add.at(f, idx[:, 0], fp)
        np.add.at(f, idx[:, 1], -fp)
        return f

    def potential(self, masses, x):
        if not self.pairs:
            return 0.0
        _, _, ell = self._geometry(x)
        return 0.5 * self.stiffness * float(np.sum((ell - self.rest_length) ** 2))


def split_forces(models, masses, x, u, conservative_only=False):
    """Per-particle external and internal forces (arrays of shape (N, 3))."""
    f_ext = np.zeros_like(x, dtype=float)
    f_int = np.zeros_like(x, dtype=float)
    for model in models:
        if isinstance(model, PairSpring):
            model.check(len(masses))
            f_int += model.forces(masses, x, u, conservative_only=conservative_only)
        else:
            f_ext += model.forces(masses, x, u)
    return f_ext, f_int


def evaluate_forces(cloud, models):
    """``(f_ext, f_int, accelerations)`` for every particle of ``cloud``."""
    f_ext, f_int = split_forces(models, cloud.masses, cloud.positions, cloud.velocities)
    acc = (f_ext + f_int) / cloud.masses[:, None]
    return f_ext, f_int, acc


def potential_energy(models, masses, x, internal=None) -> float:
    """Total potential; ``internal=True/False`` restricts to one kind."""
    total = 0.0
    for model in models:
        if internal is None or internal == (not model.external):
            total += model.potential(masses, x)
    return total


def is_conservative(models) -> bool:
    return not any(m.dissipative for m in models)
