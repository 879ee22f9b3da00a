"""Time integration: direct N-body runs, closure-mode aggregate runs and
reconstruction of the background rotation/shape from sampled rates."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import forces as fm
from . import smallalg as sa
from .balances import verify_balances
from .integrate import DivergenceError, check_step_args, rk4_step
from .pointsys import ParticleCloud, affine_fit, aggregates


class ContractViolation(ValueError):
    """A user-supplied closure broke its declared contract."""


class DegeneracyError(RuntimeError):
    pass


@dataclass
class TrajectoryRecord:
    times: np.ndarray
    columns: dict = field(default_factory=dict)  # name -> (steps+1, ...) array
    positions: np.ndarray | None = None
    velocities: np.ndarray | None = None

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0]) if self.times.size > 1 else 0.0

    def flat_header(self) -> list:
        header = ["time"]
        for name, arr in self.columns.items():
            shape = arr.shape[1:]
            if not shape:
                header.append(name)
            else:
                header.extend(f"{name}_{'_'.join(map(str, i))}" for i in np.ndindex(shape))
        return header

    def flat_rows(self):
        for n, t in enumerate(self.times):
            row = [float(t)]
            for arr in self.columns.values():
                row.extend(float(x) for x in np.ravel(arr[n]))
            yield row

    def to_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(self.flat_header())
            for row in self.flat_rows():
                w.writerow([repr(x) for x in row])


# ---------------------------------------------------------------- N-body


def _nbody_rhs(masses, models):
    n = masses.size

    def rhs(t, state):
        x = state[: 3 * n].reshape(n, 3)
        u = state[3 * n:].reshape(n, 3)
        f_ext, f_int = fm.split_forces(models, masses, x, u)
        return np.concatenate([u.ravel(), ((f_ext + f_int) / masses[:, None]).ravel()])

    return rhs


def _snapshot_columns(cloud: ParticleCloud, models, with_balances: bool) -> dict:
    agg = aggregates(cloud)
    fit = affine_fit(cloud)
    U = fm.potential_energy(models, cloud.masses, cloud.positions)
    row = {
        "x": agg.x, "v": agg.v, "Y": agg.Y, "K": agg.K, "B": fit.B, "H": fit.H,
        "kappa": agg.kappa, "potential": U, "energy": agg.mu * agg.kappa + U,
    }
    if with_balances:
        rep = verify_balances(cloud, models)
        row["residual_max"] = rep.max()
        row["residual_inertia_rate"] = rep.residuals["inertia_rate"]
    return row


def simulate_nbody(cloud: ParticleCloud, models, dt: float, steps: int, seed: int | None = None,
                   with_balances: bool = False) -> TrajectoryRecord:
    """Integrate Newton's equations for every particle with fixed-step RK4.

    ``seed`` is accepted for scenario bookkeeping; the run itself draws no
    random numbers. Snapshots of positions and velocities are stored at
    every step together with aggregate columns (and balance residuals if
    ``with_balances``).
    """
    check_step_args(dt, steps)
    models = list(models)
    m = cloud.masses
    n = cloud.n
    rhs = _nbody_rhs(m, models)
    state = np.concatenate([cloud.positions.ravel(), cloud.velocities.ravel()])
    pos = np.empty((steps + 1, n, 3))
    vel = np.empty((steps + 1, n, 3))
    rows = []
    c = cloud
    for step in range(steps + 1):
        if step > 0:
            state = rk4_step(rhs, (step - 1) * dt, state, dt)
            if not np.all(np.isfinite(state)):
                raise DivergenceError(step)
            c = cloud.with_state(state[: 3 * n].reshape(n, 3), state[3 * n:].reshape(n, 3))
        pos[step] = c.positions
        vel[step] = c.velocities
        rows.append(_snapshot_columns(c, models, with_balances))
    cols = {k: np.array([r[k] for r in rows]) for k in rows[0]}
    return TrajectoryRecord(np.arange(steps + 1) * dt, cols, pos, vel)


def energy_drift(record: TrajectoryRecord) -> float:
    e = record.columns["energy"]
    scale = max(abs(e[0]), np.max(np.abs(e)), 1e-300)
    return float(np.max(np.abs(e - e[0])) / scale)


# ---------------------------------------------------------------- closures

Closure = Callable[[np.ndarray, np.ndarray, np.ndarray, np.ndarray], np.ndarray]


def _zero_vec(v, B, Y, H):
    return np.zeros(3)


def _zero_ten(v, B, Y, H):
    return np.zeros((3, 3))


@dataclass
class ClosureSpec:
    """Constitutive maps ``(v, B, Y, H) -> source`` for the aggregate system.

    ``M_hat`` may carry a skew part (the resultant moment); ``A_hat``,
    ``S_hat`` and ``Z_hat`` must return symmetric tensors.
    """

    mu: float = 1.0
    f_hat: Closure = _zero_vec
    M_hat: Closure = _zero_ten
    A_hat: Closure = _zero_ten
    S_hat: Closure = _zero_ten
    Z_hat: Closure = _zero_ten
    pseudo_rigid: bool = False

    @classmethod
    def isotropic(cls, mu: float = 1.0, pseudo_rigid: bool = False) -> "ClosureSpec":
        """Internal tensor moment balancing the agitation: ``A = mu H``."""
        return cls(mu=mu, A_hat=lambda v, B, Y, H: mu * H, pseudo_rigid=pseudo_rigid)


@dataclass(frozen=True)
class ClosureState:
    x: np.ndarray
    v: np.ndarray
    G: np.ndarray
    B: np.ndarray
    Y: np.ndarray
    H: np.ndarray

    def pack(self) -> np.ndarray:
        return np.concatenate([self.x, self.v, self.G.ravel(), self.B.ravel(), self.Y.ravel(), self.H.ravel()])

    @classmethod
    def unpack(cls, z) -> "ClosureState":
        return cls(z[0:3], z[3:6], z[6:15].reshape(3, 3), z[15:24].reshape(3, 3),
                   z[24:33].reshape(3, 3), z[33:42].reshape(3, 3))


def _checked_sym(name, t):
    t = np.asarray(t, dtype=float).reshape(3, 3)
    if not sa.is_symmetric(t, 1e-10):
        raise ContractViolation(f"closure {name} returned a non-symmetric tensor")
    return t


def closure_rhs(spec: ClosureSpec):
    mu = float(spec.mu)

    def rhs(t, z):
        s = ClosureState.unpack(z)
        H = np.zeros((3, 3)) if spec.pseudo_rigid else s.H
        f = np.asarray(spec.f_hat(s.v, s.B, s.Y, H), dtype=float).reshape(3)
        M = np.asarray(spec.M_hat(s.v, s.B, s.Y, H), dtype=float).reshape(3, 3)
        A = _checked_sym("A_hat", spec.A_hat(s.v, s.B, s.Y, H))
        K = s.Y @ s.B.T
        Kdot = s.B @ K + (M - A) / mu + H
        Ydot = s.Y @ s.B.T + s.B @ s.Y
        # K = Y B^T  =>  Y Bdot^T = Kdot - Ydot B^T
        Bdot = (sa.spectral_pinv(s.Y) @ (Kdot - Ydot @ s.B.T)).T
        if spec.pseudo_rigid:
            Hdot = np.zeros((3, 3))
        else:
            S = _checked_sym("S_hat", spec.S_hat(s.v, s.B, s.Y, H))
            Z = _checked_sym("Z_hat", spec.Z_hat(s.v, s.B, s.Y, H))
            Hdot = (S - Z) / mu - s.B @ H - H @ s.B.T
        return np.concatenate([s.v, f / mu, (s.B @ s.G).ravel(), Bdot.ravel(), Ydot.ravel(), Hdot.ravel()])

    return rhs


def closure_integrate(spec: ClosureSpec, init: ClosureState, dt: float, steps: int) -> TrajectoryRecord:
    """Integrate the aggregate system for ``(x, v, G, B, Y, H)`` with RK4.

    The tensor moment of momentum is slaved to ``K = Y B^T``. In pseudo-rigid
    mode ``H`` is held at zero and its equation is not integrated.
    """
    check_step_args(dt, steps)
    for name in ("Y", "H"):
        t = getattr(init, name)
        if not sa.is_symmetric(t, 1e-10) or np.min(np.linalg.eigvalsh(sa.sym(t))) < -1e-12:
            raise ValueError(f"initial {name} must be symmetric positive semi-definite")
    if np.linalg.det(init.G) <= 0.0:
        raise ValueError("initial G must have positive determinant")
    if spec.pseudo_rigid:
        init = ClosureState(init.x, init.v, init.G, init.B, init.Y, np.zeros((3, 3)))
    rhs = closure_rhs(spec)
    z = init.pack()
    out = [z]
    for step in range(1, steps + 1):
        z = rk4_step(rhs, (step - 1) * dt, z, dt)
        if not np.all(np.isfinite(z)):
            raise DivergenceError(step)
        out.append(z)
    Z = np.array(out)
    states = [ClosureState.unpack(r) for r in Z]
    H = np.array([s.H for s in states])
    cols = {
        "x": Z[:, 0:3], "v": Z[:, 3:6], "G": np.array([s.G for s in states]),
        "B": np.array([s.B for s in states]), "Y": np.array([s.Y for s in states]), "H": H,
        "H_asym": np.array([np.max(np.abs(h - h.T)) for h in H]),
        "H_min_eig": np.array([np.min(np.linalg.eigvalsh(sa.sym(h))) for h in H]),
        "det_G": np.array([np.linalg.det(s.G) for s in states]),
    }
    return TrajectoryRecord(np.arange(steps + 1) * dt, cols)


def isotropic_solution(t, b0: float, y0: float, h0: float):
    """Closed-form ``(b, y, h)`` for the isotropic closure ``A = mu H``."""
    s = 1.0 + b0 * np.asarray(t, dtype=float)
    return b0 / s, y0 * s ** 2, h0 / s ** 2


# ---------------------------------------------------------------- backgrounds


def _polar(R):
    u, _, vt = np.linalg.svd(R)
    Q = u @ vt
    if np.linalg.det(Q) < 0:
        u[:, -1] *= -1
        Q = u @ vt
    return Q


def background_evolve(series, dt: float, kind: str = "rigid", start=None) -> np.ndarray:
    """Integrate ``Rdot = ricci(q) R`` or ``Gdot = B G`` along a sampled series.

    Values between grid points are linearly interpolated (RK4 midpoints use
    the average of neighbouring samples). Rotations are projected back onto
    SO(3) after every step; for shapes the determinant is monitored.
    """
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    series = np.asarray(series, dtype=float)
    if kind == "rigid":
        rates = np.array([sa.ricci(q) for q in series.reshape(-1, 3)])
    elif kind == "affine":
        rates = series.reshape(-1, 3, 3)
    else:
        raise ValueError(f"unknown background kind {kind!r}")
    X = np.eye(3) if start is None else sa.ten(start)
    if kind == "affine" and np.linalg.det(X) <= 0.0:
        raise DegeneracyError("initial G must have positive determinant")
    out = [X]
    for n in range(len(rates) - 1):
        L0, L1 = rates[n], rates[n + 1]
        Lm = 0.5 * (L0 + L1)
        k1 = L0 @ X
        k2 = Lm @ (X + dt / 2 * k1)
        k3 = Lm @ (X + dt / 2 * k2)
        k4 = L1 @ (X + dt * k3)
        X = X + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(X)):
            raise DivergenceError(n + 1)
        if kind == "rigid":
            X = _polar(X)
        elif np.linalg.det(X) <= 0.0:
            raise DegeneracyError(f"det G reached a non-positive value at step {n + 1}")
        out.append(X)
    return np.array(out)
