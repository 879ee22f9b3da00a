"""Source tensors and residuals of the aggregate balance laws.

Every time derivative here is formed analytically from particle positions,
velocities and accelerations, so the residuals measure the algebra only:
they vanish to roundoff at any state, with no integration error involved.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import forces as fm
from . import smallalg as sa
from .pointsys import BackgroundFit, ParticleCloud, affine_fit, aggregates, relative


@dataclass(frozen=True)
class SourceSet:
    f: np.ndarray
    m: np.ndarray
    M: np.ndarray
    A: np.ndarray
    S: np.ndarray
    Z: np.ndarray


@dataclass
class ResidualReport:
    residuals: dict = field(default_factory=dict)

    def add(self, name: str, diff, *terms, ref: float = 0.0):
        """Record ``|diff|`` relative to the largest of the terms and ``ref``."""
        scale = max([sa.frob(t) for t in terms] + [ref])
        self.residuals[name] = sa.frob(diff) / (scale if scale > 0.0 else 1.0)

    def max(self) -> float:
        return max(self.residuals.values(), default=0.0)

    def failing(self, tol: float) -> list:
        return [k for k, v in self.residuals.items() if not v < tol]

    def ok(self, tol: float) -> bool:
        return not self.failing(tol)


def assemble_sources(cloud: ParticleCloud, fit: BackgroundFit, f_ext, f_int) -> SourceSet:
    _, _, y, _ = relative(cloud)
    w = fit.spatial_shuffle_rates
    f_ext = np.asarray(f_ext, dtype=float)
    f_int = np.asarray(f_int, dtype=float)
    return SourceSet(
        f=f_ext.sum(axis=0),
        m=np.cross(y, f_ext).sum(axis=0),
        M=y.T @ f_ext,
        A=-(y.T @ f_int),
        S=2.0 * sa.sym(w.T @ f_ext),
        Z=-2.0 * sa.sym(w.T @ f_int),
    )


def _pinv_rate(Y, Ydot, Yp):
    # derivative of the pseudo-inverse at constant rank
    P = np.eye(3) - Y @ Yp
    return -Yp @ Ydot @ Yp + Yp @ Yp @ Ydot @ P + P @ Ydot @ Yp @ Yp


@dataclass(frozen=True)
class Rates:
    """Instantaneous aggregate state of a cloud and its analytic time rates."""

    mu: float
    v: np.ndarray
    a: np.ndarray  # centre acceleration
    Y: np.ndarray
    Ydot: np.ndarray
    K: np.ndarray
    Kdot: np.ndarray
    k: np.ndarray
    kdot: np.ndarray
    B: np.ndarray
    Bdot: np.ndarray
    H: np.ndarray
    Hdot: np.ndarray
    W: np.ndarray
    Wdot: np.ndarray
    kappa: float
    kappa_dot: float


def rates(cloud: ParticleCloud, acc) -> Rates:
    m = cloud.masses
    mu = cloud.total_mass
    agg = aggregates(cloud)
    _, v, y, yd = relative(cloud)
    acc = np.asarray(acc, dtype=float)
    a_c = m @ acc / mu
    ydd = acc - a_c

    def mom(p, q):
        return np.einsum("i,ia,ib->ab", m, p, q) / mu

    Ydot = mom(yd, y) + mom(y, yd)
    Kdot = mom(yd, yd) + mom(y, ydd)
    kdot = m @ np.cross(y, ydd) / mu
    Yp = sa.spectral_pinv(agg.Y)
    B = agg.K.T @ Yp
    Bdot = Kdot.T @ Yp + agg.K.T @ _pinv_rate(agg.Y, Ydot, Yp)
    w = yd - y @ B.T
    wd = ydd - y @ Bdot.T - yd @ B.T
    H = mom(w, w)
    Hdot = mom(wd, w) + mom(w, wd)
    u = cloud.velocities
    Wdot = 0.5 * (mom(acc, u) + mom(u, acc))
    return Rates(
        mu=mu, v=v, a=a_c, Y=agg.Y, Ydot=Ydot, K=agg.K, Kdot=Kdot, k=agg.k, kdot=kdot,
        B=B, Bdot=Bdot, H=H, Hdot=Hdot, W=agg.W, Wdot=Wdot,
        kappa=agg.kappa, kappa_dot=float(np.trace(Wdot)),
    )


def verify_balances(cloud: ParticleCloud, models) -> ResidualReport:
    """Residuals of every balance and energy identity at the current state.

    Names in the report:
    ``momentum``, ``tensor_moment``, ``inertia``, ``reynolds`` (the four
    rows of the aggregate system), ``tensor_moment_sym`` (its symmetric
    split), ``angular_momentum``, ``inertia_rate`` (Ydot = 2 sym K),
    ``power_ext``/``power_int``, ``energy_scalar``, ``energy_tensor`` and
    ``energy_tensor_mid`` (both sides of the tensor theorem),
    ``energy_gross``, ``energy_E`` and ``skew_K`` (2 skw K = -ricci(k)).
    """
    f_ext, f_int, acc = fm.evaluate_forces(cloud, models)
    _, f_int_cons = fm.split_forces(models, cloud.masses, cloud.positions, cloud.velocities,
                                    conservative_only=True)
    r = rates(cloud, acc)
    fit = affine_fit(cloud)
    src = assemble_sources(cloud, fit, f_ext, f_int)
    _, _, y, yd = relative(cloud)
    mu, v, B, H, Y, K = r.mu, r.v, r.B, r.H, r.Y, r.K
    I = np.eye(3)
    rep = ResidualReport()
    # reference magnitudes from absolute per-particle contributions, so that
    # terms cancelling to roundoff are not compared with each other
    fabs = np.linalg.norm(f_ext, axis=1) + np.linalg.norm(f_int, axis=1)
    macc = cloud.masses * np.linalg.norm(acc, axis=1)
    ynorm = np.linalg.norm(y, axis=1)
    ydnorm = np.linalg.norm(yd, axis=1)
    xdnorm = np.linalg.norm(cloud.velocities, axis=1)
    F = float(np.sum(fabs + macc))
    FL = float(np.sum(ynorm * (fabs + 2 * macc) + cloud.masses * ydnorm ** 2))
    FV = float(np.sum((xdnorm + ydnorm) * (fabs + macc) + cloud.masses * ydnorm ** 2 * np.linalg.norm(B)))
    LV = float(np.sum(cloud.masses * ynorm * ydnorm) / mu)

    rep.add("momentum", mu * r.a - src.f, mu * r.a, src.f, ref=F)
    lhs = mu * (r.Kdot - B @ K)
    rhs = src.M - src.A + mu * H
    rep.add("tensor_moment", lhs - rhs, lhs, src.M, src.A, mu * H, ref=FL)
    rep.add("tensor_moment_sym", sa.sym(lhs) - (sa.sym(src.M) + mu * H - src.A),
            lhs, src.M, src.A, mu * H, ref=FL)
    rep.add("inertia", r.Ydot - (Y @ B.T + B @ Y), r.Ydot, Y @ B.T, ref=LV)
    lhs = mu * (r.Hdot + B @ H + H @ B.T)
    rep.add("reynolds", lhs - (src.S - src.Z), lhs, src.S, src.Z, ref=FV)
    rep.add("angular_momentum", mu * r.kdot - src.m, mu * r.kdot, src.m, ref=FL)
    rep.add("inertia_rate", r.Ydot - 2.0 * sa.sym(K), r.Ydot, K, ref=LV)
    rep.add("skew_K", 2.0 * sa.skw(K) + sa.ricci(r.k), K, ref=LV)

    p_ext = float(np.sum(yd * f_ext))
    p_int = float(np.sum(yd * f_int))
    t = sa.dot(src.M, B.T) + 0.5 * np.trace(src.S)
    rep.add("power_ext", np.array([t - p_ext]), np.array([p_ext]), src.M @ B, src.S, ref=FV)
    t = -(sa.dot(src.A, B.T) + 0.5 * np.trace(src.Z))
    rep.add("power_int", np.array([t - p_int]), np.array([p_int]), src.A @ B, src.Z, ref=FV)

    rhs = float(v @ src.f) + sa.dot(src.M - src.A, B.T) + 0.5 * np.trace(src.S - src.Z)
    rep.add("energy_scalar", np.array([mu * r.kappa_dot - rhs]), np.array([mu * r.kappa_dot]),
            np.array([rhs]), ref=FV)

    rhs = sa.sym(np.outer(v, src.f) + B @ (src.M - src.A)) + 0.5 * (src.S - src.Z)
    rep.add("energy_tensor", mu * r.Wdot - rhs, mu * r.Wdot, rhs, ref=FV)
    mid = sa.sym(mu * np.outer(r.a, v) + mu * (r.Bdot @ Y @ B.T + B @ B @ Y @ B.T)) + 0.5 * mu * r.Hdot
    rep.add("energy_tensor_mid", mu * r.Wdot - mid, mu * r.Wdot, mid, ref=FV)

    gross_dot = sa.sym(np.outer(r.a, v)) + sa.sym(r.Bdot @ Y @ B.T) + 0.5 * B @ r.Ydot @ B.T
    rhs = sa.sym(np.outer(v, src.f) + B @ (src.M - src.A + mu * H))
    rep.add("energy_gross", mu * gross_dot - rhs, mu * gross_dot, rhs, ref=FV)

    U_int = fm.potential_energy(models, cloud.masses, cloud.positions, internal=True)
    U_int_dot = -float(np.sum(f_int_cons * cloud.velocities))
    u, u_dot = U_int / mu, U_int_dot / mu
    E = 0.5 * H + u / 3.0 * I
    E_dot = 0.5 * r.Hdot + u_dot / 3.0 * I
    lhs = mu * (E_dot + B @ E + E @ B.T)
    Z_hat = src.Z - 2.0 / 3.0 * (U_int_dot * I + 2.0 * U_int * sa.sym(B))
    rep.add("energy_E", lhs - 0.5 * (src.S - Z_hat), lhs, src.S, Z_hat, ref=FV)
    return rep


def _central_diff(fun, x0, h):
    x0 = np.asarray(x0, dtype=float)
    grad = np.zeros_like(x0)
    for idx in np.ndindex(x0.shape):
        xp = x0.copy()
        xm = x0.copy()
        xp[idx] += h
        xm[idx] -= h
        grad[idx] = (fun(xp) - fun(xm)) / (2.0 * h)
    return grad


def potential_consistency(cloud: ParticleCloud, models, G=None, rel_step: float = 1e-6) -> ResidualReport:
    """Compare source tensors with potential derivatives by central differences.

    The placement is written ``x_i = x + G s_i`` with ``s_i = G^-1 y_i``;
    potentials are differentiated with respect to ``x``, ``G``, ``C = G^T G``
    and the ``s_i``. Residuals are relative to the compared tensors.
    """
    if not fm.is_conservative(models):
        raise ValueError("potential consistency needs conservative force models")
    G = np.eye(3) if G is None else sa.ten(G)
    if np.linalg.det(G) <= 0.0:
        raise ValueError("gross shape G must have positive determinant")
    m = cloud.masses
    xc, _, y, _ = relative(cloud)
    s = np.linalg.solve(G, y.T).T
    ext = [mo for mo in models if mo.external]
    internal = [mo for mo in models if not mo.external]
    f_ext, f_int, _ = fm.evaluate_forces(cloud, models)
    fit = affine_fit(cloud, G)
    src = assemble_sources(cloud, fit, f_ext, f_int)
    sd = fit.shuffle_rates
    Ginv_T = np.linalg.inv(G).T

    def U(mods, x, g, ss):
        return fm.potential_energy(mods, m, x + ss @ g.T)

    def step(a):
        return rel_step * max(1.0, float(np.max(np.abs(a))))

    rep = ResidualReport()
    dUe_dx = _central_diff(lambda x: U(ext, x, G, s), xc, step(xc))
    rep.add("f", src.f + dUe_dx, src.f, dUe_dx)
    dUe_dG = _central_diff(lambda g: U(ext, xc, g, s), G, step(G))
    M_pot = -(dUe_dG @ G.T).T
    rep.add("M", src.M - M_pot, src.M, M_pot)

    dUi_dG = _central_diff(lambda g: U(internal, xc, g, s), G, step(G))
    A_G = dUi_dG @ G.T
    rep.add("A_G", src.A - A_G, src.A, A_G)

    def U_of_C(C):
        # internal potentials only see pair separations, hence only C
        return sum(_pair_potential_C(mo, s, C) for mo in internal)

    C = G.T @ G
    dUi_dC = _central_diff(U_of_C, C, step(C))
    A_C = 2.0 * G @ dUi_dC @ G.T
    rep.add("A_C", src.A - A_C, src.A, A_C)

    hs = step(s)
    dUe_ds = _central_diff(lambda ss: U(ext, xc, G, ss), s, hs)
    dUi_ds = _central_diff(lambda ss: U(internal, xc, G, ss), s, hs)
    w = sd @ G.T
    S_pot = -2.0 * sa.sym(w.T @ (dUe_ds @ Ginv_T.T))
    Z_pot = 2.0 * sa.sym(w.T @ (dUi_ds @ Ginv_T.T))
    rep.add("S", src.S - S_pot, src.S, S_pot)
    rep.add("Z", src.Z - Z_pot, src.Z, Z_pot)
    return rep


def _pair_potential_C(model, s, C) -> float:
    if not isinstance(model, fm.PairSpring):
        raise TypeError(f"no C-representation for {type(model).__name__}")
    if not model.pairs:
        return 0.0
    idx = np.array(model.pairs, dtype=int)
    d = s[idx[:, 0]] - s[idx[:, 1]]
    ell = np.sqrt(np.einsum("pa,ab,pb->p", d, C, d))
    return 0.5 * model.stiffness * float(np.sum((ell - model.rest_length) ** 2))
