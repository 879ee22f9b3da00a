import numpy as np
import pytest
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from granex import forces as fm
from granex.dynamics import (ClosureSpec, ClosureState, ContractViolation, DegeneracyError,
                             background_evolve, closure_integrate, energy_drift,
                             isotropic_solution, simulate_nbody)
from granex.integrate import DivergenceError, rk4_step
from granex.pointsys import ParticleCloud, random_cloud

ex, ey, ez = np.eye(3)
I = np.eye(3)


def spring_pair(damping=0.0):
    c = ParticleCloud([1, 1], [ex, -ex], [0.3 * ey, -0.3 * ey + 0.1 * ez])
    return c, [fm.PairSpring([(0, 1)], 1.0, 1.0, damping)]


def iso_init(b0=1.0, y0=0.5, h0=0.2):
    return ClosureState(np.zeros(3), np.zeros(3), I.copy(), b0 * I, y0 * I, h0 * I)


def test_rk4_order_scalar():
    errs = []
    for n in (20, 40, 80):
        y, dt = np.array([1.0]), 1.0 / n
        for k in range(n):
            y = rk4_step(lambda t, y: -2 * y + np.sin(t), k * dt, y, dt)
        exact = (np.exp(-2.0) * 1.2 + (2 * np.sin(1.0) - np.cos(1.0)) / 5)
        errs.append(abs(y[0] - exact))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all((orders > 3.7) & (orders < 4.3))


@pytest.mark.parametrize("dt, steps", [(0.0, 10), (-1e-3, 10), (1e-3, 0)])
def test_simulate_rejects_bad_steps(dt, steps):
    c, models = spring_pair()
    with pytest.raises(ValueError):
        simulate_nbody(c, models, dt, steps)


def test_free_flight(rng):
    c = random_cloud(rng, 5)
    rec = simulate_nbody(c, [], 0.01, 100, with_balances=True)
    np.testing.assert_allclose(rec.positions[-1], c.positions + 1.0 * c.velocities, atol=1e-12)
    np.testing.assert_allclose(rec.columns["v"], np.tile(rec.columns["v"][0], (101, 1)), atol=1e-14)
    assert np.max(rec.columns["residual_inertia_rate"]) < 1e-12
    # free flight: Kdot = mu^-1 sum m ydot (x) ydot = 2 W_rel is constant
    K = rec.columns["K"]
    dK = np.diff(K, axis=0) / 0.01
    np.testing.assert_allclose(dK, np.tile(dK[0], (100, 1, 1)), atol=1e-10)


def test_spring_energy_conservation():
    c, models = spring_pair()
    rec = simulate_nbody(c, models, 1e-3, 10_000)
    assert energy_drift(rec) < 1e-6


def test_damped_spring_dissipates():
    c, models = spring_pair(damping=0.3)
    e = simulate_nbody(c, models, 1e-3, 3000).columns["energy"]
    assert np.all(np.diff(e) <= 1e-14 * abs(e[0]))
    assert e[-1] < 0.99 * e[0]


def test_trajectory_balances_along_run(rng):
    c = random_cloud(rng, 6)
    models = [fm.PairSpring([(i, i + 1) for i in range(5)], 2.0, 0.5), fm.UniformField([0, 0, -9.81])]
    rec = simulate_nbody(c, models, 1e-3, 50, with_balances=True)
    assert np.max(rec.columns["residual_max"]) < 1e-10
    assert np.max(rec.columns["residual_inertia_rate"]) < 1e-12


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_divergence_is_reported():
    c = ParticleCloud([1, 1], [ex, -ex], [ey, -ey])
    with pytest.raises(DivergenceError):
        simulate_nbody(c, [fm.QuadraticTrap(1e300)], 1.0, 5)


def test_trajectory_csv(tmp_path, rng):
    rec = simulate_nbody(random_cloud(rng, 3), [], 0.1, 3)
    rec.to_csv(tmp_path / "t.csv")
    lines = (tmp_path / "t.csv").read_text().splitlines()
    assert lines[0].startswith("time,x_0,x_1,x_2,v_0")
    assert len(lines) == 5


# ---------------------------------------------------------------- closures


def test_zero_closure_is_stationary():
    # with H0 != 0 the agitation alone would drive Kdot = H
    init = ClosureState(np.zeros(3), [0.5, 0, 0], I.copy(), np.zeros((3, 3)), np.diag([1.0, 2, 3]),
                        np.zeros((3, 3)))
    rec = closure_integrate(ClosureSpec(), init, 0.01, 50)
    np.testing.assert_allclose(rec.columns["x"][-1], [0.25, 0, 0])
    for name in ("v", "B", "Y", "H", "G"):
        arr = rec.columns[name]
        np.testing.assert_allclose(arr, np.broadcast_to(arr[0], arr.shape), atol=1e-15)


def test_isotropic_closed_form():
    rec = closure_integrate(ClosureSpec.isotropic(), iso_init(), 0.01, 100)
    b, y, h = isotropic_solution(rec.times, 1.0, 0.5, 0.2)
    assert np.max(np.abs(rec.columns["B"] - b[:, None, None] * I)) < 1e-6
    assert np.max(np.abs(rec.columns["Y"] - y[:, None, None] * I)) < 1e-6
    assert np.max(np.abs(rec.columns["H"] - h[:, None, None] * I)) < 1e-6
    assert np.max(rec.columns["H_asym"]) == 0.0
    assert np.min(rec.columns["H_min_eig"]) > 0.0


def test_isotropic_matches_scalar_ode():
    # independent check: reduced scalar system b' = -b^2, y' = 2by, h' = -2bh
    sol = solve_ivp(lambda t, z: [-z[0] ** 2, 2 * z[0] * z[1], -2 * z[0] * z[2]], (0, 1), [1.0, 0.5, 0.2],
                    rtol=1e-12, atol=1e-14, dense_output=True)
    rec = closure_integrate(ClosureSpec.isotropic(), iso_init(), 0.01, 100)
    ref = sol.sol(rec.times)
    np.testing.assert_allclose(rec.columns["B"][:, 0, 0], ref[0], atol=1e-7)
    np.testing.assert_allclose(rec.columns["Y"][:, 0, 0], ref[1], atol=1e-7)
    np.testing.assert_allclose(rec.columns["H"][:, 0, 0], ref[2], atol=1e-7)


def test_isotropic_convergence_order():
    errs = []
    for n in (10, 20, 40, 80):
        rec = closure_integrate(ClosureSpec.isotropic(), iso_init(), 1.0 / n, n)
        b, y, h = isotropic_solution(1.0, 1.0, 0.5, 0.2)
        errs.append(max(abs(rec.columns["B"][-1, 0, 0] - b), abs(rec.columns["Y"][-1, 0, 0] - y),
                        abs(rec.columns["H"][-1, 0, 0] - h)))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all((orders >= 3.7) & (orders <= 4.3)), orders


def test_pseudo_rigid_mode():
    rec = closure_integrate(ClosureSpec.isotropic(pseudo_rigid=True), iso_init(), 0.01, 100)
    b, y, _ = isotropic_solution(rec.times, 1.0, 0.5, 0.2)
    assert np.max(np.abs(rec.columns["B"] - b[:, None, None] * I)) < 1e-6
    assert np.max(np.abs(rec.columns["Y"] - y[:, None, None] * I)) < 1e-6
    assert not np.any(rec.columns["H"])


def test_anisotropic_closure_keeps_H_symmetric_psd(rng):
    L = rng.standard_normal((3, 3))
    spec = ClosureSpec.isotropic()
    spec.S_hat = lambda v, B, Y, H: 0.1 * (L @ L.T)
    init = ClosureState(np.zeros(3), np.zeros(3), I.copy(), 0.3 * rng.standard_normal((3, 3)),
                        np.diag([1.0, 0.5, 2.0]), np.diag([0.0, 0.1, 0.3]))
    rec = closure_integrate(spec, init, 0.005, 200)
    H = rec.columns["H"]
    assert np.max(rec.columns["H_asym"]) <= 1e-12 * np.max(np.abs(H))
    assert np.min(rec.columns["H_min_eig"]) >= -1e-10
    assert np.all(rec.columns["det_G"] > 0)


def test_closure_contract_violation():
    spec = ClosureSpec(A_hat=lambda v, B, Y, H: np.outer(ex, ey))
    with pytest.raises(ContractViolation):
        closure_integrate(spec, iso_init(), 0.01, 1)


def test_closure_rejects_bad_initial_state():
    bad = ClosureState(np.zeros(3), np.zeros(3), -I, I, I, I)
    with pytest.raises(ValueError):
        closure_integrate(ClosureSpec(), bad, 0.01, 1)
    bad = ClosureState(np.zeros(3), np.zeros(3), I, I, -I, I)
    with pytest.raises(ValueError):
        closure_integrate(ClosureSpec(), bad, 0.01, 1)


# ---------------------------------------------------------------- backgrounds


def test_constant_spin_is_rotation():
    w, dt, n = 0.7, 1e-3, 1000
    R = background_evolve(np.tile([0, 0, w], (n + 1, 1)), dt)
    t = np.arange(n + 1) * dt
    c, s = np.cos(w * t), np.sin(w * t)
    exact = np.zeros((n + 1, 3, 3))
    exact[:, 0, 0], exact[:, 0, 1], exact[:, 1, 0], exact[:, 1, 1], exact[:, 2, 2] = c, -s, s, c, 1
    assert np.max(np.abs(R - exact)) < 1e-8


def test_zero_spin_is_identity():
    R = background_evolve(np.zeros((50, 3)), 0.1)
    np.testing.assert_array_equal(R, np.tile(I, (50, 1, 1)))


def test_isotropic_stretching(rng):
    lam, dt, n = 0.4, 1e-3, 1000
    G0 = I + 0.1 * rng.standard_normal((3, 3))
    G = background_evolve(np.tile(lam * I, (n + 1, 1, 1)), dt, kind="affine", start=G0)
    t = np.arange(n + 1) * dt
    assert np.max(np.abs(G - np.exp(lam * t)[:, None, None] * G0)) < 1e-8


def test_time_dependent_rate_against_expm():
    B0 = np.array([[0.1, 0.4, 0], [-0.4, 0.1, 0], [0, 0, -0.2]])
    G = background_evolve(np.tile(B0, (201, 1, 1)), 0.005, kind="affine")
    np.testing.assert_allclose(G[-1], expm(B0), atol=1e-10)


def test_background_degeneracy():
    with pytest.raises(DegeneracyError):
        background_evolve(np.tile(I, (5, 1, 1)), 0.1, kind="affine", start=-I)
    with pytest.raises(ValueError):
        background_evolve(np.zeros((5, 3)), 0.0)
