import math

import numpy as np
import pytest
from scipy.linalg import expm

from qzermelo import geometry, horizontality, linalg, solver
from qzermelo.instances import (
    SIGMA_Y, SIGMA_Z, random_hermitian, random_problem, random_state,
    tailwind_problem, zero_wind_problem,
)
from qzermelo.solver import NavigationProblem

R2 = 1.0 / math.sqrt(2.0)
ROOT_TOL = 1e-12


def brute_force_root(p, n=40_001):
    """First sign change of theta(t) - t on a dense grid, with scipy's expm and arccos."""
    ts = np.linspace(0.0, 4.0, n)[1:]
    f = []
    for t in ts:
        ov = abs(np.vdot(p.psi_i, expm(1j * p.h0 * t) @ p.psi_f))
        f.append(2.0 * math.acos(min(1.0, ov)) - t)
    f = np.array(f)
    k = int(np.argmax(f <= 0))
    return ts[k - 1], ts[k]


def test_zero_wind_orthogonal_is_pi():
    assert solver.journey_time(zero_wind_problem()) == pytest.approx(math.pi, abs=ROOT_TOL)


@pytest.mark.parametrize("eps", [0.0, 0.25, 0.5, 0.75, 1.0])
def test_tailwind_family_closed_form(eps):
    # overlap |sin(eps T / 2)| and arccos(sin x) = pi/2 - x give T = pi/(1 + eps)
    assert solver.journey_time(tailwind_problem(eps)) == pytest.approx(math.pi / (1.0 + eps), abs=1e-10)


@pytest.mark.parametrize("eps", [0.3, 1.0])
def test_tailwind_family_brute_force_scan(eps):
    lo, hi = brute_force_root(tailwind_problem(eps))
    assert lo - 1e-9 <= solver.journey_time(tailwind_problem(eps)) <= hi + 1e-9


def test_same_ray_is_trivial(rng):
    psi = random_state(rng, 3)
    p = NavigationProblem(random_hermitian(rng, 3), psi, np.exp(0.4j) * psi)
    sol = solver.solve(p)
    assert sol.t_star == 0.0 and sol.trivial
    np.testing.assert_array_equal(sol.h1_initial, np.zeros((3, 3)))
    assert not sol.diagnostics.failures()


def test_align_phase_examples():
    p = NavigationProblem(np.zeros((2, 2)), np.array([1.0, 0.0]), np.array([R2, R2]))
    np.testing.assert_allclose(solver.align_phase(p, 1.0), p.psi_f, atol=1e-15)
    p = NavigationProblem(np.zeros((2, 2)), np.array([1.0, 0.0]), np.array([1j * R2, R2]))
    np.testing.assert_allclose(solver.align_phase(p, 1.0), -1j * p.psi_f, atol=1e-15)
    p = zero_wind_problem()
    np.testing.assert_array_equal(solver.align_phase(p, math.pi), p.psi_f)


@pytest.mark.parametrize("seed", range(5))
def test_align_phase_makes_overlap_real_nonnegative(seed):
    rng = np.random.default_rng(seed)
    p = random_problem(rng, 3)
    T = solver.journey_time(p)
    ov = linalg.inner(p.psi_i, linalg.expm_unitary(p.h0, -T) @ solver.align_phase(p, T))
    assert abs(ov.imag) < 1e-12 and ov.real >= 0.0


def test_zero_wind_control_is_minus_half_sigma_y():
    p = zero_wind_problem()
    sol = solver.solve(p)
    np.testing.assert_allclose(sol.h1_initial, 0.5j * np.array([[0, 1], [-1, 0]]), atol=1e-12)
    np.testing.assert_allclose(sol.h1_initial, -0.5 * SIGMA_Y, atol=1e-12)
    assert 2.0 * linalg.hs_inner(sol.h1_initial, sol.h1_initial) == pytest.approx(1.0, abs=1e-12)
    end = linalg.expm_unitary(sol.h1_initial, math.pi) @ p.psi_i
    np.testing.assert_allclose(end, [0.0, -1.0], atol=1e-12)


def test_zero_wind_half_time_is_equal_superposition():
    p = zero_wind_problem()
    sol = solver.solve(p)
    mid = solver.propagate_closed_form(sol, p.h0, 0.5 * sol.t_star)
    assert linalg.projective_fidelity(mid, p.psi_i) == pytest.approx(R2, abs=1e-12)
    assert linalg.projective_fidelity(mid, p.psi_f) == pytest.approx(R2, abs=1e-12)


def test_tailwind_eps_one_arrives():
    p = tailwind_problem(1.0)
    sol = solver.solve(p)
    assert sol.t_star == pytest.approx(math.pi / 2, abs=1e-10)
    assert linalg.projective_fidelity(solver.propagate_closed_form(sol, p.h0, sol.t_star), p.psi_f) >= 1 - 1e-9


def test_control_at_examples(rng):
    p = random_problem(rng, 3)
    sol = solver.solve(p)
    np.testing.assert_array_equal(solver.control_at(sol, p.h0, 0.0), sol.h1_initial)
    zw = zero_wind_problem()
    zsol = solver.solve(zw)
    np.testing.assert_allclose(solver.control_at(zsol, zw.h0, 1.3), zsol.h1_initial, atol=1e-15)
    # a drift commuting with H1(0) leaves it fixed
    commuting = 0.7 * zsol.h1_initial + 0.2 * np.eye(2)
    np.testing.assert_allclose(solver.control_at(zsol, commuting, 0.9), zsol.h1_initial, atol=1e-12)


@pytest.mark.parametrize("seed", range(6))
def test_random_instances_satisfy_every_diagnostic(seed):
    rng = np.random.default_rng(100 + seed)
    p = random_problem(rng, [2, 3, 4, 8][seed % 4])
    sol = solver.solve(p)
    res = sol.diagnostics.residuals()
    assert all(v < 1e-8 for v in res.values()), res
    assert sol.theta == pytest.approx(sol.t_star, abs=10 * p.root_tol)
    assert horizontality.is_horizontal(sol.h1_initial, p.psi_i, 1e-8)


@pytest.mark.parametrize("seed", range(4))
def test_spectrum_of_control_is_constant(seed):
    rng = np.random.default_rng(200 + seed)
    p = random_problem(rng, 4)
    sol = solver.solve(p)
    ref = np.linalg.eigvalsh(sol.h1_initial)
    for t in (0.5 * sol.t_star, sol.t_star):
        assert np.max(np.abs(np.linalg.eigvalsh(solver.control_at(sol, p.h0, t)) - ref)) < 1e-9


@pytest.mark.parametrize("seed", range(4))
def test_unit_speed_in_moving_frame(seed):
    # co-rotating state exp(i h0 t) psi(t) = exp(-i H1(0) t) psi_i runs a unit-speed geodesic
    rng = np.random.default_rng(300 + seed)
    p = random_problem(rng, 3)
    sol = solver.solve(p)
    delta = 1e-4

    def co_rotating(t):
        return linalg.expm_unitary(p.h0, -t) @ solver.propagate_closed_form(sol, p.h0, t)

    for t in np.linspace(0.0, sol.t_star - delta, 5):
        a, b = co_rotating(t), co_rotating(t + delta)
        assert geometry.fubini_study_angle(a, b) == pytest.approx(delta, abs=1e-7)


@pytest.mark.parametrize("seed", range(6))
def test_smallest_root_minimality(seed):
    rng = np.random.default_rng(400 + seed)
    p = random_problem(rng, [2, 3, 4][seed % 3])
    T = solver.journey_time(p)
    step = p.step() / 7.0
    ts = np.arange(step, T - p.root_tol, step)
    assert np.all(p.angle_gap(ts) > 0.0)


def test_horizon_exceeded():
    p = NavigationProblem(np.zeros((2, 2)), np.array([1.0, 0.0]), np.array([0.0, 1.0]), t_max=1.0)
    with pytest.raises(solver.HorizonExceededError) as err:
        solver.journey_time(p)
    assert err.value.min_f > 0


def test_verify_flags_vertical_perturbation():
    p = zero_wind_problem()
    sol = solver.solve(p)
    sol.h1_initial = sol.h1_initial + 0.01 * SIGMA_Z
    diag = solver.verify_solution(p, sol)
    assert diag.horizontality_residual > 1e-3
    assert "horizontality" in diag.failures()


def test_zero_wind_full_throttle_exact(rng):
    p = NavigationProblem(np.zeros((4, 4)), random_state(rng, 4), random_state(rng, 4))
    sol = solver.solve(p)
    assert sol.diagnostics.full_throttle_residual < 1e-10
    assert sol.t_star == pytest.approx(geometry.fubini_study_angle(p.psi_i, p.psi_f), abs=ROOT_TOL)


def test_problem_validation():
    with pytest.raises(linalg.LinalgError):
        NavigationProblem(np.array([[0, 1], [0, 0]]), [1.0, 0.0], [0.0, 1.0])
    with pytest.raises(linalg.LinalgError):
        NavigationProblem(np.zeros((2, 2)), [1.0, 0.0], [0.0, 1.0, 0.0])


def test_scaled_problem():
    p = tailwind_problem(1.0).scaled(0.5)
    assert solver.journey_time(p) == pytest.approx(math.pi / 1.5, abs=1e-10)
