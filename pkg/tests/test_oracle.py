import math

import numpy as np
import pytest

from qzermelo import horizontality, linalg, oracle, propagator, solver
from qzermelo.instances import (
    SIGMA_X, SIGMA_Y, random_problem, random_state, tailwind_problem, zero_wind_problem,
)
from qzermelo.solver import NavigationProblem

UP = np.array([1.0, 0.0], dtype=complex)


def test_random_control_qubit_at_north_pole():
    k = oracle.random_horizontal_control(UP, seed=7)
    # only sigma_x and sigma_y components, on a circle of radius 1/2
    cx, cy = 0.5 * linalg.hs_inner(k, SIGMA_X), 0.5 * linalg.hs_inner(k, SIGMA_Y)
    np.testing.assert_allclose(k, cx * SIGMA_X + cy * SIGMA_Y, atol=1e-15)
    assert math.hypot(cx, cy) == pytest.approx(0.5, abs=1e-14)


@pytest.mark.parametrize("dim", [2, 3, 5])
def test_random_control_is_admissible(dim, rng):
    psi = random_state(rng, dim)
    for seed in range(10):
        k = oracle.random_horizontal_control(psi, seed=seed)
        assert 2.0 * linalg.hs_inner(k, k) == pytest.approx(1.0, abs=1e-12)
        assert horizontality.is_horizontal(k, psi, 1e-10)
        assert horizontality.aa_speed_sq(k, psi) == pytest.approx(1.0, abs=1e-12)


def test_random_control_seeds():
    a = oracle.random_horizontal_control(UP, seed=1)
    np.testing.assert_array_equal(a, oracle.random_horizontal_control(UP, seed=1))
    assert np.max(np.abs(a - oracle.random_horizontal_control(UP, seed=2))) > 1e-3


def test_zero_control_cannot_cross_orbits():
    # sigma_z drift only rotates the phase of (1,0); (1,1)/sqrt2 is off its orbit
    p = NavigationProblem(0.5 * np.diag([1.0, -1.0]), UP, np.array([1.0, 1.0]) / math.sqrt(2))
    assert oracle.first_arrival_time(lambda t: np.zeros((2, 2)), p, dt=1e-2) is None


@pytest.mark.parametrize("make", [zero_wind_problem, lambda: tailwind_problem(0.5)])
def test_solver_schedule_arrives_within_two_steps(make):
    p = make()
    sol = solver.solve(p)
    dt = 1e-3
    sched = oracle.AdjointOrbitSchedule(p.h0, sol.h1_initial)
    t = oracle.first_arrival_time(sched, p, fid_threshold=1 - 1e-9, dt=dt, horizon=sol.t_star + 0.1)
    assert t is not None and abs(t - sol.t_star) <= 2 * dt
    # the looser default threshold can trigger a little early, never beyond the certificate margin
    t = oracle.first_arrival_time(sched, p, dt=dt, horizon=sol.t_star + 0.1)
    assert sol.t_star - 5 * dt <= t <= sol.t_star + 2 * dt


def test_mis_aimed_control_is_late():
    p = tailwind_problem(0.5)
    sol = solver.solve(p)
    backwards = -sol.h1_initial
    t = oracle.first_arrival_time(lambda s: backwards, p, dt=1e-3, horizon=2 * sol.t_star)
    assert t is None or t > sol.t_star


def test_throttle_violation_rejected():
    p = zero_wind_problem()
    with pytest.raises(oracle.InadmissibleScheduleError):
        oracle.first_arrival_time(lambda t: SIGMA_X, p, dt=1e-2)


def test_piecewise_schedule_lookup():
    sched = oracle.PiecewiseConstantSchedule([0.0, 1.0, 2.0], [SIGMA_X, SIGMA_Y, -SIGMA_X])
    np.testing.assert_array_equal(sched(0.5), SIGMA_X)
    np.testing.assert_array_equal(sched(1.0), SIGMA_Y)
    np.testing.assert_array_equal(sched(9.0), -SIGMA_X)


@pytest.mark.parametrize("seed", range(3))
def test_batched_arrivals_match_generic_propagation(seed):
    rng = np.random.default_rng(seed)
    p = random_problem(rng, 2 + seed)
    sol = solver.solve(p)
    horizon = 1.5 * sol.t_star
    n_steps, step = propagator.uniform_grid(horizon, 2e-3)
    controls = np.array([sol.h1_initial] + [oracle.random_horizontal_control(p.psi_i, seed=s) for s in range(5)])
    batch = oracle.adjoint_orbit_arrivals(p, controls, step, n_steps, 0.999)
    for k, got in zip(controls, batch):
        ref = oracle.first_arrival_time(oracle.AdjointOrbitSchedule(p.h0, k), p, 0.999, 2e-3, horizon)
        if ref is None:
            assert np.isnan(got)
        else:
            assert abs(got - ref) <= step * (1 + 1e-9)


def test_certificate_trivial_instance(rng):
    psi = random_state(rng, 3)
    p = NavigationProblem(np.eye(3), psi, psi)
    report = oracle.optimality_certificate(p, n_samples=10)
    assert report.passed and report.t_star == 0.0


def test_certificate_zero_wind():
    dt = 1e-3
    report = oracle.optimality_certificate(zero_wind_problem(), n_samples=500, dt=dt, seed=3)
    assert report.passed
    assert report.min_observed is None or report.min_observed >= math.pi - 5 * dt


def test_certificate_is_reproducible():
    p = tailwind_problem(0.5)
    a = oracle.optimality_certificate(p, n_samples=200, seed=11).to_dict()
    b = oracle.optimality_certificate(p, n_samples=200, seed=11).to_dict()
    assert a == b and a["seed"] == 11


def test_arrival_bound_zero_wind():
    # without wind the ball is entered after travelling pi minus its radius
    p = zero_wind_problem()
    radius = oracle.arrival_radius(oracle.DEFAULT_FID_THRESHOLD)
    assert oracle.arrival_bound(p) == pytest.approx(math.pi - radius, abs=1e-10)
    assert solver.ball_entry_time(p, 0.0) == pytest.approx(math.pi, abs=1e-12)


@pytest.mark.slow
def test_slow_approach_instance_respects_bound_but_not_margin():
    # second random draw behind the regression set: the optimal path closes on
    # the target slowly, so the arrival ball is reachable 6.2e-3 before t_star
    rng = np.random.default_rng(20240611)
    random_problem(rng, 2)
    p = random_problem(rng, 2)
    report = oracle.optimality_certificate(p, n_samples=2000, dt=1e-3, seed=9)
    assert not report.margin_meaningful
    assert report.t_star - report.ball_entry_time > 5 * report.dt
    assert report.solver_arrival is not None
    assert report.ball_slack >= -1e-6
