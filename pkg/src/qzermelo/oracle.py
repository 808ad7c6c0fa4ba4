"""Sampled evidence that no admissible control beats the solver's journey time.

Competitors are full-throttle horizontal controls (``2 tr(H1^2) = 1``) from two
families: the optimal adjoint-orbit form with a random aim, and piecewise
constant schedules re-aimed horizontally at the start of each of four
segments. A certificate is statistical evidence, not a proof.
"""

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import _kernels, horizontality, linalg, propagator, solver

DEFAULT_FID_THRESHOLD = 1.0 - 1e-6
THROTTLE_SLACK = 1e-9
SEGMENTS = 4


class InadmissibleScheduleError(ValueError):
    pass


def _rng(seed):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def _horizontal_from_z(frame, z):
    dim = frame.shape[0]
    block = np.zeros((dim, dim), dtype=complex)
    block[1:, 0] = 1j * z
    block[0, 1:] = -1j * np.conj(z)
    h = frame @ block @ frame.conj().T
    return 0.5 * (h + h.conj().T)


def random_horizontal_control(psi, seed=None):
    """Uniformly aimed horizontal control at ``psi`` with ``2 tr(H^2) = 1``.

    The off-diagonal column ``z`` is drawn uniformly on the sphere of radius
    1/2 in ``C^n``, which fixes ``2 tr(H^2) = 4|z|^2 = 1``.
    """
    psi = linalg.as_state(psi, tol=1e-9)
    if psi.shape[0] < 2:
        raise ValueError("a one-dimensional state space has no horizontal directions")
    rng = _rng(seed)
    z = rng.normal(size=psi.shape[0] - 1) + 1j * rng.normal(size=psi.shape[0] - 1)
    z *= 0.5 / np.linalg.norm(z)
    return _horizontal_from_z(horizontality.frame_with_first_column(psi), z)


class AdjointOrbitSchedule:
    """``H1(t) = exp(-i h0 t) K exp(i h0 t)``."""

    def __init__(self, h0, k):
        self.h0 = np.asarray(h0, dtype=complex)
        self.k = np.asarray(k, dtype=complex)
        self._w, self._v = linalg.hermitian_eigendecomposition(self.h0)

    def __call__(self, t):
        u = (self._v * np.exp(-1j * self._w * t)) @ self._v.conj().T
        h = u @ self.k @ u.conj().T
        return 0.5 * (h + h.conj().T)


class PiecewiseConstantSchedule:
    """``controls[j]`` on ``[breaks[j], breaks[j+1])``; the last one persists."""

    def __init__(self, breaks, controls):
        self.breaks = np.asarray(breaks, dtype=float)
        self.controls = [np.asarray(c, dtype=complex) for c in controls]

    def __call__(self, t):
        j = int(np.searchsorted(self.breaks, t, side="right")) - 1
        return self.controls[min(max(j, 0), len(self.controls) - 1)]


def _check_throttle(h, t):
    load = 2.0 * linalg.hs_inner(h, h)
    if load > 1.0 + THROTTLE_SLACK:
        raise InadmissibleScheduleError(
            f"control exceeds the throttle at t={t:.6g}: 2 tr(H1^2) = {load:.12g}"
        )


def first_arrival_time(schedule, p, fid_threshold=DEFAULT_FID_THRESHOLD, dt=1e-3, horizon=None):
    """Earliest grid time at which ``|<psi(t)|psi_f>| >= fid_threshold``, or None.

    Propagates ``p.h0 + schedule(t)`` with the midpoint rule up to ``horizon``
    (``p.t_max`` by default), checking the throttle bound at every grid point
    and midpoint.
    """
    horizon = p.t_max if horizon is None else horizon
    n, step = propagator.uniform_grid(horizon, dt)
    psi = p.psi_i
    if linalg.projective_fidelity(psi, p.psi_f) >= fid_threshold:
        return 0.0
    for k in range(n):
        _check_throttle(schedule(k * step), k * step)
        h_mid = schedule((k + 0.5) * step)
        _check_throttle(h_mid, (k + 0.5) * step)
        psi = propagator.midpoint_step(p.h0 + h_mid, psi, step)
        if linalg.projective_fidelity(psi, p.psi_f) >= fid_threshold:
            return (k + 1) * step
    return None


def _step_matrices(p, controls, step):
    """``V^dagger exp(-i step (h0 + K)) V`` for a batch of controls ``K``."""
    w, v, _, _ = p.spectrum
    total = p.h0[None, :, :] + controls
    total = 0.5 * (total + np.conj(np.swapaxes(total, 1, 2)))
    mu, q = np.linalg.eigh(total)
    u = (q * np.exp(-1j * mu * step)[:, None, :]) @ np.conj(np.swapaxes(q, 1, 2))
    return np.conj(v.T)[None] @ u @ v[None]


def _batch_horizontal(states, rng):
    count, dim = states.shape
    z = rng.normal(size=(count, dim - 1)) + 1j * rng.normal(size=(count, dim - 1))
    z *= 0.5 / np.linalg.norm(z, axis=1, keepdims=True)
    out = np.empty((count, dim, dim), dtype=complex)
    for s in range(count):
        frame = horizontality.frame_with_first_column(states[s] / np.linalg.norm(states[s]))
        out[s] = _horizontal_from_z(frame, z[s])
    return out


def adjoint_orbit_arrivals(p, controls, step, n_steps, fid_threshold):
    """Arrival times (nan when none) of the schedules ``exp(-i h0 t) K exp(i h0 t)``.

    Uses the identity ``exp(-i dt (h0 + W K W^dagger)) = W exp(-i dt (h0 + K)) W^dagger``
    for ``W = exp(-i h0 t_mid)``, so each midpoint step costs a phase, a
    fixed matrix-vector product and another phase in the drift eigenbasis.
    """
    w, v, a, b = p.spectrum
    mats = _step_matrices(p, controls, step)
    phases = np.exp(-1j * np.outer((np.arange(n_steps) + 0.5) * step, w))
    phi0 = np.repeat(a[None, :], len(controls), axis=0)
    _, hits = _kernels.evolve_first_hit(phi0, mats, phases, b, fid_threshold)
    return np.where(hits >= 0, hits * step, np.nan)


def piecewise_arrivals(p, count, step, n_steps, fid_threshold, rng):
    """Arrival times (nan when none) of random four-segment piecewise-constant schedules."""
    w, v, a, b = p.spectrum
    phi = np.repeat(a[None, :], count, axis=0)
    arrival = np.full(count, np.nan)
    start = 0
    for seg in np.array_split(np.arange(n_steps), SEGMENTS):
        if seg.size == 0:
            continue
        controls = _batch_horizontal(phi @ v.T, rng)
        mats = _step_matrices(p, controls, step)
        ones = np.ones((seg.size, w.size), dtype=complex)
        phi, hits = _kernels.evolve_first_hit(phi, mats, ones, b, fid_threshold)
        fresh = np.isnan(arrival) & (hits >= 0)
        arrival[fresh] = (start + hits[fresh]) * step
        # arrived samples keep moving harmlessly; only first arrivals count
        start += seg.size
    return arrival


@dataclass
class CertificateReport:
    seed: int | None
    n_samples: int
    dt: float
    step: float
    horizon: float
    fid_threshold: float
    t_star: float
    solver_arrival: float | None
    min_adjoint_orbit: float | None
    min_piecewise: float | None
    min_observed: float | None
    arrived_adjoint_orbit: int
    arrived_piecewise: int
    margin: float
    passed: bool
    ball_entry_time: float | None = None
    ball_slack: float | None = None
    margin_meaningful: bool = True
    note: str = ""

    def to_dict(self):
        return asdict(self)


def _nanmin(x):
    x = x[~np.isnan(x)]
    return float(x.min()) if x.size else None


def arrival_radius(fid_threshold):
    """Fubini-Study radius of the set ``{phi : |<phi|psi_f>| >= fid_threshold}``."""
    return 2.0 * math.acos(min(1.0, max(0.0, fid_threshold)))


def arrival_bound(p, fid_threshold=DEFAULT_FID_THRESHOLD):
    """Earliest time any admissible schedule can register an arrival at ``fid_threshold``."""
    return solver.ball_entry_time(p, arrival_radius(fid_threshold))


def optimality_certificate(
    p, n_samples=2000, dt=1e-3, fid_threshold=DEFAULT_FID_THRESHOLD, seed=0, horizon=None, sol=None
):
    """Check that no sampled admissible schedule arrives before ``t_star - 5 dt``.

    The solver's own schedule is propagated with the same integrator and must
    arrive within the horizon (default ``t_star + max(20 dt, t_star / 10)``).

    Arrival means entering a small ball around ``psi_f``, and a schedule can
    do that before ``t_star``. The report carries the exact lower bound
    (:func:`arrival_bound`) and the slack of the earliest competitor against
    it; ``margin_meaningful`` is False when the bound already lies below
    ``t_star - 5 dt``.
    """
    sol = solver.solve(p) if sol is None else sol
    T = sol.t_star
    margin = 5.0 * dt
    if sol.trivial:
        return CertificateReport(
            seed, n_samples, dt, dt, 0.0, fid_threshold, T, 0.0, None, None, None,
            0, 0, margin, True, 0.0, None, True, note="trivial instance: endpoints share a ray",
        )
    horizon = T + max(20.0 * dt, 0.1 * T) if horizon is None else horizon
    n_steps, step = propagator.uniform_grid(horizon, dt)
    rng = np.random.default_rng(seed)

    aims = _batch_horizontal(np.repeat(p.psi_i[None, :], n_samples, axis=0), rng)
    controls = np.concatenate([sol.h1_initial[None], aims])
    adj = adjoint_orbit_arrivals(p, controls, step, n_steps, fid_threshold)
    solver_arrival = None if math.isnan(adj[0]) else float(adj[0])
    pw = piecewise_arrivals(p, n_samples, step, n_steps, fid_threshold, rng)

    min_adj, min_pw = _nanmin(adj[1:]), _nanmin(pw)
    observed = [m for m in (min_adj, min_pw) if m is not None]
    min_obs = min(observed) if observed else None
    passed = solver_arrival is not None and (min_obs is None or min_obs >= T - margin)
    t_ball = arrival_bound(p, fid_threshold)
    meaningful = T - t_ball < margin
    note = "statistical evidence from sampled schedules, not a proof"
    if not meaningful:
        note += (f"; admissible schedules can enter the arrival ball from t = {t_ball:.6g}, "
                 f"earlier than t_star - margin, so a FAIL here does not contradict optimality")
    return CertificateReport(
        seed=seed if not isinstance(seed, np.random.Generator) else None,
        n_samples=n_samples,
        dt=dt,
        step=step,
        horizon=horizon,
        fid_threshold=fid_threshold,
        t_star=T,
        solver_arrival=solver_arrival,
        min_adjoint_orbit=min_adj,
        min_piecewise=min_pw,
        min_observed=min_obs,
        arrived_adjoint_orbit=int(np.sum(~np.isnan(adj[1:]))),
        arrived_piecewise=int(np.sum(~np.isnan(pw))),
        margin=margin,
        passed=bool(passed),
        ball_entry_time=t_ball,
        ball_slack=None if min_obs is None else min_obs - t_ball,
        margin_meaningful=bool(meaningful),
        note=note,
    )
