"""Time-ordered propagation with the exponential midpoint rule.

Each step applies ``exp(-i H((k + 1/2) dt) dt)``: second order in ``dt`` and
exactly unitary, so norms drift only by rounding.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import linalg


@dataclass
class Trajectory:
    """States on a uniform grid ``times[k] = k * step``.

    ``controls[k]`` is the control Hamiltonian evaluated at ``times[k]``.
    """

    times: np.ndarray
    states: np.ndarray
    controls: np.ndarray
    step: float

    def __len__(self):
        return len(self.times)


def uniform_grid(t_end, dt):
    """Number of steps and effective step for a grid ending exactly at ``t_end``.

    The requested ``dt`` is shrunk (never grown) so that it divides ``t_end``.
    """
    if not (math.isfinite(t_end) and math.isfinite(dt)):
        raise ValueError(f"non-finite grid: t_end={t_end}, dt={dt}")
    if dt <= 0 or t_end < 0:
        raise ValueError(f"need dt > 0 and t_end >= 0, got dt={dt}, t_end={t_end}")
    if t_end == 0:
        return 0, dt
    n = max(1, math.ceil(t_end / dt - 1e-9))
    return n, t_end / n


def midpoint_step(h_mid, psi, dt):
    return linalg.expm_unitary(h_mid, dt) @ psi


def propagate_ordered(h_of_t, psi0, t_end, dt, drift=None):
    """Integrate ``i d/dt psi = (drift + h_of_t(t)) psi`` from 0 to ``t_end``.

    Args:
        h_of_t: callable returning the control Hamiltonian at time ``t``
            (the full Hamiltonian when ``drift`` is None).
        psi0: initial state.
        t_end: final time; the grid is stretched slightly so it ends there.
        dt: requested step.
        drift: optional constant Hamiltonian added to every ``h_of_t(t)``.

    Returns:
        Trajectory with ``len = steps + 1``.
    """
    psi = linalg.as_state(psi0, tol=1e-9)
    n, step = uniform_grid(t_end, dt)
    drift = None if drift is None else np.asarray(drift, dtype=complex)

    def total(t):
        h = np.asarray(h_of_t(t), dtype=complex)
        return h if drift is None else drift + h

    times = np.arange(n + 1) * step
    states = np.empty((n + 1, psi.shape[0]), dtype=complex)
    controls = np.empty((n + 1, psi.shape[0], psi.shape[0]), dtype=complex)
    states[0] = psi
    for k in range(n):
        controls[k] = h_of_t(times[k])
        psi = midpoint_step(total((k + 0.5) * step), psi, step)
        states[k + 1] = psi
    controls[n] = h_of_t(times[n])
    return Trajectory(times=times, states=states, controls=controls, step=step)


def closed_form_unitary(h0, h1_initial, t):
    """``u(t) = exp(-i h0 t) exp(-i H1(0) t)``."""
    return linalg.expm_unitary(h0, t) @ linalg.expm_unitary(h1_initial, t)


def derivative_residual(sol, h0, t, delta):
    """Max-abs mismatch between a central difference of ``u(t)`` and ``-i H(t) u(t)``.

    ``H(t) = h0 + exp(-i h0 t) H1(0) exp(i h0 t)``; the residual is
    ``O(delta**2)`` when the closed form solves the time-ordered equation.
    """
    h1 = sol.h1_initial
    fd = (closed_form_unitary(h0, h1, t + delta) - closed_form_unitary(h0, h1, t - delta)) / (
        2.0 * delta
    )
    w = linalg.expm_unitary(h0, t)
    h_t = np.asarray(h0) + w @ h1 @ w.conj().T
    rhs = -1j * h_t @ closed_form_unitary(h0, h1, t)
    return float(np.max(np.abs(fd - rhs)))
