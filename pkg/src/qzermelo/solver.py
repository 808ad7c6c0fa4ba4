"""Time-optimal state transfer through a fixed drift ("wind") Hamiltonian.

The optimal control rides the adjoint orbit of its initial value,
``H1(t) = exp(-i H0 t) H1(0) exp(i H0 t)``, so in the frame co-rotating with
the drift the state follows a unit-speed geodesic towards the receding target
``exp(i H0 t) psi_f``. The journey time ``T`` is the first time at which the
Fubini-Study angle between ``psi_i`` and that receding target equals ``T``.
"""

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.optimize import minimize_scalar

from . import _kernels, geometry, horizontality, linalg

DEFAULT_T_MAX = 4.0 * math.pi
SINGULAR_SIN_TOL = 1e-9
# below this the aligned overlap has no meaningful phase
ZERO_OVERLAP_TOL = 1e-14

DEFAULT_THRESHOLDS = {
    "arrival": 1e-9,
    "norm": 1e-9,
    "horizontality": 1e-8,
    "full_throttle": 1e-6,
    "moving_frame": 1e-9,
    "root": 1e-10,
    "travel_time": 1e-6,
}


class NavigationError(RuntimeError):
    pass


class HorizonExceededError(NavigationError):
    def __init__(self, t_max, min_f):
        self.t_max = t_max
        self.min_f = min_f
        super().__init__(
            f"no root of theta(T) = T in (0, {t_max:.6g}]; smallest "
            f"theta(T) - T seen was {min_f:.3e} (raise t_max)"
        )


class SingularControlError(NavigationError):
    pass


@dataclass(eq=False)
class NavigationProblem:
    """Drift ``h0`` plus the endpoints of the transfer.

    ``scan_step=None`` picks ``min(0.01, pi / (64 (1 + |h0|)))`` with the
    spectral norm of ``h0``.
    """

    h0: np.ndarray
    psi_i: np.ndarray
    psi_f: np.ndarray
    t_max: float = DEFAULT_T_MAX
    root_tol: float = 1e-12
    scan_step: float | None = None

    def __post_init__(self):
        self.h0 = linalg.as_hermitian(self.h0)
        self.psi_i = linalg.as_state(self.psi_i)
        self.psi_f = linalg.as_state(self.psi_f)
        if not (self.h0.shape[0] == self.psi_i.shape[0] == self.psi_f.shape[0]):
            raise linalg.DimensionMismatchError(
                f"h0 is {self.h0.shape}, psi_i has {self.psi_i.shape[0]} "
                f"entries, psi_f has {self.psi_f.shape[0]}"
            )
        if not self.t_max > 0:
            raise ValueError("t_max must be positive")

    @property
    def dim(self):
        return self.h0.shape[0]

    @cached_property
    def spectrum(self):
        """Drift eigenvalues, eigenvectors, and both endpoints in that eigenbasis."""
        w, v = linalg.hermitian_eigendecomposition(self.h0)
        return w, v, v.conj().T @ self.psi_i, v.conj().T @ self.psi_f

    def step(self):
        if self.scan_step is not None:
            return float(self.scan_step)
        w = self.spectrum[0]
        spec_norm = float(np.max(np.abs(w)))
        return min(0.01, math.pi / (64.0 * (1.0 + spec_norm)))

    def scaled(self, eps):
        """The same transfer under the wind ``eps * h0``."""
        return NavigationProblem(
            eps * self.h0, self.psi_i, self.psi_f,
            t_max=self.t_max, root_tol=self.root_tol, scan_step=self.scan_step,
        )

    def moving_target(self, t):
        """``exp(i h0 t) psi_f``: the target as seen from the co-rotating frame."""
        w, v, _, b = self.spectrum
        return v @ (np.exp(1j * w * t) * b)

    def angle_gap(self, t):
        """``theta(t) - t``; vectorized over ``t``."""
        w, _, a, b = self.spectrum
        times = np.atleast_1d(np.asarray(t, dtype=float))
        out = _kernels.moving_frame_angles(a, b, w, times) - times
        return out if np.ndim(t) else float(out[0])


@dataclass(frozen=True)
class RootScan:
    t_star: float
    residual: float
    step: float
    sign_changes: int
    next_root: float | None
    trivial: bool


@dataclass
class Diagnostics:
    arrival_fidelity: float
    norm_residual: float
    horizontality_residual: float
    full_throttle_residual: float
    moving_frame_residual: float
    root_residual: float
    travel_time_residual: float
    grid_points: int
    trivial: bool = False
    sign_changes: int = 0
    next_root: float | None = None

    def residuals(self):
        return {
            "arrival": 1.0 - self.arrival_fidelity,
            "norm": self.norm_residual,
            "horizontality": self.horizontality_residual,
            "full_throttle": self.full_throttle_residual,
            "moving_frame": self.moving_frame_residual,
            "root": self.root_residual,
            "travel_time": self.travel_time_residual,
        }

    def failures(self, thresholds=None):
        limits = dict(DEFAULT_THRESHOLDS, **(thresholds or {}))
        return [k for k, v in self.residuals().items() if not v < limits[k]]

    def to_dict(self):
        d = dict(self.__dict__)
        d["residuals"] = self.residuals()
        return d


@dataclass
class NavigationSolution:
    t_star: float
    h1_initial: np.ndarray
    aligned_psi_f: np.ndarray
    theta: float
    psi_i: np.ndarray
    trivial: bool = False
    scan: RootScan | None = None
    diagnostics: Diagnostics | None = field(default=None, repr=False)


def _bisect(f, lo, hi, f_lo, tol):
    """Bisection on a bracket with ``f(lo) > 0 >= f(hi)``."""
    f_hi = f(hi)
    while True:
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        f_mid = f(mid)
        if abs(f_mid) < tol:
            return mid, f_mid
        if f_mid > 0:
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
    return (lo, f_lo) if abs(f_lo) < abs(f_hi) else (hi, f_hi)


def _dip_below_zero(f, left, right):
    """Refine a grid local minimum; return a time where ``f <= 0`` if one exists."""
    res = minimize_scalar(f, bounds=(left, right), method="bounded",
                          options={"xatol": 1e-13})
    return float(res.x) if res.fun <= 0.0 else None


def scan_journey_time(p, radius=0.0):
    """Smallest positive root of ``theta(T) = T + radius`` with bracketing diagnostics.

    ``radius = 0`` is the journey time proper; see :func:`ball_entry_time`
    for the other use.
    """
    step = p.step()
    theta0 = geometry.fubini_study_angle(p.psi_i, p.psi_f)
    if theta0 <= radius + p.root_tol:
        return RootScan(0.0, theta0 - radius, step, 0, None, True)

    def gap(t):
        return p.angle_gap(t) - radius

    n = int(math.ceil(p.t_max / step))
    grid = np.minimum(np.arange(n + 1) * step, p.t_max)
    vals = gap(grid)
    nonpos = np.flatnonzero(vals <= 0.0)
    changes = np.flatnonzero((vals[:-1] > 0.0) & (vals[1:] <= 0.0))

    # |d/dt (theta - t)| <= 1 + spectral width of h0
    w = p.spectrum[0]
    band = step * (2.0 + float(w[-1] - w[0]))
    first = nonpos[0] if nonpos.size else vals.size
    bracket = None
    for i in range(1, min(first, vals.size - 1)):
        if vals[i] <= vals[i - 1] and vals[i] <= vals[i + 1] and vals[i] < band:
            t_neg = _dip_below_zero(gap, grid[i - 1], grid[i + 1])
            if t_neg is not None:
                bracket = (grid[i - 1], t_neg)
                break
    if bracket is None:
        if not nonpos.size:
            raise HorizonExceededError(p.t_max, float(vals.min()))
        j = nonpos[0]
        if vals[j] == 0.0:
            t_star, resid = float(grid[j]), 0.0
        else:
            bracket = (grid[j - 1], grid[j])
    if bracket is not None:
        lo, hi = bracket
        t_star, resid = _bisect(gap, lo, hi, gap(lo), p.root_tol)

    later = changes[grid[changes + 1] > t_star + step]
    next_root = float(grid[later[0] + 1]) if later.size else None
    return RootScan(float(t_star), abs(float(resid)), step, int(changes.size),
                    next_root, False)


def journey_time(p):
    """Minimal transfer time ``T``: smallest positive root of ``theta(T) = T``."""
    return scan_journey_time(p).t_star


def ball_entry_time(p, radius):
    """Earliest time any admissible control can bring the state within ``radius`` of ``psi_f``.

    In the frame co-rotating with the drift every admissible control moves
    the state at Fubini-Study speed at most 1, while the drift carries the
    whole ball around ``psi_f`` rigidly. The ball is therefore first reachable
    at the smallest root of ``theta(t) = t + radius``; ``radius = 0`` gives
    ``T`` itself.
    """
    if radius < 0:
        raise ValueError(f"radius must be non-negative, got {radius}")
    return scan_journey_time(p, radius).t_star


def _overlap_at(p, t):
    return linalg.inner(p.psi_i, p.moving_target(t))


def align_phase(p, t_star):
    """``psi_f`` rephased so that ``<psi_i| exp(i h0 T) |psi_f>`` is real and >= 0."""
    c = _overlap_at(p, t_star)
    if abs(c) < ZERO_OVERLAP_TOL:
        return p.psi_f.copy()
    return p.psi_f * np.exp(-1j * np.angle(c))


def initial_control(p, t_star):
    """Horizontal, unit-norm control at ``t = 0`` that lands on ``psi_f`` at ``t_star``.

    ``H1(0) = i(|psi_i><m| - |m><psi_i|) / (2 sin(T/2))`` with ``m`` the
    co-rotated target ``exp(i h0 T) psi_f``. The representative of ``m`` must
    have a real overlap with ``psi_i``, and its sign decides where the geodesic
    ``exp(-i H1(0) t) psi_i`` ends up: it reaches the ray of ``m`` only when
    ``<psi_i|m> <= 0``, so the phase-aligned target is negated before use.
    """
    if t_star == 0.0:
        if geometry.fubini_study_angle(p.psi_i, p.psi_f) <= p.root_tol:
            return np.zeros((p.dim, p.dim), dtype=complex)
        raise SingularControlError("T = 0 but the endpoints are distinct rays")
    s = math.sin(0.5 * t_star)
    if abs(s) < SINGULAR_SIN_TOL:
        raise SingularControlError(
            f"sin(T/2) = {s:.3e} at T = {t_star:.12g}; inspect the root scan "
            "(antipodal wrap-around)"
        )
    c = _overlap_at(p, t_star)
    if abs(c) < ZERO_OVERLAP_TOL:
        target = p.psi_f
    else:
        target = -align_phase(p, t_star)
    m = _rotate_target(p, target, t_star)
    a = p.psi_i
    h1 = 1j * (np.outer(a, m.conj()) - np.outer(m, a.conj())) / (2.0 * s)
    return 0.5 * (h1 + h1.conj().T)


def _rotate_target(p, psi, t):
    w, v, _, _ = p.spectrum
    return v @ (np.exp(1j * w * t) * (v.conj().T @ psi))


def control_at(sol, h0, t):
    """``H1(t) = exp(-i h0 t) H1(0) exp(i h0 t)``."""
    if t == 0:
        return sol.h1_initial.copy()
    u = linalg.expm_unitary(h0, t)
    h1 = u @ sol.h1_initial @ u.conj().T
    return 0.5 * (h1 + h1.conj().T)


def propagate_closed_form(sol, h0, t):
    """``exp(-i h0 t) exp(-i H1(0) t) psi_i``."""
    if t == 0:
        return sol.psi_i.copy()
    inner_step = linalg.expm_unitary(sol.h1_initial, t) @ sol.psi_i
    return linalg.expm_unitary(h0, t) @ inner_step


def verify_solution(p, sol, n_grid=100):
    """Recompute every residual the solution is supposed to satisfy.

    Nothing here raises; a violated condition simply shows up as a large
    residual (``inf`` when a travel time cannot be evaluated).
    """
    T, h1 = sol.t_star, sol.h1_initial
    arrival = linalg.projective_fidelity(propagate_closed_form(sol, p.h0, T), p.psi_f)
    norm_res = 0.0 if sol.trivial else abs(2.0 * linalg.hs_inner(h1, h1) - 1.0)

    hor, throttle, travel = 0.0, 0.0, 0.0
    for t in np.linspace(0.0, T, n_grid):
        psi = propagate_closed_form(sol, p.h0, t)
        h1_t = control_at(sol, p.h0, t)
        hor = max(hor, horizontality.horizontality_residual(h1_t, psi))
        if sol.trivial:
            continue
        throttle = max(throttle, abs(horizontality.aa_speed_sq(h1_t, psi) - 1.0))
        try:
            f_val = geometry.randers_time(geometry.quantum_tangent_data(p.h0, h1_t, psi))
            travel = max(travel, abs(f_val - 1.0))
        except (geometry.UnreachableError, ValueError):
            travel = math.inf

    lhs = linalg.expm_unitary(h1, T) @ p.psi_i
    moving = 1.0 - linalg.projective_fidelity(lhs, p.moving_target(T))
    root_res = abs(geometry.fubini_study_angle(p.psi_i, p.moving_target(T)) - T)
    scan = sol.scan
    return Diagnostics(
        arrival_fidelity=arrival,
        norm_residual=norm_res,
        horizontality_residual=hor,
        full_throttle_residual=throttle,
        moving_frame_residual=max(moving, 0.0),
        root_residual=root_res,
        travel_time_residual=travel,
        grid_points=n_grid,
        trivial=sol.trivial,
        sign_changes=scan.sign_changes if scan else 0,
        next_root=scan.next_root if scan else None,
    )


def solve(p, n_grid=100):
    """Minimal time, initial control, aligned target, and diagnostics for ``p``."""
    scan = scan_journey_time(p)
    T = scan.t_star
    h1 = initial_control(p, T)
    sol = NavigationSolution(
        t_star=T,
        h1_initial=h1,
        aligned_psi_f=align_phase(p, T),
        theta=geometry.fubini_study_angle(p.psi_i, p.moving_target(T)),
        psi_i=p.psi_i.copy(),
        trivial=scan.trivial,
        scan=scan,
    )
    sol.diagnostics = verify_solution(p, sol, n_grid=n_grid)
    return sol
