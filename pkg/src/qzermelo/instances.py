"""Random and reference navigation problems."""

import math

import numpy as np

from . import problemfile, solver
from .solver import NavigationProblem

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def random_hermitian(rng, dim, spectral_norm=None, traceless=False):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    h = 0.5 * (a + a.conj().T)
    if traceless:
        h -= np.trace(h).real / dim * np.eye(dim)
    if spectral_norm is not None:
        h *= spectral_norm / np.max(np.abs(np.linalg.eigvalsh(h)))
        h = 0.5 * (h + h.conj().T)
    return h


def random_state(rng, dim):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_problem(rng, dim, max_wind=2.0):
    """Drift with spectral norm uniform in ``[0, max_wind]`` and Haar-random endpoints."""
    h0 = random_hermitian(rng, dim, spectral_norm=rng.uniform(0.0, max_wind))
    return NavigationProblem(h0, random_state(rng, dim), random_state(rng, dim))


def tailwind_problem(eps):
    """``h0 = (eps/2) sigma_z`` carrying ``(1,1)/sqrt2`` towards ``(1,-1)/sqrt2``; ``T = pi/(1+eps)``."""
    r = 1.0 / math.sqrt(2.0)
    return NavigationProblem(0.5 * eps * SIGMA_Z, np.array([r, r]), np.array([r, -r]))


def zero_wind_problem():
    return NavigationProblem(np.zeros((2, 2)), np.array([1.0, 0.0]), np.array([0.0, 1.0]))


def headwind_problem(eps=None):
    """Shipped qubit example whose wind blows almost straight against the short path."""
    return problemfile.load_bundled("headwind.json").to_problem(epsilon=eps)


def _margin_is_meaningful(p, dt, fid_threshold):
    radius = 2.0 * math.acos(fid_threshold)
    return solver.journey_time(p) - solver.ball_entry_time(p, radius) < 5.0 * dt


def regression_instances(seed=20240611, dt=1e-3, fid_threshold=1.0 - 1e-6):
    """Ten fixed problems: the analytic qubit cases plus seeded random ones.

    Random draws are kept only when the certificate's ``t_star - 5 dt`` rule
    is a valid optimality test for them, i.e. when no admissible schedule can
    reach the arrival ball (at ``fid_threshold``) more than ``5 dt`` early.
    """
    rng = np.random.default_rng(seed)
    probs = [
        ("zero-wind orthogonal", zero_wind_problem()),
        ("tailwind eps=0.5", tailwind_problem(0.5)),
        ("tailwind eps=1", tailwind_problem(1.0)),
        ("headwind eps=0.2", headwind_problem(0.2)),
        ("headwind eps=1", headwind_problem(1.0)),
    ]
    for dim in (2, 2, 3, 3, 4):
        p = random_problem(rng, dim)
        while not _margin_is_meaningful(p, dt, fid_threshold):
            p = random_problem(rng, dim)
        probs.append((f"random dim={dim}", p))
    return probs
