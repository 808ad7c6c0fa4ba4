"""Travel-time geometry: the Randers/Kropina function and Fubini-Study distances.

Quantum tangent vectors are paired with the Fubini-Study metric normalized so
that a state moving under ``H`` has squared speed ``4 Var(H)``; inner products
between two generators use the symmetrized covariance.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import linalg

KROPINA_TOL = 1e-9


class UnreachableError(ValueError):
    """The direction cannot be travelled against a wind this strong."""


@dataclass(frozen=True)
class TangentData:
    """Squared lengths and pairing of the wind and a candidate velocity."""

    wind_norm_sq: float
    xi_norm_sq: float
    wind_dot_xi: float

    def __post_init__(self):
        if self.wind_norm_sq < 0 or self.xi_norm_sq < 0:
            raise ValueError("squared norms must be non-negative")
        bound = self.wind_norm_sq * self.xi_norm_sq
        if self.wind_dot_xi**2 > bound + 1e-12 * max(1.0, bound):
            raise ValueError(
                f"Cauchy-Schwarz violated: <w,xi>^2 = {self.wind_dot_xi**2:.6g} "
                f"> |w|^2 |xi|^2 = {bound:.6g}"
            )


def randers_time(td):
    """Time needed to traverse the tangent vector ``xi`` at unit own-speed in wind ``w``.

    Solves ``|xi/F - w| = 1`` for ``F``. With a sub-unit wind this is the
    Randers function; at ``|w| = 1`` it degenerates to the Kropina value
    ``|xi|^2 / (2<w,xi>)``. For a dominant wind the smaller positive root is
    returned (the faster of the two intersections of the ray with the shifted
    unit sphere), and directions with no positive root raise
    :class:`UnreachableError`.
    """
    w2, x2, b = td.wind_norm_sq, td.xi_norm_sq, td.wind_dot_xi
    if x2 == 0.0:
        return 0.0
    a = 1.0 - w2
    if abs(a) < KROPINA_TOL:
        if b <= 0.0:
            raise UnreachableError("direction is not downwind of a unit-strength wind")
        return x2 / (2.0 * b)
    disc = b * b + x2 * a
    if disc < 0.0:
        raise UnreachableError("dominant wind: no positive travel time in this direction")
    root = math.sqrt(disc)
    if b > 0.0:
        # rationalized form; no cancellation and continuous through a = 0
        return x2 / (root + b)
    if a <= 0.0:
        raise UnreachableError("dominant wind blows against this direction")
    return (root - b) / a


def fubini_study_angle(a, b):
    """Angle ``theta`` in [0, pi] with ``cos(theta/2) = |<a|b>|``.

    Evaluated as ``2 atan2(|b_perp|, |<a|b>|)``, which keeps full precision
    for nearly coincident rays where ``arccos`` loses half the digits.
    """
    a, b = np.asarray(a), np.asarray(b)
    ov = linalg.inner(a, b)
    perp = np.linalg.norm(b - ov * a)
    return float(2.0 * math.atan2(perp, abs(ov)))


def quantum_tangent_data(h0, h1, psi):
    """Wind ``-i H0 psi`` and velocity ``-i (H0 + H1) psi`` as :class:`TangentData`."""
    h0, h1, psi = np.asarray(h0), np.asarray(h1), np.asarray(psi)
    total = h0 + h1
    return TangentData(
        wind_norm_sq=4.0 * linalg.variance(h0, psi),
        xi_norm_sq=4.0 * linalg.variance(total, psi),
        wind_dot_xi=4.0 * linalg.covariance(h0, total, psi),
    )


def path_journey_time(traj, h0):
    """Left Riemann sum of ``F(velocity) * dt`` along a sampled trajectory.

    ``traj.controls[k]`` is the control in force at ``traj.times[k]``; the
    velocity there is generated by ``h0 + controls[k]``.
    """
    if len(traj.times) < 2:
        raise ValueError("need at least two samples to integrate a journey time")
    h0 = np.asarray(h0)
    total = 0.0
    for psi, h1 in zip(traj.states[:-1], traj.controls[:-1]):
        total += randers_time(quantum_tangent_data(h0, h1, psi))
    return total * traj.step
