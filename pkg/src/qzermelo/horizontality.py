"""Vertical/horizontal geometry of Hamiltonians relative to a pure state.

In a frame whose first basis vector is ``psi``, a Hamiltonian splits into a
block-diagonal part (which only rephases ``psi``) and an off-diagonal first
row/column (which moves it). The off-diagonal column ``z`` sets the
Anandan-Aharonov speed, ``4 Var(H) = 4|z|^2``, and for traceless ``H`` the
squared speed never exceeds ``2 tr(H^2)``, with equality exactly when the
block-diagonal part vanishes.
"""

from dataclasses import dataclass

import numpy as np

from . import linalg

TRACELESS_TOL = 1e-10


def frame_with_first_column(psi):
    """Unitary whose first column is ``psi`` (Householder completion).

    The reflector ``P = I - 2 v v^dagger / |v|^2`` with ``v = psi - p e0``
    swaps ``psi`` and ``p e0`` for the unit phase ``p = psi_0/|psi_0|``;
    right-multiplying by ``diag(p, 1, ..., 1)`` puts ``psi`` itself in column 0.
    """
    psi = np.asarray(psi, dtype=complex)
    n = psi.shape[0]
    p = psi[0] / abs(psi[0]) if abs(psi[0]) > 1e-300 else 1.0 + 0.0j
    v = psi.copy()
    v[0] -= p
    vv = np.vdot(v, v).real
    refl = np.eye(n, dtype=complex)
    if vv > 1e-30:
        refl -= 2.0 * np.outer(v, v.conj()) / vv
    refl[:, 0] *= p
    return refl


def _traceless(h):
    n = h.shape[0]
    return h - (np.trace(h).real / n) * np.eye(n)


def stabilizer_basis(psi):
    """Hilbert-Schmidt orthonormal basis of traceless generators fixing the ray of ``psi``.

    There are ``n**2`` of them for a ``(n+1)``-dimensional space: off-diagonal
    pairs inside the lower ``n x n`` block plus the ``n`` traceless diagonals,
    all rotated so that ``psi`` plays the role of the first basis vector.
    """
    psi = linalg.as_state(psi, tol=1e-10)
    dim = psi.shape[0]
    u = frame_with_first_column(psi)
    gens = []
    for j in range(1, dim):
        for k in range(j + 1, dim):
            sym = np.zeros((dim, dim), dtype=complex)
            sym[j, k] = sym[k, j] = 1.0
            asym = np.zeros((dim, dim), dtype=complex)
            asym[j, k], asym[k, j] = -1j, 1j
            gens += [sym / np.sqrt(2.0), asym / np.sqrt(2.0)]
    # generalized Gell-Mann diagonals, mutually orthogonal and traceless
    for m in range(1, dim):
        d = np.zeros(dim)
        d[:m] = 1.0
        d[m] = -float(m)
        gens.append(np.diag(d / np.linalg.norm(d)).astype(complex))
    return [u @ g @ u.conj().T for g in gens]


@dataclass(frozen=True)
class VerticalHorizontalSplit:
    vertical: np.ndarray
    horizontal: np.ndarray
    z_norm_sq: float

    def vertical_norm(self):
        """Hilbert-Schmidt norm of the traceless part of the vertical block."""
        v = _traceless(self.vertical)
        return float(np.sqrt(max(linalg.hs_inner(v, v), 0.0)))


def split(h, psi, frame=None):
    """Split ``h`` into vertical and horizontal parts relative to ``psi``.

    Any multiple of the identity in ``h`` stays in the vertical part (it only
    rephases). ``frame`` overrides the unitary used to move ``psi`` to the
    first basis vector; the result does not depend on that choice.
    """
    h = linalg.as_hermitian(h, tol=1e-9)
    psi = linalg.as_state(psi, tol=1e-10)
    u = frame_with_first_column(psi) if frame is None else np.asarray(frame)
    rot = u.conj().T @ h @ u
    hor = np.zeros_like(rot)
    hor[1:, 0] = rot[1:, 0]
    hor[0, 1:] = rot[0, 1:]
    z = rot[1:, 0]
    horizontal = u @ hor @ u.conj().T
    horizontal = 0.5 * (horizontal + horizontal.conj().T)
    return VerticalHorizontalSplit(
        vertical=h - horizontal,
        horizontal=horizontal,
        z_norm_sq=float(np.vdot(z, z).real),
    )


def horizontality_residual(h, psi):
    """Norm of the vertical (ray-fixing) component of ``h`` at ``psi``."""
    return split(h, psi).vertical_norm()


def is_horizontal(h, psi, tol=1e-9):
    """True when ``|tr(h g)| < tol`` for every stabilizer generator ``g`` of ``psi``."""
    h = linalg.as_hermitian(h, tol=1e-9)
    return all(abs(linalg.hs_inner(h, g)) < tol for g in stabilizer_basis(psi))


def aa_speed_sq(h, psi):
    """Anandan-Aharonov squared speed ``4 Var(h)`` of ``psi`` under ``h``."""
    return 4.0 * linalg.variance(h, psi)


def speed_limit_gap(h, psi):
    """``2 tr(h^2) - 4 Var(h)``: slack in the universal speed limit.

    Only defined for traceless ``h``; shifting by the identity changes the
    Hilbert-Schmidt norm without changing the motion.
    """
    h = linalg.as_hermitian(h, tol=1e-9)
    tr = abs(np.trace(h))
    if tr > TRACELESS_TOL:
        raise ValueError(f"speed limit is stated for traceless h; |tr h| = {tr:.3e}")
    return 2.0 * linalg.hs_inner(h, h) - aa_speed_sq(h, psi)


def horizontal_projection(h, psi):
    return split(h, psi).horizontal
