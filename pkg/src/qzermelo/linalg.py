"""Dense complex linear algebra for small Hermitian systems (hbar = 1).

Operators are plain ``(n, n)`` complex arrays and pure states plain length-``n``
complex vectors. The ``as_*`` helpers validate and coerce; everything else
assumes validated input.
"""

import numpy as np

# Validation tolerances (max-abs entrywise). The CLI may override
# HERMITIAN_TOL through --tol-linalg.
HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-10
NORM_TOL = 1e-12


class LinalgError(ValueError):
    """Input violates a structural invariant (shape, symmetry, norm)."""


class NotHermitianError(LinalgError):
    def __init__(self, asymmetry, tol):
        self.asymmetry = float(asymmetry)
        super().__init__(
            f"matrix is not Hermitian: max |h - h^dagger| = {self.asymmetry:.3e} "
            f"exceeds tolerance {tol:.1e}"
        )


class DimensionMismatchError(LinalgError):
    pass


def asymmetry(h):
    h = np.asarray(h)
    return float(np.max(np.abs(h - h.conj().T))) if h.size else 0.0


def as_hermitian(h, tol=None):
    """Return ``h`` as a complex array after checking it is square and Hermitian."""
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1] or h.shape[0] == 0:
        raise LinalgError(f"expected a square matrix, got shape {h.shape}")
    tol = HERMITIAN_TOL if tol is None else tol
    gap = asymmetry(h)
    if gap > tol:
        raise NotHermitianError(gap, tol)
    return h


def as_state(psi, tol=None):
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1 or psi.shape[0] == 0:
        raise LinalgError(f"expected a state vector, got shape {psi.shape}")
    err = abs(float(np.vdot(psi, psi).real) - 1.0)
    if err > (NORM_TOL if tol is None else tol):
        raise LinalgError(f"state is not normalized: | |psi|^2 - 1 | = {err:.3e}")
    return psi


def normalize(psi):
    psi = np.asarray(psi, dtype=complex)
    norm = np.linalg.norm(psi)
    if norm < 1e-12:
        raise LinalgError("cannot normalize a (near-)zero vector")
    return psi / norm


def is_unitary(u, tol=UNITARY_TOL):
    u = np.asarray(u)
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= tol)


def _check_dims(*arrays):
    dims = {a.shape[0] for a in arrays}
    if len(dims) != 1:
        raise DimensionMismatchError(
            "dimension mismatch: " + ", ".join(str(a.shape) for a in arrays)
        )


def hermitian_eigendecomposition(h):
    """Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.

    Returns ``(w, v)`` with ``h == v @ diag(w) @ v.conj().T``. Degenerate
    eigenspaces come back in an arbitrary orthonormal basis.
    """
    h = as_hermitian(h)
    # symmetrize away sub-tolerance noise so LAPACK sees an exact Hermitian
    w, v = np.linalg.eigh(0.5 * (h + h.conj().T))
    return w, v


def expm_unitary(h, t):
    """``exp(-i h t)`` through the spectral decomposition of ``h``."""
    h = as_hermitian(h)
    if t == 0:
        return np.eye(h.shape[0], dtype=complex)
    w, v = hermitian_eigendecomposition(h)
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def inner(a, b):
    """<a|b>, conjugate-linear in ``a``."""
    a, b = np.asarray(a), np.asarray(b)
    _check_dims(a, b)
    return complex(np.vdot(a, b))


def hs_inner(a, b):
    """Hilbert-Schmidt pairing tr(ab) of two Hermitian operators (real)."""
    a, b = np.asarray(a), np.asarray(b)
    _check_dims(a, b)
    return float(np.sum(a * b.T).real)


def expectation(h, psi):
    h, psi = np.asarray(h), np.asarray(psi)
    _check_dims(h, psi)
    return float(np.vdot(psi, h @ psi).real)


def variance(h, psi):
    """<h^2> - <h>^2, evaluated as |(h - <h>)psi|^2 so it is never negative."""
    h, psi = np.asarray(h), np.asarray(psi)
    _check_dims(h, psi)
    hpsi = h @ psi
    centred = hpsi - np.vdot(psi, hpsi).real * psi
    return float(np.vdot(centred, centred).real)


def covariance(a, b, psi):
    """Symmetrized covariance Re<ab> - <a><b>."""
    a, b, psi = np.asarray(a), np.asarray(b), np.asarray(psi)
    _check_dims(a, b, psi)
    apsi, bpsi = a @ psi, b @ psi
    da = apsi - np.vdot(psi, apsi).real * psi
    db = bpsi - np.vdot(psi, bpsi).real * psi
    return float(np.vdot(da, db).real)


def projective_fidelity(a, b):
    """|<a|b>|; depends only on the rays of ``a`` and ``b``."""
    return min(1.0, abs(inner(a, b)))
