"""Hot loops, each in a numba and a pure-numpy flavour.

Both flavours share a signature and must agree to rounding; the public names
(`moving_frame_angles`, `evolve_first_hit`) dispatch on ``_accel.JIT_ENABLED``.
Everything here works in the eigenbasis of the drift Hamiltonian, where the
drift acts as a diagonal phase.
"""

import numpy as np

from ._accel import JIT_ENABLED, njit, prange


# ---------------------------------------------------------------------------
# Angular distance between a fixed ray and a drifting ray
# ---------------------------------------------------------------------------


def _moving_frame_angles_numpy(a, b, energies, times):
    phases = np.exp(1j * np.outer(times, energies))  # (G, N)
    moved = phases * b[None, :]
    overlap = moved @ np.conj(a)
    perp = moved - overlap[:, None] * a[None, :]
    perp_norm = np.sqrt(np.sum(perp.real**2 + perp.imag**2, axis=1))
    return 2.0 * np.arctan2(perp_norm, np.abs(overlap))


@njit(cache=True, fastmath=False)
def _moving_frame_angles_numba(a, b, energies, times):
    n = a.shape[0]
    out = np.empty(times.shape[0])
    moved = np.empty(n, dtype=np.complex128)
    for g in range(times.shape[0]):
        t = times[g]
        ov = 0.0 + 0.0j
        for j in range(n):
            moved[j] = np.exp(1j * energies[j] * t) * b[j]
            ov += np.conj(a[j]) * moved[j]
        s = 0.0
        for j in range(n):
            d = moved[j] - ov * a[j]
            s += d.real * d.real + d.imag * d.imag
        out[g] = 2.0 * np.arctan2(np.sqrt(s), np.abs(ov))
    return out


# ---------------------------------------------------------------------------
# Batched stepping with first-arrival detection
# ---------------------------------------------------------------------------


def _evolve_first_hit_numpy(phi0, mats, phases, target, threshold):
    phi = phi0.copy()
    n_batch = phi.shape[0]
    hit = np.full(n_batch, -1, dtype=np.int64)
    live = np.ones(n_batch, dtype=bool)
    tconj = np.conj(target)
    for k in range(phases.shape[0]):
        p = phases[k]
        nxt = p[None, :] * np.einsum("bij,bj->bi", mats, np.conj(p)[None, :] * phi)
        # arrived samples stay frozen at their arrival state
        phi = np.where(live[:, None], nxt, phi)
        fid = np.abs(phi @ tconj)
        new = live & (fid >= threshold)
        hit[new] = k + 1
        live &= ~new
        if not live.any():
            break
    return phi, hit


@njit(cache=True, parallel=True)
def _evolve_first_hit_numba(phi0, mats, phases, target, threshold):
    n_batch, n = phi0.shape
    n_steps = phases.shape[0]
    phi = phi0.copy()
    hit = np.full(n_batch, -1, dtype=np.int64)
    for s in prange(n_batch):
        cur = phi[s].copy()
        tmp = np.empty(n, dtype=np.complex128)
        for k in range(n_steps):
            for j in range(n):
                tmp[j] = np.conj(phases[k, j]) * cur[j]
            for i in range(n):
                acc = 0.0 + 0.0j
                for j in range(n):
                    acc += mats[s, i, j] * tmp[j]
                cur[i] = phases[k, i] * acc
            ov = 0.0 + 0.0j
            for j in range(n):
                ov += np.conj(target[j]) * cur[j]
            if np.abs(ov) >= threshold:
                hit[s] = k + 1
                break
        phi[s] = cur
    return phi, hit


if JIT_ENABLED:
    moving_frame_angles = _moving_frame_angles_numba
    evolve_first_hit = _evolve_first_hit_numba
else:
    moving_frame_angles = _moving_frame_angles_numpy
    evolve_first_hit = _evolve_first_hit_numpy

IMPLEMENTATIONS = {
    "numpy": (_moving_frame_angles_numpy, _evolve_first_hit_numpy),
    "numba": (_moving_frame_angles_numba, _evolve_first_hit_numba),
}
