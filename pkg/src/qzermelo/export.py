"""Time-series export: trajectory tables, Bloch coordinates, CSV writing."""

import csv
import io
import sys

import numpy as np

from . import horizontality, linalg, propagator, solver


def bloch_point(psi):
    """Bloch vector ``(2 Re(a* b), 2 Im(a* b), |a|^2 - |b|^2)`` of a qubit state."""
    a, b = psi
    ab = np.conj(a) * b
    return np.array([2.0 * ab.real, 2.0 * ab.imag, abs(a) ** 2 - abs(b) ** 2])


def plane_fit_residual(points):
    """Largest distance of the points from their best-fit plane through the origin."""
    points = np.asarray(points, dtype=float)
    _, _, vt = np.linalg.svd(points, full_matrices=True)
    normal = vt[-1]
    return float(np.max(np.abs(points @ normal)))


def trajectory_table(p, sol, dt):
    """Header and rows for the optimal trajectory sampled on a uniform grid.

    Columns: ``t``, real/imaginary part of every amplitude, fidelity to the
    target, the full-throttle residual ``|4 Var(H1(t)) - 1|`` and, for qubits,
    the Bloch coordinates.
    """
    n, step = propagator.uniform_grid(sol.t_star, dt)
    dim = p.dim
    header = ["t"]
    for j in range(dim):
        header += [f"re_{j}", f"im_{j}"]
    header += ["fidelity_to_target", "throttle_residual"]
    if dim == 2:
        header += ["bloch_x", "bloch_y", "bloch_z"]
    rows = []
    for k in range(n + 1):
        t = k * step
        psi = solver.propagate_closed_form(sol, p.h0, t)
        h1 = solver.control_at(sol, p.h0, t)
        throttle = 0.0 if sol.trivial else abs(horizontality.aa_speed_sq(h1, psi) - 1.0)
        row = [t]
        for amp in psi:
            row += [amp.real, amp.imag]
        row += [linalg.projective_fidelity(psi, p.psi_f), throttle]
        if dim == 2:
            row += list(bloch_point(psi))
        rows.append([float(x) for x in row])
    return header, rows


def format_csv(header, rows):
    """CSV text with a header row, ``\\n`` line ends and round-trip float formatting."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(x) if isinstance(x, float) else x for x in row])
    return buf.getvalue()


def write_text(text, path):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
