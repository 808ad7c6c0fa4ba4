"""JSON problem files.

Schema::

    {
      "dimension": 2,
      "h0":    {"real": [[...], ...], "imag": [[...], ...]},
      "psi_i": {"real": [...], "imag": [...]},
      "psi_f": {"real": [...], "imag": [...]},
      "epsilon": 1.0,                      # optional wind scale
      "tolerances": {"t_max": 12.56, "root_tol": 1e-12, "scan_step": 0.01}
    }

Complex data is always a pair of real arrays. ``imag`` may be omitted for
real data.
"""

import json
import logging
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from . import linalg
from .solver import NavigationProblem

log = logging.getLogger(__name__)

PROBLEM_HERMITIAN_TOL = 1e-9
TOLERANCE_KEYS = ("t_max", "root_tol", "scan_step")


class ProblemFileError(ValueError):
    pass


@dataclass
class ProblemFile:
    dimension: int
    h0: np.ndarray
    psi_i: np.ndarray
    psi_f: np.ndarray
    epsilon: float | None = None
    tolerances: dict = field(default_factory=dict)

    def to_problem(self, epsilon=None, **overrides):
        """Build the :class:`NavigationProblem`, scaling ``h0`` by ``epsilon`` if given."""
        opts = {k: v for k, v in self.tolerances.items() if v is not None}
        opts.update({k: v for k, v in overrides.items() if v is not None})
        eps = self.epsilon if epsilon is None else epsilon
        h0 = self.h0 if eps is None else eps * self.h0
        return NavigationProblem(h0, self.psi_i, self.psi_f, **opts)

    def to_dict(self):
        d = {
            "dimension": self.dimension,
            "h0": _pack(self.h0),
            "psi_i": _pack(self.psi_i),
            "psi_f": _pack(self.psi_f),
        }
        if self.epsilon is not None:
            d["epsilon"] = self.epsilon
        if self.tolerances:
            d["tolerances"] = dict(self.tolerances)
        return d


def _pack(a):
    a = np.asarray(a, dtype=complex)
    return {"real": a.real.tolist(), "imag": a.imag.tolist()}


def _unpack(doc, key, shape):
    if key not in doc:
        raise ProblemFileError(f"missing field '{key}'")
    entry = doc[key]
    if not isinstance(entry, dict) or "real" not in entry:
        raise ProblemFileError(f"field '{key}' must be an object with 'real' (and 'imag') arrays")
    try:
        re = np.asarray(entry["real"], dtype=float)
        im = np.asarray(entry.get("imag", np.zeros(shape)), dtype=float)
    except (TypeError, ValueError) as exc:
        raise ProblemFileError(f"field '{key}': non-numeric entries ({exc})") from None
    for part, arr in (("real", re), ("imag", im)):
        if arr.shape != shape:
            raise ProblemFileError(f"field '{key}.{part}' has shape {arr.shape}, expected {shape}")
    if not (np.all(np.isfinite(re)) and np.all(np.isfinite(im))):
        raise ProblemFileError(f"field '{key}' contains non-finite values")
    return re + 1j * im


def _state(doc, key, n):
    psi = _unpack(doc, key, (n,))
    norm = float(np.linalg.norm(psi))
    if norm <= 1e-12:
        raise ProblemFileError(f"field '{key}' is (numerically) the zero vector")
    if abs(norm - 1.0) > 1e-12:
        log.warning("%s has norm %.15g; renormalizing", key, norm)
        psi = psi / norm
    return psi


def parse_problem(doc):
    """Validate a decoded JSON document and return a :class:`ProblemFile`."""
    if not isinstance(doc, dict):
        raise ProblemFileError("top level must be a JSON object")
    n = doc.get("dimension")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ProblemFileError(f"field 'dimension' must be a positive integer, got {n!r}")
    h0 = _unpack(doc, "h0", (n, n))
    gap = linalg.asymmetry(h0)
    if gap > PROBLEM_HERMITIAN_TOL:
        raise ProblemFileError(f"field 'h0' is not Hermitian (max asymmetry {gap:.3e})")
    h0 = 0.5 * (h0 + h0.conj().T)
    eps = doc.get("epsilon")
    if eps is not None and (isinstance(eps, bool) or not isinstance(eps, (int, float))):
        raise ProblemFileError(f"field 'epsilon' must be a number, got {eps!r}")
    tols = doc.get("tolerances", {}) or {}
    if not isinstance(tols, dict):
        raise ProblemFileError("field 'tolerances' must be an object")
    unknown = set(tols) - set(TOLERANCE_KEYS)
    if unknown:
        raise ProblemFileError(f"unknown tolerance keys: {sorted(unknown)}")
    for k, v in tols.items():
        if v is not None and (not isinstance(v, (int, float)) or isinstance(v, bool) or v <= 0):
            raise ProblemFileError(f"tolerance '{k}' must be a positive number, got {v!r}")
    return ProblemFile(
        dimension=n,
        h0=h0,
        psi_i=_state(doc, "psi_i", n),
        psi_f=_state(doc, "psi_f", n),
        epsilon=None if eps is None else float(eps),
        tolerances={k: float(v) for k, v in tols.items() if v is not None},
    )


def loads(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemFileError(
            f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from None
    return parse_problem(doc)


def load(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ProblemFileError(f"cannot read problem file {path}: {exc.strerror}") from None
    return loads(text)


def dumps(pf):
    return json.dumps(pf.to_dict(), indent=2, sort_keys=True) + "\n"


def dump(pf, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(pf))


def bundled(name):
    """Text of a problem file shipped with the package (e.g. ``"headwind.json"``)."""
    return resources.files("qzermelo.data").joinpath(name).read_text(encoding="utf-8")


def load_bundled(name):
    return loads(bundled(name))
