"""Unit-norm frames, Gram matrices, coherence, and frame constructions.

A frame is an m-by-n matrix (n >= m) whose columns are unit-norm vectors in
R^m or C^m.  This module provides the Frame/GramMatrix containers, the
classical coherence measures with their Welch floor, tightness and
equiangularity predicates, two exact ETF families (simplex and a
difference-set harmonic family), random frames, an alternating-projection
map onto the uniform tight frames, and a JSON/CSV file format.

All functions are pure; Frame and GramMatrix are immutable after
construction and safe to share across threads.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .rng import make_rng

# Structural checks (unit norms, Gram diagonal) are held to NORM_TOL;
# classification checks (is_utf / is_etf) default to the looser CLASS_TOL so
# they tolerate rounding accumulated inside constructions.
NORM_TOL = 1e-10
CLASS_TOL = 1e-8

REAL = "real"
COMPLEX = "complex"


@dataclass(frozen=True)
class Frame:
    """Immutable m-by-n matrix with unit-norm columns.

    field is "real" or "complex"; entries is float64 or complex128
    accordingly, columns are the frame vectors.
    """

    field: str
    entries: np.ndarray

    def __post_init__(self):
        if self.field not in (REAL, COMPLEX):
            raise ValueError(f"field must be 'real' or 'complex', got {self.field!r}")
        ent = np.asarray(self.entries)
        if ent.ndim != 2:
            raise ValueError("entries must be a 2-D matrix")
        if self.field == REAL:
            if np.iscomplexobj(ent):
                raise ValueError("real frame with complex entries")
            ent = ent.astype(np.float64, copy=True)
        else:
            ent = ent.astype(np.complex128, copy=True)
        m, n = ent.shape
        if m < 1 or n < m:
            raise ValueError(f"need n >= m >= 1, got m={m}, n={n}")
        norms = np.linalg.norm(ent, axis=0)
        worst = float(np.max(np.abs(norms - 1.0)))
        if worst > NORM_TOL:
            raise ValueError(f"column norms deviate from 1 by {worst:.3e} (tol {NORM_TOL:.0e})")
        ent.setflags(write=False)
        object.__setattr__(self, "entries", ent)

    @property
    def m(self) -> int:
        return self.entries.shape[0]

    @property
    def n(self) -> int:
        return self.entries.shape[1]


@dataclass(frozen=True)
class GramMatrix:
    """n-by-n cross-correlation matrix, exactly Hermitian with unit diagonal."""

    n: int
    entries: np.ndarray

    def __post_init__(self):
        ent = np.asarray(self.entries)
        if ent.shape != (self.n, self.n):
            raise ValueError("Gram entries must be n x n")
        ent = ent.copy()
        ent.setflags(write=False)
        object.__setattr__(self, "entries", ent)


@dataclass(frozen=True)
class CoherenceReport:
    """Squared rms and max cross-correlation plus the Welch floor (n-m)/((n-1)m)."""

    rms_sq: float
    max_sq: float
    welch_floor: float


def welch_floor(m: int, n: int) -> float:
    """Classical lower bound on squared rms/max coherence; 0 when n <= 1."""
    if n <= 1:
        return 0.0
    return (n - m) / ((n - 1) * m)


def gram(frame: Frame) -> GramMatrix:
    """Cross-correlation matrix G[i,j] = <f_i, f_j> (conjugated in the first slot).

    The diagonal is pinned to exactly 1 and conjugate symmetry is enforced
    structurally (the lower triangle is the conjugate of the upper), so the
    result is Hermitian as stored, not merely up to rounding.
    """
    ent = frame.entries
    norms = np.linalg.norm(ent, axis=0)
    worst = float(np.max(np.abs(norms - 1.0)))
    if worst > CLASS_TOL:
        raise ValueError(f"column norms deviate from 1 by {worst:.3e}")
    g = ent.conj().T @ ent
    upper = np.triu(g, 1)
    exact = upper + upper.conj().T + np.eye(frame.n, dtype=g.dtype)
    return GramMatrix(n=frame.n, entries=exact)


def coherence(frame: Frame) -> CoherenceReport:
    """Squared rms and max absolute cross-correlation over distinct pairs."""
    n = frame.n
    if n < 2:
        raise ValueError("coherence needs n >= 2")
    g = gram(frame).entries
    sq = np.abs(g) ** 2
    off = sq[~np.eye(n, dtype=bool)]
    rms_sq = float(off.sum() / (n * (n - 1)))
    max_sq = float(off.max())
    return CoherenceReport(rms_sq=rms_sq, max_sq=max_sq, welch_floor=welch_floor(frame.m, n))


def _utf_residual(frame: Frame) -> float:
    m, n = frame.m, frame.n
    a = frame.entries @ frame.entries.conj().T
    return float(np.linalg.norm(a - (n / m) * np.eye(m)))


def is_utf(frame: Frame, tol: float = CLASS_TOL) -> bool:
    """True when F F' = (n/m) I up to tol (Frobenius, scaled by (n/m) sqrt(m))."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    m, n = frame.m, frame.n
    return _utf_residual(frame) <= tol * (n / m) * np.sqrt(m)


def is_etf(frame: Frame, tol: float = CLASS_TOL) -> bool:
    """True when the frame is tight and all |<f_i,f_j>|^2 sit at the Welch floor.

    At n = m the floor is 0 and the condition degenerates to "orthonormal
    basis", which is what the uniform formula below checks.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if not is_utf(frame, tol):
        return False
    n = frame.n
    if n == 1:
        return True
    g = gram(frame).entries
    sq = np.abs(g) ** 2
    off = sq[~np.eye(n, dtype=bool)]
    return float(np.max(np.abs(off - welch_floor(frame.m, n)))) <= tol


def _normalize_columns(ent: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(ent, axis=0)
    if np.any(norms <= 1e-14):
        raise ValueError("cannot normalize a zero column")
    return ent / norms


def random_frame(m: int, n: int, field: str = REAL, seed: int = 0) -> Frame:
    """I.i.d. standard Gaussian entries with columns renormalized to unit norm.

    Deterministic given (m, n, field, seed); see rng.make_rng for the
    generator contract.
    """
    if m < 1 or n < m:
        raise ValueError(f"need n >= m >= 1, got m={m}, n={n}")
    rng = make_rng(seed)
    if field == REAL:
        ent = rng.standard_normal((m, n))
    elif field == COMPLEX:
        ent = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
    else:
        raise ValueError(f"unknown field {field!r}")
    return Frame(field=field, entries=_normalize_columns(ent))


def _helmert_basis(n: int) -> np.ndarray:
    """(n-1) x n orthonormal basis of the orthogonal complement of the ones vector."""
    h = np.zeros((n - 1, n))
    for k in range(1, n):
        h[k - 1, :k] = 1.0
        h[k - 1, k] = -k
        h[k - 1] /= np.sqrt(k * (k + 1))
    return h


def simplex_etf(m: int) -> Frame:
    """Regular simplex ETF: n = m+1 real vectors with constant correlation -1/m.

    The n standard basis vectors are projected onto the complement of the
    all-ones direction, renormalized, and expressed in a fixed (Helmert)
    orthonormal basis of that complement.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    n = m + 1
    proj = np.eye(n) - np.full((n, n), 1.0 / n)
    cols = _normalize_columns(proj)
    ent = _helmert_basis(n) @ cols
    return Frame(field=REAL, entries=_normalize_columns(ent))


def _is_prime(q: int) -> bool:
    if q < 2:
        return False
    if q % 2 == 0:
        return q == 2
    f = 3
    while f * f <= q:
        if q % f == 0:
            return False
        f += 2
    return True


def harmonic_etf(q: int) -> Frame:
    """Difference-set harmonic ETF with n = q, m = (q+1)/2 for prime q = 3 (mod 4).

    Rows of the q-point unitary DFT indexed by {0} together with the
    quadratic residues mod q; that index set is a difference set precisely
    for q = 3 (mod 4), which makes the column correlations equimodular.
    """
    if not _is_prime(q) or q % 4 != 3:
        raise ValueError(f"q must be prime with q = 3 (mod 4), got {q}")
    residues = sorted({(k * k) % q for k in range(1, q)})
    rows = np.array([0] + residues)
    cols = np.arange(q)
    ent = np.exp(-2j * np.pi * np.outer(rows, cols) / q) / np.sqrt(q)
    return Frame(field=COMPLEX, entries=_normalize_columns(ent))


def repeated_onb(m: int, copies: int = 2) -> Frame:
    """copies side-by-side copies of the standard basis of R^m (a UTF, not an ETF)."""
    if m < 1 or copies < 1:
        raise ValueError("need m >= 1 and copies >= 1")
    ent = np.hstack([np.eye(m)] * copies)
    return Frame(field=REAL, entries=ent)


@dataclass(frozen=True)
class NearestUtfResult:
    """Last iterate of the alternating projection plus its tightness residual."""

    frame: Frame
    residual: float
    iterations: int
    converged: bool


def nearest_utf(frame: Frame, max_iters: int = 500, tol: float = 1e-9) -> NearestUtfResult:
    """Alternate between the closest tight frame (polar factor scaled so
    F F' = (n/m) I) and column renormalization until the Frobenius residual
    of the tightness condition drops to tol.

    Non-convergence is reported through converged=False; the last iterate is
    returned either way.
    """
    if max_iters < 1 or tol <= 0:
        raise ValueError("need max_iters >= 1 and tol > 0")
    m, n = frame.m, frame.n
    ent = np.array(frame.entries)
    residual = _utf_residual(frame)
    iters = 0
    while residual > tol and iters < max_iters:
        cov = ent @ ent.conj().T
        w, u = np.linalg.eigh(cov)
        if w[0] <= 1e-12 * w[-1]:
            raise ValueError("frame does not span R^m / C^m; tight projection undefined")
        inv_sqrt = (u * (w ** -0.5)) @ u.conj().T
        ent = np.sqrt(n / m) * (inv_sqrt @ ent)
        ent = _normalize_columns(ent)
        iters += 1
        residual = float(np.linalg.norm(ent @ ent.conj().T - (n / m) * np.eye(m)))
    out = Frame(field=frame.field, entries=ent)
    return NearestUtfResult(frame=out, residual=residual, iterations=iters, converged=residual <= tol)


# ---------------------------------------------------------------------------
# File format.  JSON: {"field": "real"|"complex", "m": .., "n": .., "data":
# row-major rows, complex entries as [re, im]}.  json round-trips float64
# exactly (shortest repr), so saved frames reload bit-identically.  CSV is
# accepted for real frames only (m rows by n columns).
# ---------------------------------------------------------------------------


def frame_to_json_obj(frame: Frame, extra: dict | None = None) -> dict:
    if frame.field == REAL:
        data = [[float(v) for v in row] for row in frame.entries]
    else:
        data = [[[float(v.real), float(v.imag)] for v in row] for row in frame.entries]
    obj = {"field": frame.field, "m": frame.m, "n": frame.n, "data": data}
    if extra:
        obj.update(extra)
    return obj


def frame_from_json_obj(obj: dict) -> Frame:
    field = obj["field"]
    m, n = int(obj["m"]), int(obj["n"])
    data = obj["data"]
    if len(data) != m or any(len(row) != n for row in data):
        raise ValueError("data shape does not match declared (m, n)")
    if field == REAL:
        ent = np.array(data, dtype=np.float64)
    elif field == COMPLEX:
        raw = np.array(data, dtype=np.float64)
        if raw.shape != (m, n, 2):
            raise ValueError("complex data entries must be [re, im] pairs")
        ent = raw[..., 0] + 1j * raw[..., 1]
    else:
        raise ValueError(f"unknown field {field!r}")
    return Frame(field=field, entries=ent)


def save_frame(frame: Frame, path: str | Path, extra: dict | None = None) -> None:
    obj = frame_to_json_obj(frame, extra=extra)
    Path(path).write_text(json.dumps(obj, indent=1) + "\n")


def load_frame(path: str | Path) -> Frame:
    path = Path(path)
    if path.suffix.lower() == ".csv":
        with open(path, newline="") as fh:
            rows = [[float(v) for v in row] for row in csv.reader(fh) if row]
        return Frame(field=REAL, entries=np.array(rows, dtype=np.float64))
    return frame_from_json_obj(json.loads(path.read_text()))
