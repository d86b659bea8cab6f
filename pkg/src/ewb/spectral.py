"""Empirical spectra of erased subframes and comparison to the MANOVA law.

Each trial keeps a Bernoulli(p) subset S of columns and takes the
eigenvalues of the |S|-by-|S| Gram submatrix G_S.  Since rank(G_S) <= m,
only the top min(|S|, m) eigenvalues carry mass; pooling exactly those
matches the min(p, gamma) normalization of the MANOVA law while keeping
sums of d-th powers equal to the full-trace moments (structural zeros from
erased columns never enter the pool).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .erasure_moments import ErasureModel
from .frames import Frame, gram
from .manova import ManovaParams, cdf_many, support
from .rng import keep_masks

_HERMITIAN_TOL = 1e-10
_PSD_CLAMP = 1e-9
_CHECK_RTOL = 1e-8


@dataclass(frozen=True)
class Spectrum:
    """Real eigenvalues in nonincreasing order plus the source matrix shape."""

    values: np.ndarray
    source_dims: tuple


def hermitian_eigenvalues(a, psd: bool = False) -> Spectrum:
    """Eigenvalues of a Hermitian matrix, sorted nonincreasing.

    Every call verifies the spectrum against the matrix: sum of eigenvalues
    vs trace and sum of squares vs squared Frobenius norm, both to 1e-8
    relative.  With psd=True round-off negatives in [-1e-9, 0) are clamped
    to 0 and anything more negative is rejected (Gram-type inputs are
    positive semidefinite).
    """
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("square matrix required")
    if a.shape[0] == 0:
        return Spectrum(values=np.zeros(0), source_dims=(0, 0))
    scale = max(1.0, float(np.max(np.abs(a))))
    if float(np.max(np.abs(a - a.conj().T))) > _HERMITIAN_TOL * scale:
        raise ValueError("matrix is not Hermitian within tolerance")
    vals = np.linalg.eigvalsh(a)[::-1].copy()
    tr = float(np.trace(a).real)
    fro2 = float(np.sum(np.abs(a) ** 2))
    if abs(float(vals.sum()) - tr) > _CHECK_RTOL * max(1.0, abs(tr)):
        raise ValueError("eigenvalue sum disagrees with trace")
    if abs(float((vals**2).sum()) - fro2) > _CHECK_RTOL * max(1.0, fro2):
        raise ValueError("eigenvalue square sum disagrees with Frobenius norm")
    if psd:
        low = float(vals[-1])
        if low < -_PSD_CLAMP:
            raise ValueError(f"matrix is not positive semidefinite (min eigenvalue {low:.3e})")
        np.clip(vals, 0.0, None, out=vals)
    vals.setflags(write=False)
    return Spectrum(values=vals, source_dims=a.shape)


def subset_spectrum_samples(frame: Frame, model: ErasureModel, trials: int) -> list:
    """One Spectrum of the kept-column Gram submatrix per trial.

    Deterministic per (model.seed, trial index); empty subsets yield empty
    spectra, recorded rather than skipped.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    g = gram(frame).entries
    masks = keep_masks(model.seed, trials, frame.n, model.p)
    out = []
    for row in masks:
        idx = np.flatnonzero(row)
        out.append(hermitian_eigenvalues(g[np.ix_(idx, idx)], psd=True))
    return out


def pool_eigenvalues(spectra, m: int) -> np.ndarray:
    """Concatenate the top min(k, m) eigenvalues of each k-point spectrum."""
    if m < 1:
        raise ValueError("m must be >= 1")
    parts = [s.values[:m] for s in spectra]
    if not parts:
        return np.zeros(0)
    return np.concatenate(parts)


def ks_distance(pooled, params: ManovaParams) -> float:
    """Sup distance between the empirical CDF of pooled eigenvalues and the
    MANOVA(gamma, p) law.

    The reference law may carry an atom at 1/gamma, so the supremum is also
    evaluated from the left at the atom location.
    """
    xs = np.sort(np.asarray(pooled, dtype=float).reshape(-1))
    nq = xs.size
    if nq == 0:
        raise ValueError("empty eigenvalue pool")
    sup = support(params)
    # Both CDFs are monotone step/continuous mixtures, so the supremum is
    # attained at (a one-sided limit of) a jump point of either: the sample
    # values, the law's atom, and its degenerate-bulk step locations.
    cand = np.unique(np.concatenate([xs, [0.0, sup.r_minus, sup.atom_location]]))
    emp_le = np.searchsorted(xs, cand, side="right") / nq
    emp_lt = np.searchsorted(xs, cand, side="left") / nq
    ref_le = cdf_many(cand, params)
    ref_lt = cdf_many(cand, params, left=True)
    dist = max(float(np.max(np.abs(emp_le - ref_le))), float(np.max(np.abs(emp_lt - ref_lt))))
    return min(1.0, dist)
