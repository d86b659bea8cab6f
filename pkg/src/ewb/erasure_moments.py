"""Expected spectral moments of Bernoulli-erased frames.

Erasure model: each of the n frame vectors is kept independently with
probability p and zeroed otherwise, X = FP.  The d-th moment is

    m_d = (1/n) E[trace((X'X)^d)],

normalized by the full frame size n, so m_1 = p for every unit-norm frame.
m_d is a polynomial in p of degree d; the p^k coefficient a_{d,k} is the
normalized count of length-d correlation cycles visiting exactly k distinct
vectors, with a_{d,1} = 1.  For d <= 4 the coefficients are recovered from
trace identities and O(n^2) pair sums instead of tuple enumeration.

Three routes to m_d are provided: the exact polynomial, an exhaustive
2^n-pattern oracle (n <= 24), and a seeded Monte Carlo estimator.  Oracle
weights p^|S| stay above double-precision underflow for p >= 1e-9 at
n <= 24, so no log-space arithmetic is used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .frames import Frame, gram
from .rng import keep_masks

BRUTEFORCE_MAX_N = 24


@dataclass(frozen=True)
class ErasureModel:
    """Keep-probability and seed for one erasure experiment."""

    p: float
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"keep probability must be in [0, 1], got {self.p}")


@dataclass(frozen=True)
class MomentPolynomial:
    """m_d(p) = sum_k coeffs[k-1] * p^k with coeffs[0] = 1."""

    d: int
    coeffs: tuple

    def evaluate(self, p: float) -> float:
        acc = 0.0
        for a in reversed(self.coeffs):
            acc = a + p * acc
        return p * acc


@dataclass(frozen=True)
class MomentEstimate:
    """Monte Carlo mean with stderr = sample std / sqrt(trials)."""

    value: float
    stderr: float
    trials: int


def trace_moment(frame: Frame, d: int) -> float:
    """(1/n) trace((F F')^d) by repeated dense multiplication.

    Works on the m-by-m factor FF' (m <= n); equals the moment of the
    unerased frame, i.e. m_d at p = 1.
    """
    if d < 1:
        raise ValueError("moment order must be a positive integer")
    a = frame.entries @ frame.entries.conj().T
    cur = a
    for _ in range(d - 1):
        cur = cur @ a
    return float(np.trace(cur).real) / frame.n


def moment_polynomial(frame: Frame, d: int) -> MomentPolynomial:
    """Exact coefficients of m_d(p) for d <= 4.

    With T_d = (1/n) trace((FF')^d) and off-diagonal Gram magnitudes |c|:
    a_{2,2} = (1/n) sum |c|^2 = T_2 - 1; a_{3,2} = 3 a_{2,2} and
    a_{3,3} = T_3 - 1 - a_{3,2}; for d = 4, with S4 = (1/n) sum |c|^4,
    C_i = sum_{j != i} |c_ij|^2 and Q = (1/n) sum C_i^2:
    a_{4,2} = 6 a_{2,2} + S4, a_{4,3} = 4 a_{3,3} + 2 Q - 2 S4, and
    a_{4,4} closes against T_4.
    """
    if not 1 <= d <= 4:
        raise ValueError("moment order must be 1..4 (no closed coefficient form above 4)")
    if d == 1:
        return MomentPolynomial(d=1, coeffs=(1.0,))
    n = frame.n
    sq = np.abs(gram(frame).entries) ** 2
    np.fill_diagonal(sq, 0.0)
    a22 = float(sq.sum()) / n
    if d == 2:
        return MomentPolynomial(d=2, coeffs=(1.0, a22))
    a32 = 3.0 * a22
    a33 = trace_moment(frame, 3) - 1.0 - a32
    if d == 3:
        return MomentPolynomial(d=3, coeffs=(1.0, a32, a33))
    s4 = float((sq**2).sum()) / n
    c = sq.sum(axis=1)
    q = float((c**2).sum()) / n
    a42 = 6.0 * a22 + s4
    a43 = 4.0 * a33 + 2.0 * q - 2.0 * s4
    a44 = trace_moment(frame, 4) - 1.0 - a42 - a43
    return MomentPolynomial(d=4, coeffs=(1.0, a42, a43, a44))


def expected_moment(frame: Frame, p: float, d: int) -> float:
    """m_d at keep probability p, via the exact coefficient polynomial."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"keep probability must be in [0, 1], got {p}")
    return moment_polynomial(frame, d).evaluate(p)


def _masked_trace_powers(g, masks, d_max):
    """(1/n) tr((G_S)^d) per mask row, d = 1..d_max, as a (d_max, B) array.

    Uses trace((D G D)^d) = trace((G D)^d) for the 0/1 diagonal D, so erased
    columns are zeroed in place of building per-subset submatrices.
    """
    n = g.shape[0]
    b = g[None, :, :] * masks[:, None, :]
    out = np.empty((d_max, masks.shape[0]))
    out[0] = np.einsum("bii->b", b).real
    cur = b
    for d in range(2, d_max + 1):
        cur = cur @ b
        out[d - 1] = np.einsum("bii->b", cur).real
    return out / n


@dataclass(frozen=True)
class BruteforceTable:
    """Per-subset-size trace sums; entry [k, d-1] = sum over |S| = k of (1/n) tr((G_S)^d).

    One enumeration of the 2^n keep patterns serves every (p, d <= d_max)
    afterwards, since only the binomial weights depend on p.
    """

    n: int
    d_max: int
    subset_sums: np.ndarray

    def moment(self, p: float, d: int) -> float:
        if not 1 <= d <= self.d_max:
            raise ValueError(f"order {d} not tabulated (d_max={self.d_max})")
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"keep probability must be in [0, 1], got {p}")
        n = self.n
        terms = [
            p**k * (1.0 - p) ** (n - k) * self.subset_sums[k, d - 1]
            for k in range(n + 1)
        ]
        return math.fsum(terms)


def bruteforce_table(frame: Frame, d_max: int = 4, chunk: int = 8192) -> BruteforceTable:
    """Enumerate all 2^n keep patterns once and group trace sums by subset size.

    Compensated (fsum) accumulation keeps the result independent of the
    enumeration chunking to well below 1e-10.
    """
    n = frame.n
    if n > BRUTEFORCE_MAX_N:
        raise ValueError(f"brute force needs n <= {BRUTEFORCE_MAX_N}, got n={n}")
    if d_max < 1:
        raise ValueError("moment order must be a positive integer")
    g = gram(frame).entries
    partial = [[[] for _ in range(d_max)] for _ in range(n + 1)]
    bits = np.arange(n, dtype=np.int64)
    total = 1 << n
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        masks = ((idx[:, None] >> bits[None, :]) & 1).astype(bool)
        vals = _masked_trace_powers(g, masks, d_max)
        ks = masks.sum(axis=1)
        for k in np.unique(ks):
            sel = ks == k
            for j in range(d_max):
                partial[int(k)][j].append(math.fsum(vals[j][sel]))
    sums = np.array(
        [[math.fsum(partial[k][j]) for j in range(d_max)] for k in range(n + 1)]
    )
    return BruteforceTable(n=n, d_max=d_max, subset_sums=sums)


def bruteforce_moment(frame: Frame, p: float, d: int) -> float:
    """Exact m_d as the weighted sum over all 2^n keep patterns (n <= 24).

    Unlike the polynomial route this places no upper limit on d, so it also
    serves exploratory checks beyond order 4.
    """
    return bruteforce_table(frame, d_max=d).moment(p, d)


def montecarlo_moment(
    frame: Frame, model: ErasureModel, d: int, trials: int, chunk: int = 2048
) -> MomentEstimate:
    """Sample keep patterns i.i.d. Bernoulli(p) and average (1/n) tr((G_S)^d).

    Deterministic given (model.seed, trials); trial t's pattern depends only
    on the seed and t (counter-derived), never on chunking or schedule.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if d < 1:
        raise ValueError("moment order must be a positive integer")
    g = gram(frame).entries
    masks = keep_masks(model.seed, trials, frame.n, model.p)
    vals = np.empty(trials)
    for s in range(0, trials, chunk):
        vals[s : s + chunk] = _masked_trace_powers(g, masks[s : s + chunk], d)[d - 1]
    stderr = float(vals.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return MomentEstimate(value=float(vals.mean()), stderr=stderr, trials=trials)


def subset_rms(frame: Frame, p: float) -> float:
    """Squared rms correlation of the erased frame, normalized by the
    expected subset size k = p n:  (m_2 / p - 1) / (k - 1).

    At p = 1 this reduces to the full-frame rms_sq from coherence().
    """
    k = p * frame.n
    if k <= 1.0:
        raise ValueError(f"expected subset size p*n must exceed 1, got {k}")
    m2 = expected_moment(frame, p, 2)
    return (m2 / p - 1.0) / (k - 1.0)
