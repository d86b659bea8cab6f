"""Wachter's MANOVA limit law for erased-frame spectra.

MANOVA(gamma, p), with aspect ratio gamma = m/n and keep probability p, has
a continuous bulk

    rho(t) = gamma sqrt((t - r-)(r+ - t)) / (2 pi t (1 - gamma t) min(p, gamma))

on [r-, r+] with r+- = (sqrt((p/gamma)(1 - gamma)) +- sqrt(1 - p))^2, plus a
point mass at 1/gamma of weight (p + gamma - 1)^+ / min(p, gamma).  Bulk and
atom together carry probability 1.

Moments are reported in the same normalization as the erased-frame moments
(divide by the full frame size n): the d-th moment is min(p, gamma) times
the law's raw d-th moment, which makes the first moment exactly p.

Quadrature substitutes t = r- + w sin^2(theta): the square-root edge factors
become w sin(theta) cos(theta) and the 1 - gamma t factor becomes
(1 - gamma r+) + gamma w cos^2(theta) with the cancellation-free identity
1 - gamma r+ = (sqrt((1-p)(1-gamma)) - sqrt(p gamma))^2, so the transformed
integrand is smooth on [0, pi/2] even when the bulk touches 0 or 1/gamma.
Composite Gauss-Legendre panels are doubled until two refinements agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(20)
_HALF_PI = math.pi / 2.0
_DEGENERATE_WIDTH = 1e-14
_MAX_PANELS = 1 << 13
_TABLE_MIN_PANELS = 256


class AtomicOnlyError(ValueError):
    """The continuous bulk is empty; the law is purely atomic."""


class QuadratureError(RuntimeError):
    """Panel doubling stopped before reaching the requested tolerance."""

    def __init__(self, message: str, estimate: float):
        super().__init__(f"{message} (achieved error estimate {estimate:.3e})")
        self.estimate = estimate


@dataclass(frozen=True)
class ManovaParams:
    """Aspect ratio gamma = m/n in (0, 1] and keep probability p in [0, 1]."""

    gamma: float
    p: float

    def __post_init__(self):
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError(f"gamma must be in (0, 1], got {self.gamma}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must be in [0, 1], got {self.p}")

    @property
    def x(self) -> float:
        """1/gamma - 1 = n/m - 1, the large-n Welch floor scale."""
        return 1.0 / self.gamma - 1.0


@dataclass(frozen=True)
class ManovaSupport:
    r_minus: float
    r_plus: float
    atom_location: float
    atom_weight: float


def support(params: ManovaParams) -> ManovaSupport:
    """Bulk endpoints and the atom at 1/gamma with its weight."""
    g, p = params.gamma, params.p
    a = math.sqrt((p / g) * (1.0 - g))
    b = math.sqrt(1.0 - p)
    r_minus = (a - b) ** 2
    r_plus = (a + b) ** 2
    loc = 1.0 / g
    # p + g - 1 cancels badly at the boundaries (1.0 + 0.4 - 1.0 != 0.4);
    # the purely-atomic cases must carry weight exactly 1
    if p == 1.0:
        excess = g
    elif g == 1.0:
        excess = p
    else:
        excess = p + g - 1.0
    weight = min(1.0, excess / min(p, g)) if excess > 0.0 else 0.0
    # 1 - g r+ = (sqrt((1-p)(1-g)) - sqrt(p g))^2 >= 0, so the bulk can touch
    # the atom location (iff p + g = 1) but never cross it.  Guard anyway.
    if r_plus > loc * (1.0 + 1e-12):
        raise ValueError("bulk support exceeds the atom location; invalid parameters")
    return ManovaSupport(r_minus=r_minus, r_plus=r_plus, atom_location=loc, atom_weight=weight)


def _bulk_width(sup: ManovaSupport) -> float:
    return sup.r_plus - sup.r_minus


def density(t: float, params: ManovaParams) -> float:
    """Continuous bulk density at t; 0 outside the open interval (r-, r+).

    The atom is reported separately through support().  Parameter sets with
    an empty bulk (p in {0, 1}, or gamma = 1) raise AtomicOnlyError.
    """
    sup = support(params)
    if params.p <= 0.0 or params.p >= 1.0 or _bulk_width(sup) <= _DEGENERATE_WIDTH:
        raise AtomicOnlyError("no continuous bulk for these parameters")
    t = float(t)
    if t <= sup.r_minus or t >= sup.r_plus:
        return 0.0
    g = params.gamma
    num = g * math.sqrt((t - sup.r_minus) * (sup.r_plus - t))
    return num / (2.0 * math.pi * t * (1.0 - g * t) * min(params.p, g))


def _bulk_integrand(params: ManovaParams, sup: ManovaSupport):
    """theta-integrand of the bulk law over [0, pi/2], vectorized.

    With t = r- + w sin^2(theta): rho(t) dt = gamma w^2 sin^2 cos^2 /
    (pi t (1 - gamma t) min(p, gamma)) dtheta.  sin^2/t stays finite when
    r- = 0 and cos^2/(1 - gamma t) stays finite when r+ = 1/gamma, provided
    theta is evaluated strictly inside (0, pi/2) -- Gauss nodes are.
    """
    g, p = params.gamma, params.p
    w = _bulk_width(sup)
    edge_plus = (math.sqrt((1.0 - p) * (1.0 - g)) - math.sqrt(p * g)) ** 2
    scale = g * w * w / (math.pi * min(p, g))

    def fn(theta, f=None):
        s2 = np.sin(theta) ** 2
        c2 = np.cos(theta) ** 2
        t = sup.r_minus + w * s2
        # theta = 0 with r- = 0 gives t = 0 and a zero numerator; clamp the
        # denominator so the 0/0 resolves to the correct limit 0
        val = scale * s2 * c2 / (np.maximum(t, 1e-300) * (edge_plus + g * w * c2))
        return val if f is None else val * f(t)

    return fn


def _composite(fn, panels: int) -> float:
    edges = np.linspace(0.0, _HALF_PI, panels + 1)
    half = 0.5 * (edges[1] - edges[0])
    centers = edges[:-1] + half
    pts = centers[:, None] + half * _NODES[None, :]
    per_panel = fn(pts.reshape(-1)).reshape(panels, -1) @ _WEIGHTS
    return half * float(per_panel.sum())


def _adaptive(fn, tol: float) -> tuple:
    """Panel-doubling composite Gauss-Legendre; (value, |refinement change|)."""
    panels = 8
    prev = _composite(fn, panels)
    est = math.inf
    while panels < _MAX_PANELS:
        panels *= 2
        cur = _composite(fn, panels)
        est = abs(cur - prev)
        if est <= tol:
            return cur, est
        prev = cur
    raise QuadratureError("quadrature did not reach the requested tolerance", est)


def bulk_mass(params: ManovaParams) -> float:
    """Probability carried by the continuous bulk (1 - atom_weight in exact
    arithmetic); 0 when the bulk is empty."""
    sup = support(params)
    if params.p in (0.0, 1.0) or _bulk_width(sup) <= _DEGENERATE_WIDTH:
        return 0.0
    val, _ = _adaptive(_bulk_integrand(params, sup), 1e-9)
    return val


def moment_closed(params: ManovaParams, d: int) -> float:
    """Closed-form d-th moment (d <= 4), normalized by full dimension n.

    At p = 1 these collapse to (x + 1)^(d-1) = (n/m)^(d-1); at gamma = 1
    (x = 0) every order equals p.
    """
    x, p = params.x, params.p
    if d == 1:
        return p
    if d == 2:
        return p + p * p * x
    if d == 3:
        return p + 3.0 * p**2 * x + p**3 * (x * x - x)
    if d == 4:
        return (
            p
            + 6.0 * p**2 * x
            + p**3 * (6.0 * x * x - 4.0 * x)
            + p**4 * (x**3 - 3.0 * x * x + x)
        )
    raise ValueError("moment order must be 1..4 (no closed form shipped above 4)")


def moment_numeric(params: ManovaParams, d: int, tol: float = 1e-8) -> float:
    """Quadrature oracle for the d-th moment:
    min(p, gamma) * (integral of t^d rho(t) dt + atom_weight / gamma^d)."""
    if d < 1:
        raise ValueError("moment order must be a positive integer")
    minpg = min(params.p, params.gamma)
    if minpg <= 0.0:
        return 0.0
    sup = support(params)
    atom = sup.atom_weight * sup.atom_location**d
    if _bulk_width(sup) <= _DEGENERATE_WIDTH:
        bulk = 0.0
    else:
        fn = _bulk_integrand(params, sup)
        bulk, _ = _adaptive(lambda th: fn(th, lambda t: t**d), tol)
    return minpg * (bulk + atom)


def delta_correction(params: ManovaParams, d: int, n: int) -> float:
    """Finite-size bound correction: 0 for d = 2, 3 and
    p^2 (1-p)^2 x^2 / (n - 1) for d = 4; vanishes as n grows."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if d not in (2, 3, 4):
        raise ValueError("order must be 2..4")
    if d < 4:
        return 0.0
    p, x = params.p, params.x
    return (p * (1.0 - p)) ** 2 * x * x / (n - 1.0)


# Cached cumulative bulk tables keyed by (gamma, p): panel edges in theta and
# prefix sums of per-panel integrals, refined until the total stabilizes.
_TABLE_CACHE: dict = {}


def _bulk_table(params: ManovaParams):
    key = (params.gamma, params.p)
    tab = _TABLE_CACHE.get(key)
    if tab is not None:
        return tab
    sup = support(params)
    fn = _bulk_integrand(params, sup)
    panels = _TABLE_MIN_PANELS
    prev = None
    while True:
        edges = np.linspace(0.0, _HALF_PI, panels + 1)
        half = 0.5 * (edges[1] - edges[0])
        pts = (edges[:-1] + half)[:, None] + half * _NODES[None, :]
        per_panel = half * (fn(pts.reshape(-1)).reshape(panels, -1) @ _WEIGHTS)
        total = float(per_panel.sum())
        if prev is not None and abs(total - prev) <= 1e-9:
            break
        if panels >= _MAX_PANELS:
            raise QuadratureError(
                "cumulative table did not converge",
                abs(total - prev) if prev is not None else math.inf,
            )
        prev = total
        panels *= 2
    prefix = np.concatenate([[0.0], np.cumsum(per_panel)])
    if len(_TABLE_CACHE) > 64:
        _TABLE_CACHE.clear()
    tab = (sup, fn, edges, prefix)
    _TABLE_CACHE[key] = tab
    return tab


def cdf_many(ts, params: ManovaParams, left: bool = False) -> np.ndarray:
    """Full-law CDF (bulk quadrature plus atom step) at each t, vectorized.

    left=True returns the left limit P(X < t) instead of P(X <= t); the two
    differ only at point masses.
    """
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    step = (lambda t, a: t > a) if left else (lambda t, a: t >= a)
    if params.p == 0.0:
        # degenerate law: everything erased, unit mass at 0
        return step(ts, 0.0).astype(float)
    sup = support(params)
    w = _bulk_width(sup)
    if params.p >= 1.0 or w <= _DEGENERATE_WIDTH:
        out = (1.0 - sup.atom_weight) * step(ts, sup.r_minus)
        out = out + sup.atom_weight * step(ts, sup.atom_location)
        return out
    _, fn, edges, prefix = _bulk_table(params)
    ratio = np.clip((ts - sup.r_minus) / w, 0.0, 1.0)
    theta = np.arcsin(np.sqrt(ratio))
    j = np.clip(np.searchsorted(edges, theta, side="right") - 1, 0, len(edges) - 2)
    lo = edges[j]
    half = 0.5 * (theta - lo)
    pts = (lo + half)[:, None] + half[:, None] * _NODES[None, :]
    partial = (fn(pts.reshape(-1)).reshape(ts.size, -1) @ _WEIGHTS) * half
    bulk = prefix[j] + partial
    bulk[ts <= sup.r_minus] = 0.0
    bulk[ts >= sup.r_plus] = prefix[-1]
    out = bulk + sup.atom_weight * step(ts, sup.atom_location)
    return np.clip(out, 0.0, 1.0)


def cdf(t: float, params: ManovaParams) -> float:
    """Scalar convenience wrapper over cdf_many."""
    return float(cdf_many(np.array([float(t)]), params)[0])


def quantile_many(qs, params: ManovaParams) -> np.ndarray:
    """Generalized inverse of cdf (for inverse-transform sampling).

    Probability levels falling in the atom's mass map to 1/gamma; bulk
    levels are inverted on the cached cumulative table (piecewise-linear in
    theta, resolution well below any sampling noise at desk scale).
    """
    qs = np.atleast_1d(np.asarray(qs, dtype=float))
    if np.any((qs < 0.0) | (qs > 1.0)):
        raise ValueError("probability levels must lie in [0, 1]")
    if params.p == 0.0:
        return np.zeros(qs.shape)
    sup = support(params)
    w = _bulk_width(sup)
    if params.p >= 1.0 or w <= _DEGENERATE_WIDTH:
        bulk_w = 1.0 - sup.atom_weight
        return np.where(qs <= bulk_w, sup.r_minus, sup.atom_location)
    _, _, edges, prefix = _bulk_table(params)
    theta = np.interp(qs, prefix, edges)
    t = sup.r_minus + w * np.sin(theta) ** 2
    return np.where(qs <= prefix[-1], t, sup.atom_location)
