"""Scalar Kummer and Gamma laws on (0, inf).

Kummer ``K(alpha, beta, gamma)`` has density proportional to
``x**(alpha-1) * (1+x)**-(alpha+beta) * exp(-gamma*x)``; Gamma
``G(alpha, gamma)`` is the shape/rate law.  Densities are computed in log
space throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, optimize, special

from .errors import InvalidParameter, NonPositiveInput, QuadratureNotConverged

NORM_RTOL = 1e-10

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(12)


def _check_positive(x, what: str = "x") -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise NonPositiveInput(f"{what} must be finite and strictly positive")
    return arr


def _as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


@dataclass(frozen=True)
class KummerParams:
    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise InvalidParameter(f"Kummer {name} must be finite")
            object.__setattr__(self, name, v)
        if self.alpha <= 0 or self.gamma <= 0:
            raise InvalidParameter(
                f"Kummer needs alpha > 0 and gamma > 0, got alpha={self.alpha}, gamma={self.gamma}"
            )

    @property
    def m(self) -> float:
        """Exponent of ``(1+x)`` in the denominator."""
        return self.alpha + self.beta


@dataclass(frozen=True)
class GammaParams:
    alpha: float
    gamma: float

    def __post_init__(self):
        for name in ("alpha", "gamma"):
            v = float(getattr(self, name))
            if not math.isfinite(v) or v <= 0:
                raise InvalidParameter(f"Gamma {name} must be finite and > 0, got {v}")
            object.__setattr__(self, name, v)


@dataclass(frozen=True)
class NormalizedDist:
    params: KummerParams | GammaParams
    log_norm_const: float
    norm_abs_err: float

    @property
    def norm_const(self) -> float:
        return math.exp(self.log_norm_const)


# --------------------------------------------------------------------------
# Kummer density and normalisation


def kummer_log_density_unnorm(p: KummerParams, x):
    x = _check_positive(x)
    out = (p.alpha - 1.0) * np.log(x) - p.m * np.log1p(x) - p.gamma * x
    return float(out) if out.ndim == 0 else out


def _log_xf(p: KummerParams, y):
    """log of ``x * f(x)`` at ``x = exp(y)``: the integrand in ``y = log x``."""
    y = np.asarray(y, dtype=float)
    return p.alpha * y - p.m * np.logaddexp(0.0, y) - p.gamma * np.exp(y)


def _log_xf_peak(p: KummerParams) -> float:
    # d/dy of _log_xf is alpha - m*sigmoid(y) - gamma*e^y, which has a single zero
    def slope(y):
        return p.alpha - p.m * special.expit(y) - p.gamma * math.exp(y)

    hi = math.log((p.alpha + abs(p.m)) / p.gamma) + 1.0
    lo = hi - 10.0
    while slope(lo) <= 0:
        lo -= 10.0
    return optimize.brentq(slope, lo, hi, xtol=1e-12)


@lru_cache(maxsize=1024)
def kummer_norm_const(p: KummerParams) -> NormalizedDist:
    """Normalising constant of the Kummer density by adaptive quadrature.

    The integral is split at ``x = 1``.  On ``(0, 1]`` the endpoint
    singularity of ``x**(alpha-1)`` is removed by ``u = x**alpha`` when
    ``alpha < 1``; ``[1, inf)`` is handled by QUADPACK's infinite-range
    rule.  Raises :class:`QuadratureNotConverged` if the combined error
    estimate exceeds ``1e-10`` relative.
    """
    a, m, g = p.alpha, p.m, p.gamma
    opts = dict(epsabs=0.0, epsrel=1e-13, limit=500)

    if a < 1.0:
        def left(u):
            x = u ** (1.0 / a)
            return math.exp(-m * math.log1p(x) - g * x) / a
    else:
        def left(x):
            if x == 0.0:
                return 0.0 if a > 1.0 else 1.0
            return math.exp((a - 1.0) * math.log(x) - m * math.log1p(x) - g * x)

    y_peak = _log_xf_peak(p)
    shift = max(float(_log_xf(p, y_peak)), 0.0)

    def right(x):
        return math.exp((a - 1.0) * math.log(x) - m * math.log1p(x) - g * x - shift)

    with np.errstate(all="ignore"):
        i1, e1 = integrate.quad(left, 0.0, 1.0, **opts)
        i2, e2 = integrate.quad(right, 1.0, np.inf, **opts)
    scale = math.exp(shift)
    total = i1 + i2 * scale
    err = e1 + e2 * scale
    if not (total > 0 and math.isfinite(total)) or err / total > NORM_RTOL:
        raise QuadratureNotConverged(
            f"Kummer normalisation for {p}: integral {total!r}, error estimate {err!r}"
        )
    return NormalizedDist(p, math.log(total), err)


def kummer_norm_const_hyperu(p: KummerParams, dps: int = 40) -> float:
    """``Gamma(alpha) * U(alpha, 1 - beta, gamma)`` in high precision.

    Closed-form route to the normalising constant via the confluent
    hypergeometric function of the second kind; kept as a cross-check.
    """
    import mpmath

    with mpmath.workdps(dps):
        val = mpmath.gamma(p.alpha) * mpmath.hyperu(p.alpha, 1 - p.beta, p.gamma)
        return float(val)


def kummer_log_density(p: KummerParams, x):
    return kummer_log_density_unnorm(p, x) - kummer_norm_const(p).log_norm_const


class _KummerCdfTable:
    """Cumulative integral of the Kummer density on a panel grid in ``log x``.

    In ``y = log x`` the integrand ``x f(x)`` is smooth and bounded for every
    parameter choice, so fixed Gauss-Legendre panels are accurate to
    rounding.  Panels are uniform in ``y`` below ``x = 1/gamma`` and uniform
    in ``x`` above it, where the exponential factor sets the scale.
    """

    TAIL = 75.0  # log-units below the peak treated as zero mass

    def __init__(self, p: KummerParams):
        self.params = p
        y0 = _log_xf_peak(p)
        self.peak = float(_log_xf(p, y0))
        floor = self.peak - self.TAIL
        y_lo, y_hi = self._bound(y0, -1.0, floor), self._bound(y0, 1.0, floor)

        width = 0.2 / math.sqrt(max(1.0, (abs(p.m) + p.alpha) / 4.0))
        y_c = min(max(-math.log(p.gamma), y_lo), y_hi)
        left = np.linspace(y_lo, y_c, max(2, int(math.ceil((y_c - y_lo) / width)) + 1))
        if y_hi > y_c:
            x_c, x_hi = math.exp(y_c), math.exp(y_hi)
            dx = width / p.gamma
            right = np.log(np.linspace(x_c, x_hi, max(2, int(math.ceil((x_hi - x_c) / dx)) + 1)))
            edges = np.concatenate([left, right[1:]])
        else:
            edges = left
        self.edges = edges
        panel = self._integrate(edges[:-1], edges[1:])
        self.cum = np.concatenate([[0.0], np.cumsum(panel)])
        self.total = float(self.cum[-1])

    def _bound(self, y0: float, direction: float, floor: float) -> float:
        # log x f(x) is unimodal in y, so bracket by doubling then bisect
        step = 1.0
        while _log_xf(self.params, y0 + direction * step) > floor:
            step *= 2.0
        def excess(t):
            return float(_log_xf(self.params, y0 + direction * t)) - floor
        return y0 + direction * optimize.brentq(excess, 0.0, step, xtol=1e-6)

    def _integrate(self, a, b):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        half = 0.5 * (b - a)
        mid = 0.5 * (b + a)
        y = mid[..., None] + half[..., None] * _GL_NODES
        vals = np.exp(_log_xf(self.params, y) - self.peak)
        return half * (vals @ _GL_WEIGHTS)

    @property
    def log_norm_const(self) -> float:
        return math.log(self.total) + self.peak

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        pos = x > 0
        with np.errstate(divide="ignore"):
            y = np.log(np.where(pos, x, 1.0))
        inside = pos & (y > self.edges[0]) & (y < self.edges[-1])
        out[pos & (y >= self.edges[-1])] = 1.0
        if np.any(inside):
            yi = y[inside]
            idx = np.searchsorted(self.edges, yi, side="right") - 1
            idx = np.clip(idx, 0, len(self.edges) - 2)
            partial = self._integrate(self.edges[idx], yi)
            out[inside] = (self.cum[idx] + partial) / self.total
        return np.clip(out, 0.0, 1.0)


@lru_cache(maxsize=1024)
def _cdf_table(p: KummerParams) -> _KummerCdfTable:
    return _KummerCdfTable(p)


def kummer_cdf(p: KummerParams, x):
    """``P(X <= x)`` for ``X ~ K(alpha, beta, gamma)``; vectorised over ``x``."""
    out = _cdf_table(p).cdf(x)
    return float(out) if out.ndim == 0 else out


# --------------------------------------------------------------------------
# Kummer rejection sampler


def _log_sup_ratio(d: float, m: float, e: float) -> float:
    """log sup over x > 0 of ``x**d * (1+x)**-m * exp(-e*x)``, d, e >= 0.

    Returns ``inf`` when the ratio is unbounded.
    """
    if e > 0:
        if d > 0:
            b = m + e - d
            disc = math.sqrt(b * b + 4.0 * e * d)
            x = 2.0 * d / (b + disc) if b > 0 else (disc - b) / (2.0 * e)
        elif m + e >= 0:
            return 0.0
        else:
            x = -(m + e) / e
    else:
        if d == 0:
            return 0.0 if m >= 0 else math.inf
        if m > d:
            x = d / (m - d)
        elif m == d:
            return 0.0
        else:
            return math.inf
    return d * math.log(x) - m * math.log1p(x) - e * x


@dataclass(frozen=True)
class KummerEnvelope:
    """Gamma proposal ``G(shape, rate)`` dominating a Kummer density.

    The ratio of unnormalised densities is
    ``x**(alpha-shape) * (1+x)**-m * exp(-(gamma-rate)*x)`` and
    ``log_bound`` is the log of its supremum.
    """

    params: KummerParams
    shape: float
    rate: float
    log_bound: float

    @property
    def log_acceptance(self) -> float:
        log_zq = special.gammaln(self.shape) - self.shape * math.log(self.rate)
        return kummer_norm_const(self.params).log_norm_const - self.log_bound - log_zq

    @property
    def acceptance(self) -> float:
        return math.exp(self.log_acceptance)

    def log_ratio(self, x):
        p = self.params
        return (
            (p.alpha - self.shape) * np.log(x)
            - p.m * np.log1p(x)
            - (p.gamma - self.rate) * x
            - self.log_bound
        )

    def sample(self, rng: np.random.Generator, n: int) -> tuple[np.ndarray, int]:
        """Return ``n`` accepted draws and the number of proposals used."""
        out = np.empty(n)
        have = 0
        proposed = 0
        acc = max(self.acceptance, 1e-6)
        while have < n:
            batch = int(min(1.2 * (n - have) / acc + 16, 1e7))
            x = rng.gamma(self.shape, 1.0 / self.rate, size=batch)
            u = rng.random(batch)
            pos = x > 0
            with np.errstate(divide="ignore"):
                ok = pos & (np.log(u) < self.log_ratio(np.where(pos, x, 1.0)))
            idx = np.flatnonzero(ok)
            take = min(idx.size, n - have)
            # proposals are consumed up to the last draw actually kept
            proposed += int(idx[take - 1]) + 1 if take < idx.size else batch
            out[have : have + take] = x[idx[:take]]
            have += take
        return out, proposed


_SHAPE_FACTORS = tuple(k / 8 for k in range(8, 0, -1))
_RATE_FACTORS = (1.0, 0.95, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1)


@lru_cache(maxsize=1024)
def kummer_envelope(p: KummerParams) -> KummerEnvelope:
    """Best Gamma envelope from a small deterministic family.

    The family contains ``G(alpha, gamma)`` (accept with ``(1+x)**-m``) for
    ``m >= 0`` and ``G(alpha, gamma/2)`` for ``m < 0``, plus proposals with
    smaller shape and rate that keep the ratio bounded; the one with the
    largest analytic acceptance probability is returned.
    """
    shapes = {p.alpha * f for f in _SHAPE_FACTORS}
    if 0 < p.alpha - p.m < p.alpha:
        shapes.add(p.alpha - p.m)
    best = None
    best_score = -math.inf
    log_z = kummer_norm_const(p).log_norm_const
    for shape in sorted(shapes, reverse=True):
        for f in _RATE_FACTORS:
            rate = p.gamma * f
            lb = _log_sup_ratio(p.alpha - shape, p.m, p.gamma - rate)
            if not math.isfinite(lb):
                continue
            score = log_z - lb - (special.gammaln(shape) - shape * math.log(rate))
            if score > best_score + 1e-12:
                best_score = score
                best = KummerEnvelope(p, shape, rate, lb)
    assert best is not None  # (alpha, gamma/2) is always bounded
    return best


def kummer_sample(p: KummerParams, rng, n: int) -> np.ndarray:
    """``n`` i.i.d. draws from ``K(alpha, beta, gamma)`` by rejection."""
    if n < 1:
        raise ValueError("n must be >= 1")
    draws, _ = kummer_envelope(p).sample(_as_rng(rng), int(n))
    return draws


# --------------------------------------------------------------------------
# Gamma


def gamma_norm_const(p: GammaParams) -> NormalizedDist:
    return NormalizedDist(p, float(special.gammaln(p.alpha) - p.alpha * math.log(p.gamma)), 0.0)


def gamma_log_density_unnorm(p: GammaParams, x):
    x = _check_positive(x)
    out = (p.alpha - 1.0) * np.log(x) - p.gamma * x
    return float(out) if out.ndim == 0 else out


def gamma_log_density(p: GammaParams, x):
    return gamma_log_density_unnorm(p, x) - gamma_norm_const(p).log_norm_const


def gamma_cdf(p: GammaParams, x):
    x = np.asarray(x, dtype=float)
    out = special.gammainc(p.alpha, p.gamma * np.clip(x, 0.0, None))
    return float(out) if out.ndim == 0 else out


def gamma_sample(p: GammaParams, rng, n: int) -> np.ndarray:
    if n < 1:
        raise ValueError("n must be >= 1")
    return _as_rng(rng).gamma(p.alpha, 1.0 / p.gamma, size=int(n))


# --------------------------------------------------------------------------
# dispatch helpers used by the multivariate code


def log_density(p: KummerParams | GammaParams, x):
    if isinstance(p, KummerParams):
        return kummer_log_density(p, x)
    return gamma_log_density(p, x)


def cdf(p: KummerParams | GammaParams, x):
    if isinstance(p, KummerParams):
        return kummer_cdf(p, x)
    return gamma_cdf(p, x)


def sample(p: KummerParams | GammaParams, rng, n: int) -> np.ndarray:
    if isinstance(p, KummerParams):
        return kummer_sample(p, rng, n)
    return gamma_sample(p, rng, n)
