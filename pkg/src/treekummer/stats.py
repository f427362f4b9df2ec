"""Goodness-of-fit and independence tests used to check distributional claims."""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numba
import numpy as np
from scipy import stats as sps

from .errors import LengthMismatch, NonMonotoneCdf, TooFewSamples
from .scalar import GammaParams, KummerParams, gamma_cdf, gamma_sample, kummer_cdf, kummer_sample
from .transform import involution_T

KS_MIN_N = 10
KOLMOGOROV_TERMS = 100
DCOR_PERMUTATIONS = 200
DCOR_SUBSAMPLE = 2000
DCOR_MIN_N = 50
DCOR_MAX_N = 10_000


@dataclass
class TestReport:
    method: str
    statistic: float
    p_value: float | None
    level: float
    label: str = ""
    seed: int | None = None
    details: dict = field(default_factory=dict)

    __test__ = False  # not a pytest class

    @property
    def reject(self) -> bool:
        if self.p_value is None:
            return bool(self.details.get("reject", False))
        return self.p_value <= self.level

    @property
    def decision(self) -> str:
        return "reject" if self.reject else "accept"

    def to_json(self) -> dict:
        out = asdict(self)
        out["decision"] = self.decision
        return out


# --------------------------------------------------------------------------
# Kolmogorov-Smirnov


def kolmogorov_sf(t: float, terms: int = KOLMOGOROV_TERMS) -> float:
    """``P(K > t)`` for the Kolmogorov distribution, alternating series."""
    if t <= 0:
        return 1.0
    if t < 0.2:
        # the alternating series converges slowly here and the value is 1 to double precision
        return 1.0
    k = np.arange(1, terms + 1)
    val = 2.0 * np.sum((-1.0) ** (k - 1) * np.exp(-2.0 * k**2 * t * t))
    return float(min(max(val, 0.0), 1.0))


def ks_statistic(sample, cdf: Callable) -> float:
    """``sup_x |F_n(x) - F(x)|`` over both one-sided gaps at the sorted sample."""
    x = np.sort(np.asarray(sample, dtype=float))
    n = x.size
    f = np.asarray(cdf(x), dtype=float)
    if np.any(np.diff(f) < -1e-12) or np.any(f < -1e-12) or np.any(f > 1 + 1e-12):
        raise NonMonotoneCdf("cdf is not a nondecreasing map into [0, 1] on the sample")
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))


def ks_test(sample, cdf: Callable, level: float = 0.01, label: str = "") -> TestReport:
    """One-sample KS test with the asymptotic Kolmogorov p-value."""
    n = np.size(sample)
    if n < KS_MIN_N:
        raise TooFewSamples(f"KS test needs at least {KS_MIN_N} observations, got {n}")
    d = ks_statistic(sample, cdf)
    return TestReport("ks", d, kolmogorov_sf(math.sqrt(n) * d), level, label, details={"n": int(n)})


def ks_2samp_test(x, y, level: float = 0.01, label: str = "") -> TestReport:
    """Two-sample KS test, asymptotic p-value with ``n_eff = nm/(n+m)``."""
    x = np.sort(np.asarray(x, dtype=float))
    y = np.sort(np.asarray(y, dtype=float))
    n, m = x.size, y.size
    if min(n, m) < KS_MIN_N:
        raise TooFewSamples(f"two-sample KS needs at least {KS_MIN_N} observations per sample")
    grid = np.concatenate([x, y])
    fx = np.searchsorted(x, grid, side="right") / n
    fy = np.searchsorted(y, grid, side="right") / m
    d = float(np.max(np.abs(fx - fy)))
    n_eff = n * m / (n + m)
    return TestReport("ks2", d, kolmogorov_sf(math.sqrt(n_eff) * d), level, label, details={"n": n, "m": m})


# --------------------------------------------------------------------------
# distance correlation


def _centered_distances(x: np.ndarray) -> np.ndarray:
    a = np.abs(x[:, None] - x[None, :])
    return a - a.mean(axis=0)[None, :] - a.mean(axis=1)[:, None] + a.mean()


@numba.njit(cache=True)
def _cross_term(A, z):
    # sum_ij A_ij |z_i - z_j| with A symmetric; equals n^2 dCov^2 since A is double-centred
    n = z.shape[0]
    acc = 0.0
    for i in range(n):
        zi = z[i]
        row = A[i]
        for j in range(i + 1, n):
            acc += row[j] * abs(zi - z[j])
    return 2.0 * acc


def dcor_statistic(x, y) -> float:
    """Biased (V-statistic) sample distance correlation, in ``[0, 1]``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise LengthMismatch(f"x has {x.size} entries, y has {y.size}")
    A = _centered_distances(x)
    B = _centered_distances(y)
    dcov2 = np.mean(A * B)
    denom = math.sqrt(np.mean(A * A) * np.mean(B * B))
    if denom <= 0:
        return 0.0
    return math.sqrt(max(dcov2, 0.0) / denom)


def permutations_for_level(level: float, minimum: int = DCOR_PERMUTATIONS) -> int:
    """Smallest count ``>= minimum`` whose attainable p-values go down to ``level / 2``."""
    return max(minimum, int(math.ceil(2.0 / level)) - 1)


def distance_correlation(
    x,
    y,
    permutations: int = DCOR_PERMUTATIONS,
    rng=None,
    level: float = 0.05,
    subsample: int | None = None,
    early_stop: bool = True,
    label: str = "",
) -> TestReport:
    """Distance-correlation permutation test of independence.

    The p-value is ``(1 + #{perm stat >= observed}) / (B + 1)``.  With
    ``early_stop`` the permutation loop halts as soon as the count of
    exceedances makes rejection at ``level`` impossible; the accept/reject
    decision is unchanged and the reported p-value is then the sequential
    estimate ``h / L`` (``h`` exceedances after ``L`` permutations).
    """
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.size != y.size:
        raise LengthMismatch(f"x has {x.size} entries, y has {y.size}")
    if x.size < DCOR_MIN_N:
        raise TooFewSamples(f"distance correlation needs at least {DCOR_MIN_N} observations, got {x.size}")
    gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    n_full = x.size
    if subsample is not None and x.size > subsample:
        idx = np.sort(gen.choice(x.size, size=subsample, replace=False))
        x, y = x[idx], y[idx]
    if x.size > DCOR_MAX_N:
        raise TooFewSamples(f"{x.size} rows exceed the O(n^2) limit {DCOR_MAX_N}; pass subsample=")

    A = _centered_distances(x)
    B = _centered_distances(y)
    n = x.size
    observed = _cross_term(A, y)
    denom = math.sqrt(np.mean(A * A) * np.mean(B * B))
    stat = math.sqrt(max(observed / n**2, 0.0) / denom) if denom > 0 else 0.0

    # rejection needs (1 + count) / (B + 1) <= level
    max_count = math.floor(level * (permutations + 1) + 1e-9) - 1
    count = 0
    done = 0
    tol = 1e-12 * abs(observed) + 1e-300
    for _ in range(permutations):
        if _cross_term(A, y[gen.permutation(n)]) >= observed - tol:
            count += 1
        done += 1
        if early_stop and count > max_count:
            break
    if done == permutations:
        p_value = (1 + count) / (permutations + 1)
    else:
        p_value = count / done
    return TestReport(
        "dcor",
        stat,
        p_value,
        level,
        label,
        details={"n": int(n_full), "n_used": int(n), "permutations": permutations, "permutations_run": done},
    )


# --------------------------------------------------------------------------
# joint contingency test


def chi2_independence_test(data, bins: int = 2, level: float = 0.05, label: str = "") -> TestReport:
    """Chi-square test of mutual independence on a quantile-binned grid.

    Each column is cut into ``bins`` equal-count bins; the ``bins**p`` cell
    counts are compared with the product of marginal frequencies.
    """
    data = np.asarray(data, dtype=float)
    n, p = data.shape
    codes = np.zeros((n, p), dtype=np.int64)
    marg = []
    for j in range(p):
        edges = np.quantile(data[:, j], np.linspace(0, 1, bins + 1)[1:-1])
        codes[:, j] = np.searchsorted(edges, data[:, j], side="right")
        marg.append(np.bincount(codes[:, j], minlength=bins) / n)
    flat = np.ravel_multi_index(codes.T, (bins,) * p)
    observed = np.bincount(flat, minlength=bins**p).astype(float)
    expected = n * np.ones(1)
    for m in marg:
        expected = np.multiply.outer(expected, m)
    expected = expected.ravel()
    ok = expected > 0
    stat = float(np.sum((observed[ok] - expected[ok]) ** 2 / expected[ok]))
    df = bins**p - 1 - p * (bins - 1)
    return TestReport("chi2", stat, float(sps.chi2.sf(stat, df)), level, label, details={"df": df, "n": n})


# --------------------------------------------------------------------------
# batteries


def independence_battery(
    m,
    level: float = 1e-3,
    rng=None,
    permutations: int | None = None,
    subsample: int = DCOR_SUBSAMPLE,
    labels=None,
) -> list[TestReport]:
    """Pairwise dCor tests plus a global chi-square test, Bonferroni-corrected.

    Every report carries the corrected per-test level, so the family rejects
    at ``level`` iff any single report rejects.
    """
    data = np.asarray(m, dtype=float)
    n, p = data.shape
    if p < 2:
        raise TooFewSamples("independence battery needs at least two columns")
    labels = list(range(p)) if labels is None else list(labels)
    pairs = list(itertools.combinations(range(p), 2))
    n_tests = len(pairs) + (1 if p <= 6 else 0)
    per_test = level / n_tests
    B = permutations if permutations is not None else permutations_for_level(per_test)
    seed_seq = rng if isinstance(rng, np.random.SeedSequence) else np.random.SeedSequence(rng)
    streams = seed_seq.spawn(len(pairs))
    reports = []
    for (i, j), ss in zip(pairs, streams):
        reports.append(
            distance_correlation(
                data[:, i],
                data[:, j],
                permutations=B,
                rng=np.random.default_rng(ss),
                level=per_test,
                subsample=subsample,
                label=f"dcor({labels[i]},{labels[j]})",
            )
        )
    if p <= 6:
        reports.append(chi2_independence_test(data, bins=2, level=per_test, label="chi2(all)"))
    return reports


def any_reject(reports) -> bool:
    return any(r.reject for r in reports)


def hv15_check(a: float, b: float, c_rate: float, n: int, rng=None, level: float = 1e-3) -> list[TestReport]:
    """Monte Carlo check of the Kummer-Gamma involution property.

    ``X ~ K(a, b-a, c)`` and ``Y ~ G(b, c)`` independent; ``(U, V) = T(X, Y)``
    should have independent ``U ~ K(b, a-b, c)`` and ``V ~ G(a, c)``.
    Returns the KS report for ``U``, the KS report for ``V`` and the dCor
    report for ``(U, V)``, each at ``level``.
    """
    ss = rng if isinstance(rng, np.random.SeedSequence) else np.random.SeedSequence(rng)
    s_x, s_y, s_perm = ss.spawn(3)
    x = kummer_sample(KummerParams(a, b - a, c_rate), np.random.default_rng(s_x), n)
    y = gamma_sample(GammaParams(b, c_rate), np.random.default_rng(s_y), n)
    u, v = involution_T(x, y)
    per_test = level
    pu = KummerParams(b, a - b, c_rate)
    pv = GammaParams(a, c_rate)
    return [
        ks_test(u, lambda t: kummer_cdf(pu, t), level=per_test, label="U ~ K(b, a-b, c)"),
        ks_test(v, lambda t: gamma_cdf(pv, t), level=per_test, label="V ~ G(a, c)"),
        distance_correlation(
            u,
            v,
            permutations=permutations_for_level(per_test),
            rng=np.random.default_rng(s_perm),
            level=per_test,
            subsample=DCOR_SUBSAMPLE,
            label="dcor(U,V)",
        ),
    ]
