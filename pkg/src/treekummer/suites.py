"""Randomised and Monte Carlo suites that check a TK specification end to end."""

from __future__ import annotations

import math

import numpy as np

from .stats import any_reject, independence_battery, ks_2samp_test, ks_test
from .tk import TkDistribution, component_laws, tk_sample
from .transform import (
    IDENTITY_RTOL,
    JACOBIAN_RTOL,
    ParamMatrix,
    check_identity,
    check_root_invariance,
    log_jacobian_inverse,
    numerical_jacobian,
    phi_forward,
    phi_inverse,
)
from .trees import leaves

VERIFY_MAX_P = 12


def random_positive(rng: np.random.Generator, p: int, low: float = 0.01, high: float = 100.0) -> np.ndarray:
    """Log-uniform vector on ``[low, high]**p``."""
    return np.exp(rng.uniform(math.log(low), math.log(high), p))


def identity_suite(C: ParamMatrix, trials: int, rng: np.random.Generator, tol: float = IDENTITY_RTOL) -> dict:
    """Subtree-sum identity at every root and root invariance on random inputs."""
    worst_identity = 0.0
    worst_spread = 0.0
    for _ in range(trials):
        s = random_positive(rng, C.tree.size)
        for r in C.tree.vertices:
            worst_identity = max(worst_identity, check_identity(C, r, s).rel_err)
        worst_spread = max(worst_spread, check_root_invariance(C, s))
    return {
        "trials": trials,
        "max_identity_rel_err": worst_identity,
        "max_root_spread": worst_spread,
        "tolerance": tol,
        "identity_pass": worst_identity <= tol,
        "root_invariance_pass": worst_spread <= tol,
    }


def round_trip_suite(C: ParamMatrix, trials: int, rng: np.random.Generator, tol: float = IDENTITY_RTOL) -> dict:
    worst = 0.0
    for _ in range(trials):
        s = random_positive(rng, C.tree.size)
        for r in C.tree.vertices:
            back = phi_inverse(C, r, phi_forward(C, r, s))
            fwd = phi_forward(C, r, phi_inverse(C, r, s))
            worst = max(worst, np.max(np.abs(back - s) / s), np.max(np.abs(fwd - s) / s))
    return {"trials": trials, "max_rel_err": float(worst), "tolerance": tol, "pass": bool(worst <= tol)}


def jacobian_suite(C: ParamMatrix, trials: int, rng: np.random.Generator, tol: float = JACOBIAN_RTOL) -> dict:
    worst = 0.0
    for _ in range(trials):
        y = random_positive(rng, C.tree.size, 0.1, 10.0)
        for r in C.tree.vertices:
            jac = numerical_jacobian(lambda v: phi_inverse(C, r, v), y)
            fd = abs(np.linalg.det(jac))
            exact = math.exp(log_jacobian_inverse(C, r, y))
            worst = max(worst, abs(exact - fd) / exact)
    return {"trials": trials, "max_rel_err": worst, "tolerance": tol, "pass": worst <= tol}


def gof_suite(d: TkDistribution, sample: np.ndarray, roots, level: float) -> dict:
    """KS of every transformed coordinate against its predicted law, Bonferroni over all tests."""
    roots = list(roots)
    per_test = level / (len(roots) * d.p)
    reports = []
    for r in roots:
        x = phi_forward(d.C, r, sample)
        for law in component_laws(d, r):
            reports.append(
                ks_test(x[:, law.vertex], law.cdf, level=per_test, label=f"root={r} vertex={law.vertex} {law.kind}")
            )
    return {"level": level, "reports": [rep.to_json() for rep in reports], "pass": not any_reject(reports)}


def independence_suite(d: TkDistribution, sample: np.ndarray, roots, level: float, seed_seq) -> dict:
    """Independence battery on ``phi_forward(C, r, S)`` for each root, Bonferroni over roots."""
    roots = list(roots)
    streams = seed_seq.spawn(len(roots))
    per_root = level / len(roots)
    out = {}
    ok = True
    for r, ss in zip(roots, streams):
        reports = independence_battery(phi_forward(d.C, r, sample), per_root, rng=ss)
        out[str(r)] = [rep.to_json() for rep in reports]
        ok &= not any_reject(reports)
    return {"level": level, "roots": roots, "reports": out, "pass": ok}


def root_agnostic_suite(d: TkDistribution, n: int, roots: tuple[int, int], seed_seq, level: float) -> dict:
    """Two-sample KS per coordinate between samples drawn through two different roots."""
    s1, s2 = seed_seq.spawn(2)
    a = tk_sample(d, roots[0], np.random.default_rng(s1), n).data
    b = tk_sample(d, roots[1], np.random.default_rng(s2), n).data
    per_test = level / d.p
    reports = [ks_2samp_test(a[:, j], b[:, j], level=per_test, label=f"vertex={j}") for j in range(d.p)]
    return {"roots": list(roots), "reports": [r.to_json() for r in reports], "pass": not any_reject(reports)}


def verify_all(d: TkDistribution, n: int, seed: int, level: float = 1e-3, trials: int = 200) -> dict:
    """Run every deterministic and Monte Carlo check for one TK specification.

    The GOF and independence suites use every leaf as root (plus one
    internal vertex when there is one) on a single shared sample.
    """
    if d.p > VERIFY_MAX_P:
        raise ValueError(f"verify-all supports trees with at most {VERIFY_MAX_P} vertices")
    ss = np.random.SeedSequence(seed)
    s_id, s_rt, s_jac, s_sample, s_ind, s_agn = ss.spawn(6)
    results: dict[str, dict] = {}
    results["identity"] = identity_suite(d.C, trials, np.random.default_rng(s_id))
    results["round_trip"] = round_trip_suite(d.C, trials, np.random.default_rng(s_rt))
    results["jacobian"] = jacobian_suite(d.C, max(1, trials // 10), np.random.default_rng(s_jac))

    if d.p >= 2:
        leaf_roots = leaves(d.tree)
        internal = [v for v in d.tree.vertices if v not in leaf_roots]
        roots = leaf_roots + internal[:1]
    else:
        roots = [0]
    sample = tk_sample(d, 0, np.random.default_rng(s_sample), n).data
    results["gof"] = gof_suite(d, sample, roots, level)
    if d.p >= 2:
        results["independence"] = independence_suite(d, sample, roots, level, s_ind)
        results["root_agnostic"] = root_agnostic_suite(d, n, (roots[0], roots[-1]), s_agn, level)

    matrix = {
        "identity": results["identity"]["identity_pass"],
        "root_invariance": results["identity"]["root_invariance_pass"],
        "round_trip": results["round_trip"]["pass"],
        "jacobian": results["jacobian"]["pass"],
        "gof": results["gof"]["pass"],
    }
    if d.p >= 2:
        matrix["independence"] = results["independence"]["pass"]
        matrix["root_agnostic"] = results["root_agnostic"]["pass"]
    return {"pass": all(matrix.values()), "matrix": matrix, "details": results}
