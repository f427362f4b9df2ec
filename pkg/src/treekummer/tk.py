"""The tree-Kummer law TK(a, C).

Its density is proportional to

    prod_i s_i**(a_i - 1) * exp(-sum over subtrees S of prod_{i in S} s_i / c_i**(deg_S(i)-1)
                                                       * prod_{jk in S} c_jk).

For any root ``r`` the exponent equals ``sum_m c_m * phi_forward(C, r, s)_m``,
and ``phi_forward`` sends a TK vector to independent coordinates: a Gamma law
at the root and (rescaled) Kummer laws elsewhere.  Sampling runs that
statement backwards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import scalar
from .errors import InputError, InvalidParameter
from .scalar import GammaParams, KummerParams
from .transform import (
    ParamMatrix,
    _positive,
    log_jacobian_inverse,
    param_matrix_from_json,
    phi_forward,
    phi_inverse,
    subtree_sum,
    weighted_sum,
)
from .trees import Tree, root_tree, tree_from_json


@dataclass(frozen=True)
class TkDistribution:
    a: tuple[float, ...]
    C: ParamMatrix

    def __post_init__(self):
        a = tuple(float(v) for v in self.a)
        if len(a) != self.C.tree.size:
            raise InvalidParameter(f"a has {len(a)} entries, tree has {self.C.tree.size} vertices")
        for i, v in enumerate(a):
            if not (v > 0 and math.isfinite(v)):
                raise InvalidParameter(f"a[{i}] = {v} must be finite and > 0")
        object.__setattr__(self, "a", a)

    @property
    def tree(self) -> Tree:
        return self.C.tree

    @property
    def p(self) -> int:
        return self.C.tree.size

    def to_json(self) -> dict:
        return {"tree": self.tree.to_json(), "a": list(self.a), **self.C.to_json()}


def tk_from_json(obj: dict) -> TkDistribution:
    """Parse ``{"tree": {...}, "a": [...], "c_diag": [...], "c_edge": [...]}``."""
    if not isinstance(obj, dict):
        raise InputError("TK spec must be a JSON object")
    for key in ("tree", "a", "c_diag"):
        if key not in obj:
            raise InputError(f'TK spec is missing field "{key}"')
    tree = tree_from_json(obj["tree"])
    C = param_matrix_from_json(tree, obj)
    return TkDistribution(tuple(obj["a"]), C)


@dataclass(frozen=True)
class ComponentLaw:
    """Law of one transformed coordinate.

    ``scale_factor * X_(vertex)`` follows ``params``; the factor is 1 at
    the root and ``c_{parent,i} / c_parent`` elsewhere.
    """

    vertex: int
    kind: Literal["gamma", "kummer"]
    params: GammaParams | KummerParams
    scale_factor: float

    def cdf(self, x):
        return scalar.cdf(self.params, self.scale_factor * np.asarray(x, dtype=float))

    def log_density(self, x):
        x = np.asarray(x, dtype=float)
        return scalar.log_density(self.params, self.scale_factor * x) + math.log(self.scale_factor)

    def sample(self, rng, n: int) -> np.ndarray:
        return scalar.sample(self.params, rng, n) / self.scale_factor


def component_laws(d: TkDistribution, r: int, transform: ParamMatrix | None = None) -> list[ComponentLaw]:
    """Laws of the coordinates of ``phi_forward(transform, r, S)`` for ``S ~ d``.

    ``transform`` defaults to ``d.C``.  It may also be any positive multiple
    ``C / c`` of ``d.C``; the rates of every law are then multiplied by
    ``c`` and the shapes are unchanged.
    """
    base = d.C if transform is None else transform
    c = _proportionality(d.C, base)
    dt = root_tree(d.tree, r)
    laws = []
    for i in d.tree.vertices:
        if i == r:
            laws.append(ComponentLaw(i, "gamma", GammaParams(d.a[i], c * base.c_diag[i]), 1.0))
            continue
        par = dt.parent[i]
        cpi = base.c(par, i)
        k = cpi / base.c_diag[par]
        rate = c * base.c_diag[par] * base.c_diag[i] / cpi
        laws.append(ComponentLaw(i, "kummer", KummerParams(d.a[i], d.a[par] - d.a[i], rate), k))
    return laws


def _proportionality(C: ParamMatrix, base: ParamMatrix) -> float:
    if C is base:
        return 1.0
    if C.tree != base.tree:
        raise InvalidParameter("transform parameters belong to a different tree")
    c = C.c_diag[0] / base.c_diag[0]
    ratios = [C.c_diag[i] / base.c_diag[i] for i in C.tree.vertices]
    ratios += [C.c_edge[e] / base.c_edge[e] for e in C.tree.edges]
    if not np.allclose(ratios, c, rtol=1e-12, atol=0):
        raise InvalidParameter("distribution parameters are not a scalar multiple of the transform parameters")
    return c


def tk_log_density_unnorm(d: TkDistribution, s, r: int = 0):
    """Unnormalised log density; the subtree sum is evaluated through the root-``r`` map."""
    s = _positive(s, "s")
    out = np.log(s) @ (np.asarray(d.a) - 1.0) - weighted_sum(d.C, r, s)
    return float(out) if np.ndim(out) == 0 else out


def tk_log_density_unnorm_bruteforce(d: TkDistribution, s):
    """Same as :func:`tk_log_density_unnorm` with the exponent summed over enumerated subtrees."""
    s = _positive(s, "s")
    out = np.log(s) @ (np.asarray(d.a) - 1.0) - subtree_sum(d.C, s)
    return float(out) if np.ndim(out) == 0 else out


def tk_log_density(d: TkDistribution, r: int, s):
    """Normalised log density, by change of variables through the root-``r`` map.

    The value does not depend on ``r``; only the route to it does.
    """
    x = phi_forward(d.C, r, s)
    total = np.zeros(x.shape[:-1])
    for law in component_laws(d, r):
        total = total + law.log_density(x[..., law.vertex])
    total = total - log_jacobian_inverse(d.C, r, x)
    return float(total) if np.ndim(total) == 0 else total


@dataclass(frozen=True, eq=False)
class SampleMatrix:
    """``N x p`` array of positive draws with the seed that produced them."""

    data: np.ndarray
    seed: int | None = None
    root: int | None = None

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        if data.ndim == 1:
            data = data[:, None]
        if data.ndim != 2:
            raise InvalidParameter("sample matrix must be two-dimensional")
        if not np.all(np.isfinite(data)) or np.any(data <= 0):
            raise InvalidParameter("sample entries must be finite and strictly positive")
        data.flags.writeable = False
        object.__setattr__(self, "data", data)

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)

    def column(self, j: int) -> np.ndarray:
        return self.data[:, j]


def _rng_and_seed(rng):
    if isinstance(rng, np.random.Generator):
        return rng, None
    if rng is None:
        seed = int(np.random.SeedSequence().entropy % 2**63)
    else:
        seed = int(rng)
    return np.random.default_rng(seed), seed


def tk_sample(d: TkDistribution, r: int = 0, rng=None, n: int = 1) -> SampleMatrix:
    """``n`` draws from ``d``: independent component laws pushed through the inverse map.

    ``rng`` is a Generator or an integer seed; the seed (if known) is
    stored on the result.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    gen, seed = _rng_and_seed(rng)
    x = np.empty((int(n), d.p))
    for law in component_laws(d, r):
        x[:, law.vertex] = law.sample(gen, int(n))
    return SampleMatrix(phi_inverse(d.C, r, x), seed=seed, root=r)


def scale_params(d: TkDistribution, c: float) -> TkDistribution:
    """``TK(a, c C)``."""
    return TkDistribution(d.a, d.C.scaled(c))
