"""Parameter matrices on a tree and the rooted maps between them.

For a root ``r`` the forward map replaces each coordinate by

    s_(i) = s_i * prod_{j child of i} (1 + c_ij / c_i * s_(j)),

evaluated from the deepest vertices up.  Its inverse divides by the same
product using the already-transformed child values, so it needs no
recursion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import InputError, InvalidParameter, NonPositiveInput, NonPositiveScale
from .trees import SUBTREE_CAP, Tree, _edge, enumerate_subtrees, root_tree

IDENTITY_RTOL = 1e-12
JACOBIAN_RTOL = 1e-6
FD_REL_STEP = 1e-6


@dataclass(frozen=True, eq=False)
class ParamMatrix:
    """Symmetric matrix ``C`` supported on the diagonal and the tree edges."""

    tree: Tree
    c_diag: tuple[float, ...]
    c_edge: Mapping[tuple[int, int], float] = field(repr=False)

    def __post_init__(self):
        diag = tuple(float(v) for v in self.c_diag)
        if len(diag) != self.tree.size:
            raise InvalidParameter(f"c_diag has {len(diag)} entries, tree has {self.tree.size} vertices")
        for i, v in enumerate(diag):
            if not (v > 0 and math.isfinite(v)):
                raise InvalidParameter(f"c_diag[{i}] = {v} must be finite and > 0")
        edges = {}
        for raw, v in dict(self.c_edge).items():
            e = _edge(int(raw[0]), int(raw[1]))
            if e not in self.tree.edges:
                raise InvalidParameter(f"c_edge given for {list(e)}, which is not a tree edge")
            v = float(v)
            if not (v > 0 and math.isfinite(v)):
                raise InvalidParameter(f"c_edge{list(e)} = {v} must be finite and > 0")
            edges[e] = v
        missing = self.tree.edges - edges.keys()
        if missing:
            raise InvalidParameter(f"c_edge missing for edges {sorted(map(list, missing))}")
        object.__setattr__(self, "c_diag", diag)
        object.__setattr__(self, "c_edge", edges)

    @classmethod
    def constant(cls, tree: Tree, c: float = 1.0) -> "ParamMatrix":
        return cls(tree, (c,) * tree.size, {e: c for e in tree.edges})

    @classmethod
    def from_array(cls, tree: Tree, mat) -> "ParamMatrix":
        mat = np.asarray(mat, dtype=float)
        if not np.allclose(mat, mat.T, rtol=0, atol=0):
            raise InvalidParameter("parameter matrix must be symmetric")
        for i in range(tree.size):
            for j in range(i + 1, tree.size):
                if (i, j) not in tree.edges and mat[i, j] != 0:
                    raise InvalidParameter(f"entry ({i}, {j}) must be zero off the tree edges")
        return cls(tree, tuple(np.diag(mat)), {e: mat[e] for e in tree.edges})

    def c(self, i: int, j: int) -> float:
        if i == j:
            return self.c_diag[i]
        return self.c_edge.get(_edge(i, j), 0.0)

    def ratio(self, i: int, j: int) -> float:
        """``c_ij / c_i``: the coefficient a child ``j`` contributes at ``i``."""
        return self.c_edge[_edge(i, j)] / self.c_diag[i]

    def as_array(self) -> np.ndarray:
        mat = np.diag(np.array(self.c_diag))
        for (i, j), v in self.c_edge.items():
            mat[i, j] = mat[j, i] = v
        return mat

    def scaled(self, c: float) -> "ParamMatrix":
        c = float(c)
        if not (c > 0 and math.isfinite(c)):
            raise NonPositiveScale(f"scale must be > 0, got {c}")
        return ParamMatrix(self.tree, tuple(c * v for v in self.c_diag), {e: c * v for e, v in self.c_edge.items()})

    def __eq__(self, other):
        if not isinstance(other, ParamMatrix):
            return NotImplemented
        return self.tree == other.tree and self.c_diag == other.c_diag and self.c_edge == other.c_edge

    def __hash__(self):
        return hash((self.tree, self.c_diag, tuple(sorted(self.c_edge.items()))))

    def to_json(self) -> dict:
        return {
            "c_diag": list(self.c_diag),
            "c_edge": [{"edge": list(e), "value": self.c_edge[e]} for e in sorted(self.c_edge)],
        }


def param_matrix_from_json(tree: Tree, obj: dict) -> ParamMatrix:
    """Parse ``{"c_diag": [...], "c_edge": [{"edge": [i, j], "value": v}, ...]}``."""
    try:
        diag = obj["c_diag"]
        entries = obj.get("c_edge", [])
        edges = {}
        for k, item in enumerate(entries):
            e = tuple(item["edge"])
            if len(e) != 2:
                raise InputError(f"c_edge[{k}].edge must have two endpoints")
            key = _edge(int(e[0]), int(e[1]))
            if key in edges:
                raise InputError(f"c_edge[{k}]: edge {list(key)} given twice")
            edges[key] = item["value"]
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed parameter matrix: missing or bad field {exc}") from exc
    return ParamMatrix(tree, tuple(diag), edges)


def random_param_matrix(tree: Tree, rng: np.random.Generator, low: float = 0.1, high: float = 10.0) -> ParamMatrix:
    """Entries drawn log-uniformly from ``[low, high]``."""
    lo, hi = math.log(low), math.log(high)
    diag = np.exp(rng.uniform(lo, hi, tree.size))
    edges = {e: float(np.exp(rng.uniform(lo, hi))) for e in tree.sorted_edges()}
    return ParamMatrix(tree, tuple(diag), edges)


def _positive(x, what: str) -> np.ndarray:
    arr = np.array(x, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise NonPositiveInput(f"{what} must be finite and strictly positive")
    return arr


def _check_shape(C: ParamMatrix, arr: np.ndarray, what: str):
    if arr.shape[-1:] != (C.tree.size,):
        raise InvalidParameter(f"{what} has trailing dimension {arr.shape[-1:]}, expected {C.tree.size}")


def phi_forward(C: ParamMatrix, r: int, s) -> np.ndarray:
    """Rooted forward map; ``s`` may be a vector or an ``(N, p)`` array."""
    out = _positive(s, "s")
    _check_shape(C, out, "s")
    dt = root_tree(C.tree, r)
    for i in dt.depth_order:
        for j in dt.children[i]:
            out[..., i] *= 1.0 + C.ratio(i, j) * out[..., j]
    return out


def phi_inverse(C: ParamMatrix, r: int, y) -> np.ndarray:
    y = _positive(y, "y")
    _check_shape(C, y, "y")
    dt = root_tree(C.tree, r)
    out = y.copy()
    for i in C.tree.vertices:
        for j in dt.children[i]:
            out[..., i] /= 1.0 + C.ratio(i, j) * y[..., j]
    return out


def log_jacobian_inverse(C: ParamMatrix, r: int, y):
    """log of the Jacobian determinant of :func:`phi_inverse` at ``y``.

    The derivative is triangular once children are numbered after their
    parents, and each non-root vertex enters exactly one diagonal entry.
    """
    y = _positive(y, "y")
    _check_shape(C, y, "y")
    dt = root_tree(C.tree, r)
    total = np.zeros(y.shape[:-1])
    for i in dt.non_root():
        par = dt.parent[i]
        total -= np.log1p(C.ratio(par, i) * y[..., i])
    return float(total) if total.ndim == 0 else total


def numerical_jacobian(f, y, rel_step: float = FD_REL_STEP) -> np.ndarray:
    """Central-difference Jacobian of ``f`` at ``y`` with step ``rel_step * y_i``."""
    y = np.asarray(y, dtype=float)
    p = y.size
    jac = np.empty((p, p))
    for k in range(p):
        h = rel_step * y[k]
        up, down = y.copy(), y.copy()
        up[k] += h
        down[k] -= h
        jac[:, k] = (f(up) - f(down)) / (up[k] - down[k])
    return jac


def involution_T(x, y):
    """``T(x, y) = (y / (1+x), x (1 + y / (1+x)))``; ``T(T(x, y)) = (x, y)``."""
    x = _positive(x, "x")
    y = _positive(y, "y")
    u = y / (1.0 + x)
    v = x * (1.0 + u)
    if u.ndim == 0:
        return float(u), float(v)
    return u, v


def psi(x, y):
    """``(x, y) -> (x, y / (1+x))``, taking (X, Y) to the 2-chain coordinates."""
    x = _positive(x, "x")
    y = _positive(y, "y")
    return x, y / (1.0 + x)


def psi_inverse(s1, s2):
    s1 = _positive(s1, "s1")
    s2 = _positive(s2, "s2")
    return s1, s2 * (1.0 + s1)


def subtree_weight(C: ParamMatrix, sub: Tree, s) -> np.ndarray:
    """``prod_{i in S} s_i / c_i**(deg_S(i) - 1) * prod_{edges of S} c_jk``."""
    s = np.asarray(s, dtype=float)
    w = np.ones(s.shape[:-1])
    for i in sub.vertices:
        w = w * s[..., i] * C.c_diag[i] ** (1 - sub.degree(i))
    for e in sub.edges:
        w = w * C.c_edge[e]
    return w


def subtree_sum(C: ParamMatrix, s, cap: int = SUBTREE_CAP):
    """Sum of :func:`subtree_weight` over every connected subtree, by enumeration."""
    s = _positive(s, "s")
    _check_shape(C, s, "s")
    total = sum(subtree_weight(C, sub, s) for sub in enumerate_subtrees(C.tree, cap=cap))
    return float(total) if np.ndim(total) == 0 else total


def weighted_sum(C: ParamMatrix, r: int, s):
    """``sum_m c_m * phi_forward(C, r, s)_m``."""
    out = phi_forward(C, r, s) @ np.asarray(C.c_diag)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class IdentityCheck:
    lhs: float
    rhs: float
    rel_err: float


def check_identity(C: ParamMatrix, r: int, s) -> IdentityCheck:
    """Compare ``sum_m c_m s_(m)`` with the brute-force subtree sum."""
    lhs = weighted_sum(C, r, s)
    rhs = subtree_sum(C, s)
    return IdentityCheck(lhs, rhs, abs(lhs - rhs) / rhs)


def check_root_invariance(C: ParamMatrix, s) -> float:
    """Largest relative spread of ``sum_m c_m s_(m)`` over all roots."""
    sums = np.array([weighted_sum(C, r, s) for r in C.tree.vertices])
    return float((sums.max() - sums.min()) / sums.min())
