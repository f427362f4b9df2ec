"""Undirected trees, rooted orientations and connected-subtree enumeration.

Vertices are 0-based contiguous integers.  Edges are stored as sorted pairs
``(i, j)`` with ``i < j``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    CycleDetected,
    DisconnectedGraph,
    DuplicateEdge,
    SelfLoop,
    SizeOneTree,
    TooLarge,
    TreeError,
    VertexOutOfRange,
)

SUBTREE_CAP = 20


def _edge(i: int, j: int) -> tuple[int, int]:
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class Tree:
    """A connected acyclic graph.

    Top-level trees built by :func:`validate_tree` have vertices
    ``0..p-1``; subtrees returned by :func:`enumerate_subtrees` keep the
    labels of the tree they were cut from.
    """

    vertices: tuple[int, ...]
    edges: frozenset[tuple[int, int]]

    @property
    def size(self) -> int:
        return len(self.vertices)

    @cached_property
    def adjacency(self) -> dict[int, tuple[int, ...]]:
        adj: dict[int, list[int]] = {v: [] for v in self.vertices}
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        return {v: tuple(sorted(nb)) for v, nb in adj.items()}

    def neighbors(self, i: int) -> tuple[int, ...]:
        return self.adjacency[i]

    def degree(self, i: int) -> int:
        return len(self.adjacency[i])

    @cached_property
    def degrees(self) -> dict[int, int]:
        return {v: len(nb) for v, nb in self.adjacency.items()}

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def to_json(self) -> dict:
        return {"vertices": self.size, "edges": [list(e) for e in self.sorted_edges()]}


@dataclass(frozen=True)
class DirectedTree:
    """A tree oriented from ``root`` towards the leaves.

    ``parent[root]`` is ``-1``.  ``depth_order`` lists vertices by
    decreasing distance from the root (ties by vertex id), so every vertex
    comes after all of its children.
    """

    skeleton: Tree
    root: int
    parent: tuple[int, ...]
    children: tuple[tuple[int, ...], ...]
    depth_order: tuple[int, ...]
    depth: tuple[int, ...]

    def edges(self) -> frozenset[tuple[int, int]]:
        """Forget the orientation and return the undirected edge set."""
        return frozenset(_edge(v, p) for v, p in enumerate(self.parent) if p >= 0)

    def non_root(self) -> tuple[int, ...]:
        return tuple(v for v in self.skeleton.vertices if v != self.root)


def validate_tree(vertices: int | Iterable[int], edges: Iterable[Sequence[int]]) -> Tree:
    """Build a :class:`Tree` from a vertex count (or id list) and an edge list.

    Raises the specific :class:`~treekummer.errors.TreeError` subclass
    naming the offending edge or vertex.
    """
    if isinstance(vertices, (int, np.integer)):
        p = int(vertices)
        verts = tuple(range(p))
    else:
        verts = tuple(int(v) for v in vertices)
        p = len(verts)
        if verts != tuple(range(p)):
            raise TreeError(f"vertex ids must be contiguous from 0, got {list(verts)}")
    if p < 1:
        raise TreeError("a tree needs at least one vertex")

    seen: set[tuple[int, int]] = set()
    edge_list: list[tuple[int, int]] = []
    for raw in edges:
        if len(raw) != 2:
            raise TreeError(f"edge {list(raw)} does not have two endpoints")
        i, j = int(raw[0]), int(raw[1])
        for v in (i, j):
            if not 0 <= v < p:
                raise VertexOutOfRange(f"edge {[i, j]}: vertex {v} out of range 0..{p - 1}")
        if i == j:
            raise SelfLoop(f"edge {[i, j]} is a self-loop")
        e = _edge(i, j)
        if e in seen:
            raise DuplicateEdge(f"edge {[i, j]} appears more than once")
        seen.add(e)
        edge_list.append(e)

    # union-find: the first edge joining two already-connected vertices closes a cycle
    root = list(range(p))

    def find(v: int) -> int:
        while root[v] != v:
            root[v] = root[root[v]]
            v = root[v]
        return v

    for i, j in edge_list:
        ri, rj = find(i), find(j)
        if ri == rj:
            raise CycleDetected(f"edge {[i, j]} closes a cycle")
        root[ri] = rj

    comp0 = find(0)
    for v in range(p):
        if find(v) != comp0:
            raise DisconnectedGraph(f"vertex {v} is not connected to vertex 0")
    return Tree(verts, frozenset(edge_list))


def tree_from_json(obj: dict) -> Tree:
    """Parse ``{"vertices": p, "edges": [[i, j], ...]}``."""
    if not isinstance(obj, dict) or "vertices" not in obj:
        raise TreeError('tree spec must be an object with "vertices" and "edges"')
    return validate_tree(obj["vertices"], obj.get("edges", []))


def chain(p: int) -> Tree:
    return validate_tree(p, [(i, i + 1) for i in range(p - 1)])


def star(p: int, center: int | None = None) -> Tree:
    """Star on ``p`` vertices; the centre defaults to the last vertex."""
    center = p - 1 if center is None else center
    return validate_tree(p, [(i, center) for i in range(p) if i != center])


def random_tree(p: int, rng: np.random.Generator) -> Tree:
    """Uniform random labelled tree on ``p`` vertices (Prüfer decoding)."""
    if p <= 2:
        return chain(p)
    seq = rng.integers(0, p, size=p - 2)
    degree = np.ones(p, dtype=int)
    for v in seq:
        degree[v] += 1
    edges = []
    for v in seq:
        leaf = int(np.flatnonzero(degree == 1)[0])
        edges.append((leaf, int(v)))
        degree[leaf] -= 1
        degree[v] -= 1
    u, w = np.flatnonzero(degree == 1)
    edges.append((int(u), int(w)))
    return validate_tree(p, edges)


@lru_cache(maxsize=4096)
def root_tree(t: Tree, r: int) -> DirectedTree:
    """Orient ``t`` away from root ``r`` (BFS, children by ascending id)."""
    if r not in t.adjacency:
        raise VertexOutOfRange(f"root {r} is not a vertex of the tree")
    p = max(t.vertices) + 1
    parent = [-2] * p
    depth = [-1] * p
    children: list[list[int]] = [[] for _ in range(p)]
    parent[r], depth[r] = -1, 0
    queue = deque([r])
    while queue:
        u = queue.popleft()
        for w in t.neighbors(u):
            if depth[w] < 0:
                parent[w] = u
                depth[w] = depth[u] + 1
                children[u].append(w)
                queue.append(w)
    order = sorted(t.vertices, key=lambda v: (-depth[v], v))
    return DirectedTree(
        skeleton=t,
        root=r,
        parent=tuple(parent),
        children=tuple(tuple(c) for c in children),
        depth_order=tuple(order),
        depth=tuple(depth),
    )


def leaves(t: Tree) -> list[int]:
    """Vertices of degree one, ascending."""
    if t.size == 1:
        raise SizeOneTree("leaves are undefined for a tree with a single vertex")
    return [v for v in t.vertices if t.degree(v) == 1]


def _subtree(vertices: Iterable[int], edges: Iterable[tuple[int, int]]) -> Tree:
    return Tree(tuple(sorted(vertices)), frozenset(edges))


def enumerate_subtrees(t: Tree, cap: int = SUBTREE_CAP) -> list[Tree]:
    """All nonempty connected vertex-induced subgraphs of ``t``.

    Each subtree is generated once, at its vertex closest to a fixed root:
    a subtree topped at ``m`` is ``m`` plus, for every child, either nothing
    or a subtree topped at that child.
    """
    if t.size > cap:
        raise TooLarge(f"tree has {t.size} vertices, enumeration cap is {cap}")
    dt = root_tree(t, min(t.vertices))
    topped: dict[int, list[tuple[frozenset[int], frozenset[tuple[int, int]]]]] = {}
    for m in dt.depth_order:
        options = []
        for w in dt.children[m]:
            opts = [None]
            opts.extend((vs, es | {_edge(m, w)}) for vs, es in topped[w])
            options.append(opts)
        out = []
        for choice in product(*options):
            vs = {m}
            es: set[tuple[int, int]] = set()
            for part in choice:
                if part is not None:
                    vs |= part[0]
                    es |= part[1]
            out.append((frozenset(vs), frozenset(es)))
        topped[m] = out
    result = [_subtree(vs, es) for m in dt.depth_order for vs, es in topped[m]]
    result.sort(key=lambda s: (s.size, s.vertices))
    return result


def connected_subsets_bruteforce(t: Tree) -> set[frozenset[int]]:
    """Vertex sets of all connected induced subgraphs, by filtering all subsets.

    Exponential in ``t.size``; used as an independent check on
    :func:`enumerate_subtrees`.
    """
    verts = list(t.vertices)
    found = set()
    for mask in range(1, 1 << len(verts)):
        chosen = {verts[k] for k in range(len(verts)) if mask >> k & 1}
        start = next(iter(chosen))
        seen = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for w in t.neighbors(u):
                if w in chosen and w not in seen:
                    seen.add(w)
                    stack.append(w)
        if seen == chosen:
            found.add(frozenset(chosen))
    return found
