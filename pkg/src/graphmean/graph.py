"""Attributed graphs stored as dense attribute matrices.

A graph of order ``m`` with attributes in ``R^d`` is an ``(m, m, d)`` array: entry
``[i, i]`` holds the attribute of node ``i`` and entry ``[i, j]`` the attribute of
edge ``(i, j)``. Non-edges are exactly the off-diagonal zero vectors, so every graph
is complete and distances can be computed with plain array arithmetic.

An ``AttributedGraph`` stores one representative of its equivalence class; node
permutations produce other representatives of the same abstract graph.
"""

import math
from dataclasses import dataclass

import numpy as np

from graphmean.errors import InvalidArgumentError

EDGE_EPS = 1e-9


@dataclass(frozen=True, eq=False)
class AttributedGraph:
    attrs: np.ndarray
    directed: bool = False

    def __post_init__(self):
        a = np.array(self.attrs, dtype=np.float64)
        if a.ndim == 2:
            a = a[:, :, None]
        if a.ndim != 3 or a.shape[0] != a.shape[1] or a.shape[0] < 1 or a.shape[2] < 1:
            raise InvalidArgumentError(f"attrs must have shape (m, m, d) with m, d >= 1, got {a.shape}")
        if not np.all(np.isfinite(a)):
            raise InvalidArgumentError("attributes must be finite")
        if not self.directed and not np.array_equal(a, a.transpose(1, 0, 2)):
            raise InvalidArgumentError("undirected graph with asymmetric attribute matrix")
        a.setflags(write=False)
        object.__setattr__(self, "attrs", a)
        object.__setattr__(self, "directed", bool(self.directed))

    @property
    def order(self):
        return self.attrs.shape[0]

    @property
    def attr_dim(self):
        return self.attrs.shape[2]

    @property
    def node_attrs(self):
        idx = np.arange(self.order)
        return self.attrs[idx, idx]

    @classmethod
    def zeros(cls, order, attr_dim=1, directed=False):
        return cls(np.zeros((order, order, attr_dim)), directed=directed)

    @classmethod
    def from_parts(cls, nodes, edges=(), directed=False):
        """Build a graph from node attribute vectors and ``(i, j, attr)`` triples.

        Undirected edges are mirrored.
        """
        nodes = np.asarray(nodes, dtype=np.float64)
        if nodes.ndim == 1:
            nodes = nodes[:, None]
        m, d = nodes.shape
        a = np.zeros((m, m, d))
        a[np.arange(m), np.arange(m)] = nodes
        for i, j, attr in edges:
            if i == j:
                raise InvalidArgumentError("self loops live on the diagonal; use node attributes")
            a[i, j] = attr
            if not directed:
                a[j, i] = attr
        return cls(a, directed=directed)

    def equals(self, other):
        """Bitwise equality of the stored representations."""
        return self.directed == other.directed and np.array_equal(self.attrs, other.attrs)

    def __repr__(self):
        kind = "directed" if self.directed else "undirected"
        return f"AttributedGraph(order={self.order}, attr_dim={self.attr_dim}, {kind})"


def _check_same_shape(a, b):
    if a.attrs.shape != b.attrs.shape:
        raise InvalidArgumentError(f"shape mismatch: {a.attrs.shape} vs {b.attrs.shape}")


def as_permutation(p, n=None):
    p = np.asarray(p, dtype=np.intp)
    if p.ndim != 1 or (n is not None and len(p) != n):
        raise InvalidArgumentError(f"permutation of length {n} expected, got {p.shape}")
    if not np.array_equal(np.sort(p), np.arange(len(p))):
        raise InvalidArgumentError("not a bijection")
    return p


def inverse_permutation(p):
    p = as_permutation(p)
    inv = np.empty_like(p)
    inv[p] = np.arange(len(p))
    return inv


def pad(g, n):
    """Extend ``g`` to order ``n`` with isolated zero-attribute nodes."""
    if n < g.order:
        raise InvalidArgumentError(f"cannot pad order-{g.order} graph to {n}")
    if n == g.order:
        return g
    a = np.zeros((n, n, g.attr_dim))
    a[: g.order, : g.order] = g.attrs
    return AttributedGraph(a, directed=g.directed)


def permute(g, p):
    """Relabel nodes so that ``result.attrs[p[i], p[j]] == g.attrs[i, j]``."""
    p = as_permutation(p, g.order)
    inv = np.empty_like(p)
    inv[p] = np.arange(len(p))
    return AttributedGraph(g.attrs[np.ix_(inv, inv)], directed=g.directed)


def scale(g, lam):
    if not math.isfinite(lam):
        raise InvalidArgumentError("scale factor must be finite")
    return AttributedGraph(g.attrs * lam, directed=g.directed)


def inner(a, b):
    _check_same_shape(a, b)
    return float(np.dot(a.attrs.ravel(), b.attrs.ravel()))


def frobenius_distance(a, b):
    """Root of the summed squared differences of two fixed representations."""
    _check_same_shape(a, b)
    diff = (a.attrs - b.attrs).ravel()
    return float(math.sqrt(np.dot(diff, diff)))


def blend(parts):
    """Weighted average of already-aligned representations.

    ``parts`` is a sequence of ``(graph, weight)`` with weights summing to one.
    """
    parts = list(parts)
    if not parts:
        raise InvalidArgumentError("blend of an empty list")
    first = parts[0][0]
    total = math.fsum(w for _, w in parts)
    if abs(total - 1.0) > 1e-12:
        raise InvalidArgumentError(f"weights sum to {total!r}, not 1")
    out = np.zeros_like(first.attrs)
    for g, w in parts:
        _check_same_shape(first, g)
        if w < 0:
            raise InvalidArgumentError("negative blend weight")
        out += w * g.attrs
    return AttributedGraph(out, directed=any(g.directed for g, _ in parts))


def edge_set(g, eps=EDGE_EPS):
    """Off-diagonal positions whose attribute norm exceeds ``eps``."""
    if eps < 0:
        raise InvalidArgumentError("eps must be nonnegative")
    norms = np.linalg.norm(g.attrs, axis=2)
    np.fill_diagonal(norms, 0.0)
    i, j = np.nonzero(norms > eps)
    pairs = [(int(a), int(b)) for a, b in zip(i, j)]
    if not g.directed:
        pairs = [(a, b) for a, b in pairs if a < b]
    return pairs


def mean_of(graphs):
    """Arithmetic mean ``(1/n) * sum`` of already-aligned representations."""
    first = graphs[0]
    out = np.zeros_like(first.attrs)
    for g in graphs:
        _check_same_shape(first, g)
        out += g.attrs
    out /= len(graphs)
    return AttributedGraph(out, directed=any(g.directed for g in graphs))
