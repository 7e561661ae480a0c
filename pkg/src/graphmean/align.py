"""Optimal alignment of attributed graphs, the graph edit kernel and its metric.

Two graphs are compared after padding both to ``n = max(order)``. An alignment is a
node permutation ``p`` of the first graph minimising ``||permute(x, p) - y||``; the
minimum is the metric ``delta`` and ``kernel`` is the matching maximum inner product.

Two solver tiers:

* ``align_exact``: depth-first branch and bound over partial node assignments,
  numba-compiled. Ties go to the lexicographically smallest permutation.
* ``align_heuristic``: linear assignment on a node cost (attribute distance plus a
  sorted incident-edge profile), polished by pairwise-swap local search, repeated
  over several perturbed restarts. Its cost is an upper bound on ``delta``.

``align`` dispatches on the padded order and ``SolverConfig.exact_threshold``.

Padding is per pair. Comparing graphs of different orders after padding to a larger
common order can only lower ``delta``; when attribute inner products can be negative
the triangle inequality is only guaranteed for graphs padded to a common order first
(``pad_all``), which is what every sample-level routine does.
"""

from dataclasses import dataclass, field, replace

import numpy as np
from numba import njit
from scipy.optimize import linear_sum_assignment

from graphmean.errors import InvalidArgumentError, UnsupportedSizeError
from graphmean.graph import AttributedGraph, frobenius_distance, inner, pad, permute
from graphmean.rng import SplitMix64, derive_seed

EXACT_CAP = 10


@dataclass(frozen=True)
class SolverConfig:
    exact_threshold: int = 8
    restarts: int = 16
    local_search_sweeps: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.exact_threshold < 1:
            raise InvalidArgumentError("exact_threshold must be >= 1")
        if self.restarts < 1:
            raise InvalidArgumentError("restarts must be >= 1")
        if self.local_search_sweeps < 0:
            raise InvalidArgumentError("local_search_sweeps must be >= 0")


@dataclass(frozen=True)
class Alignment:
    """Permutation of the first (padded) graph towards the second.

    ``aligned`` is the permuted padded representation of the first graph, so that
    ``cost == frobenius_distance(aligned, pad(y, n))``.
    """

    perm: tuple
    cost: float
    exact: bool
    aligned: AttributedGraph = field(repr=False, compare=False)


def _check_dims(x, y):
    if x.attr_dim != y.attr_dim:
        raise InvalidArgumentError(f"attribute dimension mismatch: {x.attr_dim} vs {y.attr_dim}")


def pad_all(graphs, n=None):
    """Pad every graph to a common order (the largest one by default)."""
    graphs = list(graphs)
    if n is None:
        n = max(g.order for g in graphs)
    return [pad(g, n) for g in graphs]


def _finish(x, y, perm, exact):
    aligned = permute(x, perm)
    return Alignment(tuple(int(v) for v in perm), frobenius_distance(aligned, y), exact, aligned)


def _pair_costs(xa, ya):
    """``C[i, k, j, l] = ||x_ij - y_kl||^2`` for padded attribute arrays."""
    diff = xa[:, None, :, None, :] - ya[None, :, None, :, :]
    return np.einsum("ikjld,ikjld->ikjl", diff, diff)


@njit(cache=True)
def _branch_and_bound(C, ub, tol, exclude_identity):
    n = C.shape[0]
    L = np.empty((n + 1, n, n))
    for i in range(n):
        for k in range(n):
            L[0, i, k] = C[i, k, i, k]
    partial = np.zeros(n + 1)
    perm = np.full(n, -1, dtype=np.int64)
    best = np.full(n, -1, dtype=np.int64)
    used = np.zeros(n, dtype=np.bool_)
    next_k = np.zeros(n + 1, dtype=np.int64)
    depth = 0
    visited = 0
    while True:
        if depth == n:
            visited += 1
            c = partial[n]
            skip = False
            if exclude_identity:
                skip = True
                for i in range(n):
                    if perm[i] != i:
                        skip = False
                        break
            if not skip and c < ub:
                ub = c - tol
                best[:] = perm
            depth -= 1
            used[perm[depth]] = False
            continue
        advanced = False
        k = next_k[depth]
        while k < n:
            if not used[k]:
                newp = partial[depth] + L[depth, depth, k]
                if newp < ub:
                    used[k] = True
                    perm[depth] = k
                    bound = newp
                    for ii in range(depth + 1, n):
                        row_min = np.inf
                        for kk in range(n):
                            if not used[kk]:
                                v = L[depth, ii, kk] + C[ii, kk, depth, k] + C[depth, k, ii, kk]
                                L[depth + 1, ii, kk] = v
                                if v < row_min:
                                    row_min = v
                        bound += row_min
                    visited += 1
                    if bound < ub:
                        next_k[depth] = k + 1
                        partial[depth + 1] = newp
                        depth += 1
                        next_k[depth] = 0
                        advanced = True
                        break
                    used[k] = False
            k += 1
        if not advanced:
            if depth == 0:
                break
            depth -= 1
            used[perm[depth]] = False
    return best, visited


def _tolerance(xa, ya):
    # relative, so that scaling both graphs scales every decision consistently;
    # the floor keeps the strict pruning test satisfiable for all-zero graphs
    return max(1e-12 * (float(np.vdot(xa, xa)) + float(np.vdot(ya, ya))), np.finfo(float).tiny)


def exact_permutation(xa, ya, upper=None, exclude_identity=False, cap=EXACT_CAP):
    """Branch-and-bound optimum on padded ``(n, n, d)`` arrays.

    Returns ``(perm, nodes_visited)``; ``perm`` is ``None`` when nothing beats
    ``upper``, a squared cost known to be achievable (it only speeds up pruning).
    With ``exclude_identity`` the identity permutation is never returned.
    """
    n = xa.shape[0]
    if n > cap:
        raise UnsupportedSizeError(f"exact search is capped at order {cap}, got {n}")
    tol = _tolerance(xa, ya)
    ub = np.inf if upper is None else upper + 2.0 * tol
    best, visited = _branch_and_bound(_pair_costs(xa, ya), ub, tol, exclude_identity)
    if best[0] < 0:
        return None, int(visited)
    return best, int(visited)


def align_exact(x, y, cap=EXACT_CAP):
    _check_dims(x, y)
    n = max(x.order, y.order)
    if n > cap:
        raise UnsupportedSizeError(f"exact alignment is capped at order {cap}, got {n}")
    xp, yp = pad(x, n), pad(y, n)
    if n == 1:
        return _finish(xp, yp, [0], True)
    seed = _local_search(xp.attrs, yp.attrs, _lap_seed(xp.attrs, yp.attrs), sweeps=10)
    perm, _ = exact_permutation(xp.attrs, yp.attrs, upper=_sq_cost(xp.attrs, yp.attrs, seed), cap=cap)
    return _finish(xp, yp, perm, True)


def _sq_cost(xa, ya, perm):
    h = ya[np.ix_(perm, perm)]
    d = (xa - h).ravel()
    return float(np.dot(d, d))


def _profiles(a):
    """Per-node descending incident-edge norms (outgoing, then incoming)."""
    norms = np.linalg.norm(a, axis=2)
    np.fill_diagonal(norms, 0.0)
    out = -np.sort(-norms, axis=1)
    inc = -np.sort(-norms.T, axis=1)
    return np.concatenate([out, inc], axis=1)


def node_costs(xa, ya):
    """Linear-assignment cost between nodes of two padded graphs."""
    n = xa.shape[0]
    idx = np.arange(n)
    xd, yd = xa[idx, idx], ya[idx, idx]
    attr = np.linalg.norm(xd[:, None, :] - yd[None, :, :], axis=2)
    px, py = _profiles(xa), _profiles(ya)
    prof = np.linalg.norm(px[:, None, :] - py[None, :, :], axis=2)
    return attr + prof


def _lap_seed(xa, ya, noise=None):
    cost = node_costs(xa, ya)
    if noise is not None:
        cost = cost + noise
    rows, cols = linear_sum_assignment(cost)
    perm = np.empty(len(rows), dtype=np.intp)
    perm[rows] = cols
    return perm


def swap_gains(xa, ha):
    """Score change for swapping the targets of every node pair ``(a, b)``.

    ``ha`` is the second graph already permuted by the current assignment; the score
    is ``sum_ij <x_ij, h_ij>`` and larger is better.
    """
    n = xa.shape[0]
    idx = np.arange(n)
    G, H = xa, ha
    R = np.einsum("akd,bkd->ab", G, H)
    Cc = np.einsum("kad,kbd->ab", G, H)
    rd, cd = np.diag(R), np.diag(Cc)
    t1 = R + R.T - rd[:, None] - rd[None, :]
    t2 = Cc + Cc.T - cd[:, None] - cd[None, :]
    GA, GB = G[idx, idx][:, None, :], G[idx, idx][None, :, :]
    HA, HB = H[idx, idx][:, None, :], H[idx, idx][None, :, :]
    Gab, Gba = G, G.transpose(1, 0, 2)
    Hab, Hba = H, H.transpose(1, 0, 2)

    def dot(u, v):
        return np.einsum("abd,abd->ab", u, v)

    corr = (
        dot(GA - Gba, Hba - HA)
        + dot(Gab - GB, HB - Hab)
        + dot(GA - Gab, Hab - HA)
        + dot(Gba - GB, HB - Hba)
    )
    gains = t1 + t2 - corr + dot(GA - GB, HB - HA) + dot(Gab - Gba, Hba - Hab)
    np.fill_diagonal(gains, 0.0)
    return gains


def _local_search(xa, ya, perm, sweeps):
    """Best-improvement pairwise swaps; at most ``sweeps * n`` moves."""
    perm = np.array(perm, dtype=np.intp)
    n = len(perm)
    tol = _tolerance(xa, ya)
    for _ in range(sweeps * n):
        gains = swap_gains(xa, ya[np.ix_(perm, perm)])
        flat = int(np.argmax(np.triu(gains, 1)))
        a, b = divmod(flat, n)
        if gains[a, b] <= tol:
            break
        perm[a], perm[b] = perm[b], perm[a]
    return perm


def _better(cost, perm, best_cost, best_perm, tol):
    if best_perm is None or cost < best_cost - tol:
        return True
    return abs(cost - best_cost) <= tol and tuple(perm) < tuple(best_perm)


def align_heuristic(x, y, cfg=SolverConfig()):
    _check_dims(x, y)
    n = max(x.order, y.order)
    xp, yp = pad(x, n), pad(y, n)
    if n == 1:
        return _finish(xp, yp, [0], True)
    xa, ya = xp.attrs, yp.attrs
    tol = _tolerance(xa, ya)
    rng = SplitMix64(derive_seed(cfg.seed, "heuristic"))
    base = node_costs(xa, ya)
    spread = float(base.std()) + 1e-12
    seeds = [np.arange(n), _lap_seed(xa, ya)]
    for _ in range(cfg.restarts - 1):
        noise = np.array([[rng.uniform(-0.5, 0.5) for _ in range(n)] for _ in range(n)]) * spread
        seeds.append(_lap_seed(xa, ya, noise))
    best_cost, best_perm = np.inf, None
    for s in seeds:
        perm = _local_search(xa, ya, s, cfg.local_search_sweeps)
        cost = _sq_cost(xa, ya, perm)
        if _better(cost, perm, best_cost, best_perm, tol):
            best_cost, best_perm = cost, perm
    return _finish(xp, yp, best_perm, False)


def align(x, y, cfg=SolverConfig()):
    """Optimal (or heuristic, above ``cfg.exact_threshold``) alignment of ``x`` to ``y``."""
    _check_dims(x, y)
    n = max(x.order, y.order)
    if n <= min(cfg.exact_threshold, EXACT_CAP):
        return align_exact(x, y)
    return align_heuristic(x, y, cfg)


def kernel(x, y, cfg=SolverConfig()):
    a = align(x, y, cfg)
    return 0.5 * (inner(x, x) + inner(y, y) - a.cost**2)


def distance(x, y, cfg=SolverConfig()):
    return align(x, y, cfg).cost


def distance_matrix(sample, cfg=SolverConfig(), squared=False):
    """Pairwise distances, one alignment per unordered pair.

    Pair ``(i, j)`` uses the seed ``derive_seed(cfg.seed, i, j)`` so entries do not
    depend on evaluation order.
    """
    graphs = list(getattr(sample, "graphs", sample))
    if not graphs:
        raise InvalidArgumentError("empty sample")
    n = len(graphs)
    D = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            c = align(graphs[i], graphs[j], replace(cfg, seed=derive_seed(cfg.seed, i, j))).cost
            D[i, j] = D[j, i] = c * c if squared else c
    return D


def is_exact(cfg, order):
    return order <= min(cfg.exact_threshold, EXACT_CAP)
