"""Automorphisms and the degree of asymmetry of small attributed graphs.

A graph is asymmetric when the identity is its only automorphism. Its degree of
asymmetry ``chi`` is the smallest Frobenius distance between two different matrix
representations; symmetric graphs get ``chi = 0``.

Both quantities are found by exhaustive search with pruning, so orders are capped.
"""

from dataclasses import dataclass

import numpy as np
from numba import njit

from graphmean.align import EXACT_CAP, exact_permutation
from graphmean.errors import UnsupportedSizeError


@dataclass(frozen=True)
class SymmetryReport:
    asymmetric: bool
    chi: float
    witness: tuple | None
    permutations_examined: int


@njit(cache=True)
def _close(a, b, tol):
    for t in range(a.shape[0]):
        if abs(a[t] - b[t]) > tol:
            return False
    return True


@njit(cache=True)
def _find_automorphism(A, tol):
    """First non-identity automorphism in lexicographic order, and the node count.

    Node ``i`` may only map to a node whose attribute matches, and every edge towards
    already-mapped nodes must match as well, which prunes almost everything for
    graphs with diverse attributes.
    """
    n = A.shape[0]
    perm = np.full(n, -1, dtype=np.int64)
    used = np.zeros(n, dtype=np.bool_)
    next_k = np.zeros(n + 1, dtype=np.int64)
    depth = 0
    visited = 0
    while True:
        if depth == n:
            identity = True
            for i in range(n):
                if perm[i] != i:
                    identity = False
                    break
            if not identity:
                return perm, visited
            depth -= 1
            used[perm[depth]] = False
            continue
        advanced = False
        k = next_k[depth]
        while k < n:
            if not used[k] and _close(A[depth, depth], A[k, k], tol):
                ok = True
                for j in range(depth):
                    if not _close(A[depth, j], A[k, perm[j]], tol) or not _close(A[j, depth], A[perm[j], k], tol):
                        ok = False
                        break
                visited += 1
                if ok:
                    used[k] = True
                    perm[depth] = k
                    next_k[depth] = k + 1
                    depth += 1
                    next_k[depth] = 0
                    advanced = True
                    break
            k += 1
        if not advanced:
            if depth == 0:
                break
            depth -= 1
            used[perm[depth]] = False
    return np.full(n, -1, dtype=np.int64), visited


def _check_cap(g, cap):
    if g.order > cap:
        raise UnsupportedSizeError(f"symmetry search is capped at order {cap}, got {g.order}")


def find_automorphism(g, cap=EXACT_CAP, tol=0.0):
    """A non-identity automorphism of ``g`` or ``None``.

    ``tol = 0`` compares attributes bitwise; use a small positive ``tol`` (e.g. 1e-12)
    for graphs that went through a lossy text format.
    """
    _check_cap(g, cap)
    perm, visited = _find_automorphism(g.attrs, tol)
    if perm[0] < 0:
        return None, int(visited)
    return tuple(int(v) for v in perm), int(visited)


def is_asymmetric(g, cap=EXACT_CAP, tol=0.0):
    if g.order <= 1:
        _check_cap(g, cap)
        return True
    return find_automorphism(g, cap, tol)[0] is None


def degree_of_asymmetry(g, cap=EXACT_CAP, tol=0.0):
    _check_cap(g, cap)
    if g.order <= 1:
        # a single node has no second representation; treat as maximally asymmetric
        return SymmetryReport(True, float("inf"), None, 0)
    auto, visited = find_automorphism(g, cap, tol)
    if auto is not None:
        return SymmetryReport(False, 0.0, None, visited)
    perm, nodes = exact_permutation(g.attrs, g.attrs, exclude_identity=True, cap=cap)
    diff = (g.attrs[np.ix_(perm, perm)] - g.attrs).ravel()
    chi = float(np.sqrt(np.dot(diff, diff)))
    return SymmetryReport(True, chi, tuple(int(v) for v in perm), visited + nodes)
