import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from graphmean.align import (
    SolverConfig,
    align,
    align_exact,
    align_heuristic,
    distance,
    distance_matrix,
    kernel,
    swap_gains,
)
from graphmean.errors import InvalidArgumentError, UnsupportedSizeError
from graphmean.graph import AttributedGraph, frobenius_distance, pad, permute, scale
from oracles import brute_force_alignment, brute_force_kernel, padded, random_graph, scalar_graph, sq_diff

EXACT = SolverConfig()
HEURISTIC = SolverConfig(exact_threshold=1)


def diag(*values):
    return AttributedGraph.from_parts([(v,) for v in values])


def test_self_alignment_is_free(rng):
    g = random_graph(rng, 5)
    a = align(g, g)
    assert a.cost == 0 and a.perm == (0, 1, 2, 3, 4) and a.exact


def test_two_node_path_against_three_node_graph():
    x = AttributedGraph.from_parts([(1.0,), (2.0,)], [(0, 1, (1.0,))])
    y = AttributedGraph.from_parts([(1.0,), (2.0,), (3.0,)], [(0, 2, (2.0,))])
    oracle_cost, oracle_perm = brute_force_alignment(x, y)
    assert oracle_cost == pytest.approx(math.sqrt(7), abs=1e-15)
    a = align(x, y)
    assert a.cost == pytest.approx(math.sqrt(7), abs=1e-12)
    assert a.perm == oracle_perm == (0, 2, 1)
    assert a.aligned.order == 3


def test_swapped_diagonals_align_at_zero_cost():
    a = align(diag(1.0, 2.0), diag(2.0, 1.0))
    assert a.perm == (1, 0) and a.cost == 0


def test_cost_is_the_distance_of_the_returned_alignment(rng):
    for _ in range(20):
        x, y = random_graph(rng, 3), random_graph(rng, 5)
        for cfg in (EXACT, HEURISTIC):
            a = align(x, y, cfg)
            assert a.cost == frobenius_distance(permute(pad(x, 5), a.perm), pad(y, 5))


def test_attribute_dimension_mismatch():
    with pytest.raises(InvalidArgumentError):
        align(AttributedGraph.zeros(2, 1), AttributedGraph.zeros(2, 2))


class TestExact:
    def test_order_two_picks_cheaper(self):
        x, y = diag(1.0, 5.0), diag(4.0, 2.0)
        assert align_exact(x, y).perm == (1, 0)
        assert align_exact(x, y).cost == pytest.approx(math.sqrt(2))

    def test_matches_enumeration_on_order_five(self, rng):
        for _ in range(15):
            x, y = random_graph(rng, 5, dim=2), random_graph(rng, 5, dim=2)
            cost, perm = brute_force_alignment(x, y)
            a = align_exact(x, y)
            assert a.cost == pytest.approx(cost, abs=1e-12)
            assert a.perm == perm

    def test_permuted_copy(self, rng):
        y = random_graph(rng, 6)
        x = permute(y, rng.permutation(6))
        assert align_exact(x, y).cost == 0

    def test_lexicographic_tie_break(self):
        # every permutation of identical isolated nodes is optimal
        g = diag(1.0, 1.0, 1.0, 1.0)
        assert align_exact(g, g).perm == (0, 1, 2, 3)
        x = diag(1.0, 2.0, 2.0)
        y = diag(2.0, 2.0, 1.0)
        assert align_exact(x, y).perm == (2, 0, 1)

    def test_size_cap(self):
        g = AttributedGraph.zeros(11)
        with pytest.raises(UnsupportedSizeError):
            align_exact(g, g)

    def test_order_ten_is_supported(self, rng):
        x, y = random_graph(rng, 10, density=0.3), random_graph(rng, 10, density=0.3)
        a = align_exact(x, y)
        assert a.exact
        assert a.cost <= align_heuristic(x, y).cost + 1e-12


class TestHeuristic:
    def test_identical_graphs(self, rng):
        g = random_graph(rng, 12)
        assert align_heuristic(g, g).cost == 0

    def test_never_below_exact(self, rng):
        equal = 0
        for _ in range(25):
            x, y = random_graph(rng, 6), random_graph(rng, rng.integers(3, 7))
            h, e = align_heuristic(x, y), align_exact(x, y)
            assert not h.exact
            assert h.cost >= e.cost - 1e-12
            equal += h.cost <= e.cost + 1e-12
        assert equal >= 15

    def test_more_restarts_never_hurt(self, rng):
        for _ in range(10):
            x, y = random_graph(rng, 9), random_graph(rng, 9)
            one = align_heuristic(x, y, SolverConfig(restarts=1, seed=7))
            many = align_heuristic(x, y, SolverConfig(restarts=16, seed=7))
            assert many.cost <= one.cost

    def test_deterministic(self, rng):
        x, y = random_graph(rng, 14), random_graph(rng, 14)
        cfg = SolverConfig(exact_threshold=8, seed=3)
        assert align(x, y, cfg).perm == align(x, y, cfg).perm

    def test_large_graphs_dispatch_to_heuristic(self, rng):
        x, y = random_graph(rng, 12), random_graph(rng, 12)
        assert not align(x, y).exact

    def test_swap_gains_match_direct_recomputation(self, rng):
        for _ in range(10):
            n = int(rng.integers(2, 7))
            x = padded(random_graph(rng, n, directed=bool(rng.integers(2))).attrs, n)
            y = padded(random_graph(rng, n).attrs, n)
            perm = rng.permutation(n)
            h = y[np.ix_(perm, perm)]
            gains = swap_gains(x, h)
            base = sq_diff(x, y, perm)
            for a in range(n):
                for b in range(a + 1, n):
                    q = perm.copy()
                    q[a], q[b] = q[b], q[a]
                    # squared cost = |x|^2 + |y|^2 - 2 * score
                    assert 2 * gains[a, b] == pytest.approx(base - sq_diff(x, y, q), abs=1e-9)


class TestKernelAndDistance:
    def test_examples(self, rng):
        g = random_graph(rng, 4)
        assert kernel(g, g) == pytest.approx(float(np.sum(g.attrs**2)))
        assert kernel(g, AttributedGraph.zeros(4, 2)) == pytest.approx(0, abs=1e-12)
        assert distance(g, g) == 0
        assert distance(scalar_graph(3), scalar_graph(4)) == 1

    def test_kernel_matches_enumeration(self, rng):
        for _ in range(10):
            x, y = random_graph(rng, 4), random_graph(rng, 4)
            assert kernel(x, y) == pytest.approx(brute_force_kernel(x, y), abs=1e-9)

    def test_homogeneity(self, rng):
        for lam in (0.0, 0.5, 2.0, 10.0):
            x, y = random_graph(rng, 4), random_graph(rng, 3)
            assert distance(scale(x, lam), scale(y, lam)) == pytest.approx(lam * distance(x, y), abs=1e-9)


class TestDistanceMatrix:
    def test_single_graph(self, rng):
        np.testing.assert_array_equal(distance_matrix([random_graph(rng, 3)]), [[0.0]])

    def test_identical_pair(self, rng):
        g = random_graph(rng, 3)
        np.testing.assert_array_equal(distance_matrix([g, g]), np.zeros((2, 2)))

    def test_matches_pairwise_oracle(self, rng):
        gs = [random_graph(rng, 4) for _ in range(5)]
        D = distance_matrix(gs)
        D2 = distance_matrix(gs, squared=True)
        assert np.array_equal(D, D.T)
        for i in range(5):
            for j in range(5):
                expected = 0.0 if i == j else brute_force_alignment(gs[i], gs[j])[0]
                assert D[i, j] == pytest.approx(expected, abs=1e-12)
                assert D2[i, j] == pytest.approx(expected**2, abs=1e-12)


# ----------------------------------------------------------------- properties


@st.composite
def graphs(draw, max_order=5):
    rng = np.random.default_rng(draw(st.integers(0, 2**32 - 1)))
    return random_graph(rng, draw(st.integers(1, max_order)))


@given(graphs(), graphs(), graphs())
def test_metric_axioms_on_a_common_order(x, y, z):
    n = max(x.order, y.order, z.order)
    x, y, z = pad(x, n), pad(y, n), pad(z, n)
    dxy, dyx = distance(x, y), distance(y, x)
    assert abs(dxy - dyx) <= 1e-9
    assert distance(x, z) <= dxy + distance(y, z) + 1e-9


@given(graphs(), st.integers(0, 2**32 - 1))
def test_distance_is_permutation_invariant(x, seed):
    y = random_graph(np.random.default_rng(seed), x.order)
    p = np.random.default_rng(seed + 1).permutation(x.order)
    assert distance(permute(x, p), y) == pytest.approx(distance(x, y), abs=1e-12)
    assert distance(permute(x, p), x) == 0


@given(graphs(), graphs())
def test_kernel_metric_identity(x, y):
    k = kernel(x, y)
    kxx, kyy = kernel(x, x), kernel(y, y)
    assert distance(x, y) ** 2 + 2 * k == pytest.approx(kxx + kyy, abs=1e-9)


def test_pairwise_padding_can_break_the_triangle_inequality():
    # Why sample-level code pads every graph to one common order first.
    x, y = scalar_graph(1), scalar_graph(-1)
    z = diag(0.5, -0.5)
    assert distance(x, y) == 2
    assert distance(x, z) + distance(z, y) < 2
    n = 2
    assert distance(pad(x, n), pad(y, n)) <= distance(pad(x, n), z) + distance(z, pad(y, n)) + 1e-12
