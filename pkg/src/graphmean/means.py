"""Sample-mean algorithms for attributed graphs.

Every algorithm takes a :class:`~graphmean.frechet.Sample` and a :class:`MeanConfig`
and returns a :class:`MeanEstimate`. Graphs are padded to the largest sample order
first, so the returned mean has that order.

========  ==============================================================  ==================
name      update                                                          matchings solved
========  ==============================================================  ==================
MMM       align all graphs to M, M <- average of aligned graphs, repeat    T * n
BAM       a single MMM pass                                               n
SGG       per graph: align, M <- M + eta * (X - M); evaluate per cycle     T * 2n
IAM       SGG with eta_k = 1/k, one cycle, reference = first graph        n
GNJ       medoid, then IAM in order of increasing distance                n(n-1)/2 + n-1
PAC       single-linkage merges, clusters fused with size weights         n(n-1)/2 + n-1
MED       sample graph with the smallest sum of squared distances         n(n-1)/2
========  ==============================================================  ==================

For MMM the alignment pass to ``M_t`` is also the evaluation of ``F_n(M_t)``, so no
extra matchings are spent on evaluation and ``T`` equals ``len(variation_trace)``.
SGG evaluates ``F_n`` after every cycle with ``n`` additional matchings. The final
``F_n`` of single-loop algorithms is measured after the run and reported separately
as ``evaluation_matchings``.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from graphmean.align import SolverConfig, align, distance_matrix, pad_all
from graphmean.errors import InvalidArgumentError
from graphmean.frechet import as_sample
from graphmean.graph import AttributedGraph, blend, mean_of, pad
from graphmean.rng import SplitMix64, derive_seed

ORDER_POLICIES = ("as-given", "shuffled", "increasing-from-reference")
INIT_POLICIES = ("random", "medoid", "given")
SGG_GRID = (0.9, 0.3, 0.1, 0.07, 0.03, 0.01, 0.007, 0.003, 0.001)


@dataclass(frozen=True)
class MeanConfig:
    solver: SolverConfig = SolverConfig()
    seed: int = 0
    waiting_time: int = 10
    max_iterations: int = 500
    improvement_tol: float = 1e-9
    step_size: float | None = None
    step_schedule: str = "constant"
    order_policy: str = "shuffled"
    init_policy: str = "random"
    init_graph: AttributedGraph | None = None

    def __post_init__(self):
        if self.waiting_time < 1:
            raise InvalidArgumentError("waiting_time must be >= 1")
        if self.max_iterations < 1:
            raise InvalidArgumentError("max_iterations must be >= 1")
        if self.step_size is not None and not self.step_size > 0:
            raise InvalidArgumentError("step_size must be positive")
        if self.step_schedule not in ("constant", "harmonic"):
            raise InvalidArgumentError(f"unknown step schedule {self.step_schedule!r}")
        if self.order_policy not in ORDER_POLICIES:
            raise InvalidArgumentError(f"unknown order policy {self.order_policy!r}")
        if self.init_policy not in INIT_POLICIES:
            raise InvalidArgumentError(f"unknown init policy {self.init_policy!r}")
        if self.init_policy == "given" and self.init_graph is None:
            raise InvalidArgumentError("init_policy 'given' needs init_graph")


@dataclass
class MeanEstimate:
    algorithm: str
    mean: AttributedGraph
    best_variation: float
    variation_trace: list
    iterations: int
    matchings_solved: int
    matchings_until_best: int
    evaluation_matchings: int = 0
    step_size: float | None = None
    extra: dict = field(default_factory=dict)

    @property
    def dispersion(self):
        return math.sqrt(self.best_variation)

    def summary(self):
        """JSON-friendly view without the mean graph itself."""
        return {
            "algorithm": self.algorithm,
            "best_variation": self.best_variation,
            "dispersion": self.dispersion,
            "variation_trace": list(self.variation_trace),
            "iterations": self.iterations,
            "matchings_solved": self.matchings_solved,
            "matchings_until_best": self.matchings_until_best,
            "evaluation_matchings": self.evaluation_matchings,
            "step_size": self.step_size,
            "order": self.mean.order,
            "attr_dim": self.mean.attr_dim,
            **self.extra,
        }


def _prepare(sample, cfg):
    s = as_sample(sample)
    graphs = list(s.graphs)
    if cfg.init_policy == "given":
        if cfg.init_graph.attr_dim != s.attr_dim:
            raise InvalidArgumentError("init graph has the wrong attribute dimension")
        n = max(s.max_order, cfg.init_graph.order)
    else:
        n = s.max_order
    return pad_all(graphs, n)


def _variation(graphs, m, solver):
    return math.fsum(align(g, m, solver).cost ** 2 for g in graphs)


def _rng(cfg, stream):
    return SplitMix64(derive_seed(cfg.seed, stream))


def _medoid(D2):
    """Index minimising the row sum of squared distances (first on ties)."""
    sums = [math.fsum(row) for row in D2]
    return min(range(len(sums)), key=lambda i: (sums[i], i)), sums


def _initial(graphs, cfg):
    """Initial solution and the matchings spent choosing it."""
    if cfg.init_policy == "given":
        return pad(cfg.init_graph, graphs[0].order), 0
    if cfg.init_policy == "medoid":
        n = len(graphs)
        b, _ = _medoid(distance_matrix(graphs, cfg.solver, squared=True))
        return graphs[b], n * (n - 1) // 2
    return graphs[_rng(cfg, "init").integers(0, len(graphs))], 0


def _presentation_order(graphs, cfg, rng, reference):
    """Order in which graphs are fused, and the matchings spent computing it."""
    n = len(graphs)
    if cfg.order_policy == "as-given":
        return list(range(n)), 0
    if cfg.order_policy == "shuffled":
        return rng.permutation(n), 0
    dists = [align(g, reference, cfg.solver).cost for g in graphs]
    return sorted(range(n), key=lambda i: (dists[i], i)), n


class _Tracker:
    """Best-so-far bookkeeping with the waiting-time stopping rule."""

    def __init__(self, cfg):
        self.cfg = cfg
        self.best = None
        self.best_value = math.inf
        self.reference = math.inf
        self.since = 0
        self.until_best = 0
        self.trace = []

    def update(self, m, value, matchings, prefer_later=True):
        self.trace.append(value)
        slack = 1e-12 * self.best_value if prefer_later else 0.0
        if self.best is None or value < self.best_value or (prefer_later and value <= self.best_value + slack):
            self.best, self.best_value, self.until_best = m, value, matchings
        if value < self.reference - self.cfg.improvement_tol * max(abs(self.reference), 1e-300):
            self.reference = value
            self.since = 0
        else:
            self.since += 1

    @property
    def done(self):
        return self.since >= self.cfg.waiting_time or self.best_value == 0.0


def mmm(sample, cfg=MeanConfig()):
    """Majorize-minimize mean: alternate optimal alignment and matrix averaging.

    Each pass aligns every sample graph to the current representation ``M`` (which
    also evaluates ``F_n(M)``) and replaces ``M`` with the average of the aligned
    matrices. In the exact regime the variation trace never increases. The run stops
    when the best value has not improved by ``improvement_tol`` (relative) for
    ``waiting_time`` passes, when ``M`` is a fixed point of the update, or after
    ``max_iterations`` passes; the best iterate is returned.
    """
    graphs = _prepare(sample, cfg)
    n = len(graphs)
    m, matchings = _initial(graphs, cfg)
    start = matchings
    track = _Tracker(cfg)
    produced_at = matchings
    fixed_point = False
    for _ in range(cfg.max_iterations):
        aligned = [align(g, m, cfg.solver) for g in graphs]
        matchings += n
        track.update(m, math.fsum(a.cost**2 for a in aligned), produced_at)
        if track.done:
            break
        new = mean_of([a.aligned for a in aligned])
        if new.equals(m):
            fixed_point = True
            break
        m, produced_at = new, matchings
    return MeanEstimate(
        "MMM",
        track.best,
        track.best_value,
        track.trace,
        len(track.trace),
        matchings,
        track.until_best,
        extra={"fixed_point": fixed_point, "init_matchings": start},
    )


def bam(sample, cfg=MeanConfig()):
    """One MMM pass from the initial solution."""
    graphs = _prepare(sample, cfg)
    n = len(graphs)
    m, matchings = _initial(graphs, cfg)
    m = mean_of([align(g, m, cfg.solver).aligned for g in graphs])
    matchings += n
    v = _variation(graphs, m, cfg.solver)
    return MeanEstimate("BAM", m, v, [v], 1, matchings, matchings, evaluation_matchings=n)


def _step(m, x, eta):
    return AttributedGraph(m.attrs + eta * (x.attrs - m.attrs), directed=m.directed)


def sgg(sample, cfg=MeanConfig()):
    """Stochastic generalized gradient descent on the Fréchet function.

    Each presented graph is aligned to ``M`` and ``M`` moves a fraction ``eta`` of
    the way towards it. ``step_schedule='harmonic'`` uses ``eta_k = 1/k`` with ``k``
    counting presented graphs. The best cycle-end solution is returned.
    """
    if cfg.step_schedule == "constant" and cfg.step_size is None:
        raise InvalidArgumentError("SGG needs a step_size (or step_schedule='harmonic')")
    graphs = _prepare(sample, cfg)
    n = len(graphs)
    m, matchings = _initial(graphs, cfg)
    rng = _rng(cfg, "order")
    order, spent = _presentation_order(graphs, cfg, rng, m)
    matchings += spent
    track = _Tracker(cfg)
    k = 0
    for cycle in range(cfg.max_iterations):
        if cycle > 0 and cfg.order_policy == "shuffled":
            order = rng.permutation(n)
        for i in order:
            x = align(graphs[i], m, cfg.solver).aligned
            k += 1
            m = _step(m, x, cfg.step_size if cfg.step_schedule == "constant" else 1.0 / k)
        matchings += n
        v = _variation(graphs, m, cfg.solver)
        matchings += n
        track.update(m, v, matchings, prefer_later=False)
        if track.done:
            break
    return MeanEstimate(
        "SGG", track.best, track.best_value, track.trace, len(track.trace), matchings, track.until_best,
        step_size=cfg.step_size,
    )


def _incremental(graphs, order, m, solver):
    """Fuse ``graphs`` in ``order`` into ``m`` with step ``1/k``; ``m`` counts as k = 1."""
    k = 1
    for i in order:
        x = align(graphs[i], m, solver).aligned
        k += 1
        m = _step(m, x, 1.0 / k)
    return m


def iam(sample, cfg=MeanConfig()):
    """Incremental arithmetic mean: one pass, step ``1/k``.

    The first presented graph starts the mean. It is aligned to itself as the first
    of ``n`` matchings (a no-op that keeps the count uniform with SGG). With
    ``order_policy='increasing-from-reference'`` graphs are presented by increasing
    distance from the initial solution, which costs ``n`` more matchings.
    """
    graphs = _prepare(sample, cfg)
    n = len(graphs)
    reference, matchings = (None, 0)
    if cfg.order_policy == "increasing-from-reference":
        reference, matchings = _initial(graphs, cfg)
    order, spent = _presentation_order(graphs, cfg, _rng(cfg, "order"), reference)
    matchings += spent + n
    first = order[0]
    m = align(graphs[first], graphs[first], cfg.solver).aligned
    m = _incremental(graphs, order[1:], m, cfg.solver)
    v = _variation(graphs, m, cfg.solver)
    return MeanEstimate("IAM", m, v, [v], 1, matchings, matchings, evaluation_matchings=n, extra={"order": list(order)})


def gnj(sample, cfg=MeanConfig()):
    """Greedy neighbour joining: IAM from the medoid, nearest graphs first."""
    graphs = _prepare(sample, cfg)
    n = len(graphs)
    D2 = distance_matrix(graphs, cfg.solver, squared=True)
    b, _ = _medoid(D2)
    order = sorted((j for j in range(n) if j != b), key=lambda j: (D2[b, j], j))
    m = _incremental(graphs, order, graphs[b], cfg.solver)
    matchings = n * (n - 1) // 2 + (n - 1)
    v = _variation(graphs, m, cfg.solver)
    return MeanEstimate("GNJ", m, v, [v], 1, matchings, matchings, evaluation_matchings=n, extra={"medoid": b})


def pac(sample, cfg=MeanConfig()):
    """Progressive alignment: single-linkage agglomeration with size-weighted fusion.

    The closest pair of clusters (smallest minimum inter-cluster distance, ties by
    smallest pair of cluster ids) is merged; the smaller cluster's representative is
    aligned to the larger one's and both are blended with cardinality weights.
    """
    graphs = _prepare(sample, cfg)
    n = len(graphs)
    D = distance_matrix(graphs, cfg.solver)
    clusters = {i: ([i], graphs[i]) for i in range(n)}
    merges = []
    while len(clusters) > 1:
        ids = sorted(clusters)
        best = None
        for a_pos, a in enumerate(ids):
            for b in ids[a_pos + 1 :]:
                link = min(D[i, j] for i in clusters[a][0] for j in clusters[b][0])
                if best is None or link < best[0]:
                    best = (link, a, b)
        _, a, b = best
        (ma, ra), (mb, rb) = clusters.pop(a), clusters.pop(b)
        big, small = ((ma, ra), (mb, rb)) if len(ma) >= len(mb) else ((mb, rb), (ma, ra))
        total = len(ma) + len(mb)
        moved = align(small[1], big[1], cfg.solver).aligned
        rep = blend([(big[1], len(big[0]) / total), (moved, len(small[0]) / total)])
        clusters[a] = (ma + mb, rep)
        merges.append((a, b))
    (_, m), = clusters.values()
    matchings = n * (n - 1) // 2 + (n - 1)
    v = _variation(graphs, m, cfg.solver)
    return MeanEstimate("PAC", m, v, [v], 1, matchings, matchings, evaluation_matchings=n, extra={"merges": merges})


def med(sample, cfg=MeanConfig()):
    """Medoid: the sample graph minimising the sum of squared distances."""
    graphs = _prepare(sample, cfg)
    n = len(graphs)
    D2 = distance_matrix(graphs, cfg.solver, squared=True)
    b, sums = _medoid(D2)
    matchings = n * (n - 1) // 2
    return MeanEstimate("MED", graphs[b], sums[b], [sums[b]], 1, matchings, matchings, extra={"medoid": b})


def sgg_grid(sample, cfg=MeanConfig(), grid=SGG_GRID):
    """SGG over a grid of constant step sizes; returns the best run and all runs."""
    runs = [sgg(sample, replace(cfg, step_size=eta, step_schedule="constant")) for eta in grid]
    best = min(runs, key=lambda r: r.best_variation)
    return best, runs


ALGORITHMS = {
    "MMM": mmm,
    "SGG": sgg,
    "BAM": bam,
    "IAM": iam,
    "GNJ": gnj,
    "PAC": pac,
    "MED": med,
}


def run(algorithm, sample, cfg=MeanConfig()):
    try:
        fn = ALGORITHMS[algorithm.upper()]
    except KeyError:
        raise InvalidArgumentError(f"unknown algorithm {algorithm!r}; choose from {', '.join(ALGORITHMS)}") from None
    return fn(sample, cfg)


def scalar_graphs(values):
    """Single-node graphs with the given scalar attributes (handy for checks)."""
    return [AttributedGraph(np.array([[[float(v)]]])) for v in values]
