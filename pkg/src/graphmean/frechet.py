"""Sample Fréchet functions and optimality diagnostics.

``F_n(Z) = sum_i L(delta(X_i, Z))``. With the squared loss its minimum over all graphs
is the sample variation ``V_n`` and ``sqrt(V_n)`` the sample dispersion. Sample-level
routines pad every graph to the largest order involved before aligning.
"""

import math
from dataclasses import dataclass, field

from graphmean.align import SolverConfig, align, is_exact, pad_all
from graphmean.errors import InvalidArgumentError
from graphmean.graph import frobenius_distance, inner, mean_of
from graphmean.symmetry import degree_of_asymmetry


@dataclass(frozen=True)
class Loss:
    """``L(a) = a**p``; ``p = 1`` is the median loss, ``p = 2`` the mean loss."""

    p: float = 2.0

    def __post_init__(self):
        if not self.p >= 1:
            raise InvalidArgumentError("loss exponent must be >= 1")

    def __call__(self, a):
        return a * a if self.p == 2 else a**self.p


SQUARED = Loss(2.0)
IDENTITY = Loss(1.0)


@dataclass(frozen=True)
class Sample:
    graphs: tuple
    labels: tuple | None = None

    def __post_init__(self):
        graphs = tuple(self.graphs)
        if not graphs:
            raise InvalidArgumentError("a sample needs at least one graph")
        dims = {g.attr_dim for g in graphs}
        if len(dims) != 1:
            raise InvalidArgumentError(f"mixed attribute dimensions {sorted(dims)}")
        object.__setattr__(self, "graphs", graphs)
        if self.labels is not None:
            labels = tuple(self.labels)
            if len(labels) != len(graphs):
                raise InvalidArgumentError("labels and graphs differ in length")
            object.__setattr__(self, "labels", labels)

    def __len__(self):
        return len(self.graphs)

    def __iter__(self):
        return iter(self.graphs)

    @property
    def attr_dim(self):
        return self.graphs[0].attr_dim

    @property
    def max_order(self):
        return max(g.order for g in self.graphs)

    def subset(self, indices):
        idx = list(indices)
        labels = None if self.labels is None else [self.labels[i] for i in idx]
        return Sample([self.graphs[i] for i in idx], labels)


def as_sample(s):
    return s if isinstance(s, Sample) else Sample(tuple(s))


@dataclass(frozen=True)
class FrechetReport:
    value: float
    variation: float
    dispersion: float
    per_point: tuple = field(repr=False)

    @property
    def normalized(self):
        """``V_n / n``, comparable across sample sizes."""
        return self.variation / len(self.per_point)


def _common(s, *extra):
    s = as_sample(s)
    for g in extra:
        if g.attr_dim != s.attr_dim:
            raise InvalidArgumentError("attribute dimension mismatch")
    graphs = pad_all(list(s.graphs) + list(extra))
    k = len(extra)
    return graphs[: len(graphs) - k], graphs[len(graphs) - k :]


def align_sample(graphs, m, cfg=SolverConfig()):
    """Align each (padded) graph to ``m``; returns the alignments."""
    return [align(g, m, cfg) for g in graphs]


def frechet_value(z, s, loss=SQUARED, cfg=SolverConfig()):
    graphs, (zp,) = _common(s, z)
    per_point = tuple(align(g, zp, cfg).cost for g in graphs)
    value = math.fsum(loss(d) for d in per_point)
    return FrechetReport(value, value, math.sqrt(value), per_point)


def first_order_residual(m, s, cfg=SolverConfig()):
    """Distance between ``m`` and the average of the sample aligned to ``m``.

    A local minimum of the squared-loss Fréchet function has residual zero.
    """
    graphs, (mp,) = _common(s, m)
    avg = mean_of([a.aligned for a in align_sample(graphs, mp, cfg)])
    return frobenius_distance(mp, avg)


@dataclass(frozen=True)
class MidpointResult:
    holds: bool
    d_xm: float
    d_ym: float
    d_xy: float

    def __bool__(self):
        return self.holds


def midpoint_check(x, y, m, cfg=SolverConfig(), tol=None):
    """Whether ``m`` sits halfway between ``x`` and ``y``. The default tolerance is
    1e-8 with the exact matcher and 1e-4 when distances are heuristic upper bounds."""
    xp, yp, mp = pad_all([x, y, m])
    if tol is None:
        tol = 1e-8 if is_exact(cfg, mp.order) else 1e-4
    d_xm = align(xp, mp, cfg).cost
    d_ym = align(yp, mp, cfg).cost
    d_xy = align(xp, yp, cfg).cost
    half = 0.5 * d_xy
    return MidpointResult(abs(d_xm - half) <= tol and abs(d_ym - half) <= tol, d_xm, d_ym, d_xy)


@dataclass(frozen=True)
class ConeReport:
    chi: float
    margins: tuple
    ray_distances: tuple
    holds: bool


def ray_distance(x, z, cfg=SolverConfig()):
    """``min_{lam >= 0} delta(lam * x, z)`` in closed form.

    For a fixed alignment the minimiser over ``lam`` is ``max(<x, z>, 0) / <x, x>``;
    maximising over alignments turns ``<x, z>`` into the kernel.
    """
    zz = inner(z, z)
    xx = inner(x, x)
    if xx == 0.0:
        return math.sqrt(zz)
    k = 0.5 * (xx + zz - align(x, z, cfg).cost ** 2)
    return math.sqrt(max(0.0, zz - max(k, 0.0) ** 2 / xx))


def uniqueness_cone_check(s, z, cfg=SolverConfig(), cap=10):
    """Sufficient condition for a unique sample mean: every sample graph's ray meets
    the ball of radius ``chi(z) / 2`` around ``z``.

    ``chi`` is computed on ``z`` as given (padding adds interchangeable zero nodes and
    would make any graph symmetric).
    """
    chi = degree_of_asymmetry(z, cap).chi
    dists = tuple(ray_distance(g, z, cfg) for g in as_sample(s).graphs)
    margins = tuple(0.5 * chi - d for d in dists)
    return ConeReport(chi, margins, dists, all(m >= 0 for m in margins))


def multiple_alignment_objective(reps):
    """``sum_{i<j} ||X_i - X_j||`` for fixed, equally shaped representations."""
    reps = list(reps)
    if len(reps) < 2:
        raise InvalidArgumentError("need at least two representations")
    terms = [frobenius_distance(reps[i], reps[j]) for i in range(len(reps)) for j in range(i + 1, len(reps))]
    return math.fsum(terms)


def majorizer(z, anchored):
    """``f_n(Z) = sum_i ||X_i - Z||^2`` for a fixed set of aligned representations."""
    return math.fsum(frobenius_distance(a, z) ** 2 for a in anchored)


__all__ = [
    "Loss",
    "Sample",
    "FrechetReport",
    "MidpointResult",
    "ConeReport",
    "SQUARED",
    "IDENTITY",
    "as_sample",
    "frechet_value",
    "first_order_residual",
    "midpoint_check",
    "ray_distance",
    "uniqueness_cone_check",
    "multiple_alignment_objective",
    "majorizer",
]
