"""Benchmark harness: run records, performance ratios and profiles, pairwise
win matrices, a consistency simulation and nearest-neighbour classification.

All CSV output is sorted by key and written with ``repr`` floats, so two runs with
the same configuration produce identical bytes.
"""

import csv
import io
import math
import statistics
from dataclasses import dataclass, field, replace

import numpy as np

from graphmean.align import align
from graphmean.data import Dataset, GeneratorSpec, generate
from graphmean.errors import InvalidArgumentError
from graphmean.means import SGG_GRID, MeanConfig, run
from graphmean.rng import SplitMix64, derive_seed

RECORD_FIELDS = (
    "sample_id",
    "algorithm",
    "performance",
    "variation",
    "matchings",
    "matchings_until_best",
    "iterations",
    "step_size",
    "seed",
)


@dataclass(frozen=True)
class RunRecord:
    """One algorithm on one sample. ``performance`` is the quantity compared
    (sample dispersion by default; lower is better)."""

    algorithm: str
    sample_id: str
    performance: float
    matchings: int
    seed: int
    variation: float = math.nan
    matchings_until_best: int = 0
    iterations: int = 0
    step_size: float | None = None

    def __post_init__(self):
        if not self.performance >= 0:
            raise InvalidArgumentError("performance must be >= 0")

    def row(self):
        return [
            self.sample_id,
            self.algorithm,
            repr(float(self.performance)),
            repr(float(self.variation)),
            self.matchings,
            self.matchings_until_best,
            self.iterations,
            "" if self.step_size is None else repr(float(self.step_size)),
            self.seed,
        ]


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def records_csv(records):
    ordered = sorted(records, key=lambda r: (r.sample_id, r.algorithm))
    return _csv(RECORD_FIELDS, [r.row() for r in ordered])


def by_sample(records):
    out = {}
    for r in records:
        cell = out.setdefault(r.sample_id, {})
        if r.algorithm in cell:
            raise InvalidArgumentError(f"duplicate record for {r.algorithm} on {r.sample_id}")
        cell[r.algorithm] = r.performance
    return out


def performance_ratio(performances):
    """``{algorithm: p / min p}`` for the performances on one sample.

    When the best performance is zero, algorithms achieving zero get ratio 1 and
    all others ``inf``.
    """
    if not performances:
        raise InvalidArgumentError("no performances given")
    best = min(performances.values())
    if best == 0:
        return {a: 1.0 if p == 0 else math.inf for a, p in performances.items()}
    return {a: p / best for a, p in performances.items()}


@dataclass(frozen=True)
class PerformanceProfile:
    """Empirical distribution ``P(tau)`` of one algorithm's performance ratios."""

    algorithm: str
    ratios: tuple

    def __call__(self, tau):
        return sum(r <= tau for r in self.ratios) / len(self.ratios)

    @property
    def wins(self):
        return self(1.0)

    @property
    def tau_max(self):
        finite = [r for r in self.ratios if math.isfinite(r)]
        return max(finite) if finite else math.nan

    def breakpoints(self):
        """``(tau, P(tau))`` at every distinct finite ratio."""
        taus = sorted({r for r in self.ratios if math.isfinite(r)})
        return [(t, self(t)) for t in taus]


def performance_profile(records):
    """One profile per algorithm over all samples. Every algorithm must have a
    record on every sample."""
    table = by_sample(records)
    algorithms = sorted({a for cell in table.values() for a in cell})
    ratios = {a: [] for a in algorithms}
    for sid in sorted(table):
        cell = table[sid]
        if set(cell) != set(algorithms):
            raise InvalidArgumentError(f"sample {sid!r} lacks records for some algorithms")
        for a, r in performance_ratio(cell).items():
            ratios[a].append(r)
    return [PerformanceProfile(a, tuple(sorted(ratios[a]))) for a in algorithms]


def profile_csv(profiles):
    rows = [[p.algorithm, repr(float(t)), repr(float(v))] for p in profiles for t, v in p.breakpoints()]
    return _csv(("algorithm", "tau", "fraction"), rows)


@dataclass(frozen=True)
class PairwiseComparison:
    """``percent[i][j]``: share of samples (in %) on which algorithm i strictly
    beats algorithm j. Values within ``tie_tol`` (relative) count as ties.

    ``wins`` holds the integer counts, so ``wins[i, j] + wins[j, i] + tie_counts[i, j]``
    equals the number of samples exactly.
    """

    algorithms: tuple
    wins: np.ndarray
    samples: int

    @property
    def percent(self):
        return 100.0 * self.wins / self.samples

    @property
    def tie_counts(self):
        t = self.samples - self.wins - self.wins.T
        np.fill_diagonal(t, self.samples)
        return t

    @property
    def ties(self):
        return 100.0 * self.tie_counts / self.samples

    @property
    def competitions_won(self):
        """Number of opponents each algorithm beats more often than it loses to."""
        w = self.wins
        return {a: int(np.sum(w[i] > w[:, i])) for i, a in enumerate(self.algorithms)}

    @property
    def total(self):
        """Percentage of all pairwise comparisons won."""
        k = len(self.algorithms)
        if k < 2:
            return {a: 0.0 for a in self.algorithms}
        return {a: float(self.percent[i].sum() / (k - 1)) for i, a in enumerate(self.algorithms)}

    def ranking(self):
        won, total = self.competitions_won, self.total
        return sorted(self.algorithms, key=lambda a: (-won[a], -total[a], a))

    def to_csv(self):
        rows = [[a] + [repr(float(v)) for v in self.percent[i]] for i, a in enumerate(self.algorithms)]
        won, total = self.competitions_won, self.total
        for i, a in enumerate(self.algorithms):
            rows[i] += [won[a], repr(total[a])]
        return _csv(("algorithm", *self.algorithms, "competitions_won", "total_percent"), rows)


def beats(a, b, tie_tol=1e-9):
    """``a`` strictly better (smaller) than ``b`` beyond a relative tolerance."""
    return a < b - tie_tol * max(abs(a), abs(b))


def pairwise_comparison(records, tie_tol=1e-9):
    table = by_sample(records)
    algorithms = tuple(sorted({a for cell in table.values() for a in cell}))
    k = len(algorithms)
    wins = np.zeros((k, k), dtype=np.int64)
    for cell in table.values():
        for i, a in enumerate(algorithms):
            for j, b in enumerate(algorithms):
                if i != j and a in cell and b in cell and beats(cell[a], cell[b], tie_tol):
                    wins[i, j] += 1
    return PairwiseComparison(algorithms, wins, len(table))


# ------------------------------------------------------------------- benchmark


@dataclass(frozen=True)
class RandomSamples:
    """``count`` random subsets per dataset with sizes drawn from ``size_range``."""

    count: int = 10
    size_range: tuple = (5, 20)
    seed: int = 0

    def samples(self, dataset):
        lo, hi = self.size_range
        if not 1 <= lo <= hi:
            raise InvalidArgumentError("bad size_range")
        if lo > len(dataset.sample):
            raise InvalidArgumentError(f"dataset {dataset.name!r} is smaller than the minimum sample size")
        rng = SplitMix64(derive_seed(self.seed, "random-samples", dataset.name))
        out = []
        for k in range(self.count):
            size = rng.integers(lo, min(hi, len(dataset.sample)) + 1)
            idx = sorted(rng.choice(len(dataset.sample), size))
            out.append((f"{dataset.name}/r{k:04d}", dataset.sample.subset(idx)))
        return out


@dataclass(frozen=True)
class ClassSamples:
    """Each class of each dataset is one sample; ``replicates`` runs per class
    with different seeds."""

    replicates: int = 1

    def samples(self, dataset):
        if dataset.labels is None:
            raise InvalidArgumentError(f"dataset {dataset.name!r} has no labels")
        out = []
        for c, idx in dataset.by_class().items():
            for r in range(self.replicates):
                out.append((f"{dataset.name}/{c}/{r}", dataset.sample.subset(idx)))
        return out


def _record(algorithm, sid, est, seed, measure):
    perf = est.dispersion if measure == "dispersion" else float(est.matchings_until_best)
    return RunRecord(
        algorithm,
        sid,
        perf,
        est.matchings_solved,
        seed,
        est.best_variation,
        est.matchings_until_best,
        est.iterations,
        est.step_size,
    )


def _tuned_step(sample, cfg, seed, grid, trials):
    """Constant step with the best average variation over ``trials`` seeds."""
    best_eta, best_avg = None, math.inf
    for eta in grid:
        vals = [
            run("SGG", sample, replace(cfg, seed=derive_seed(seed, "tune", t), step_size=eta, step_schedule="constant")).best_variation
            for t in range(trials)
        ]
        avg = math.fsum(vals) / trials
        if avg < best_avg:
            best_eta, best_avg = eta, avg
    return best_eta


def benchmark(datasets, algorithms, protocol, cfg=MeanConfig(), grid=SGG_GRID, tuning_trials=10, measure="dispersion"):
    """Run every algorithm on every sample drawn by ``protocol``.

    SGG uses a constant step from ``grid``: under :class:`RandomSamples` the best
    result over the grid is kept per sample; under :class:`ClassSamples` the step
    with the best average over ``tuning_trials`` seeds is chosen per class first.
    """
    if measure not in ("dispersion", "matchings"):
        raise InvalidArgumentError("measure must be 'dispersion' or 'matchings'")
    algorithms = [a.upper() for a in algorithms]
    records = []
    for ds in datasets:
        for sid, sample in protocol.samples(ds):
            seed = derive_seed(cfg.seed, "bench", sid)
            tuned = None
            for a in algorithms:
                acfg = replace(cfg, seed=seed)
                if a == "SGG" and isinstance(protocol, ClassSamples):
                    tuned = tuned or _tuned_step(sample, cfg, seed, grid, tuning_trials)
                    est = run(a, sample, replace(acfg, step_size=tuned, step_schedule="constant"))
                elif a == "SGG" and cfg.step_size is None and cfg.step_schedule == "constant":
                    runs = [run(a, sample, replace(acfg, step_size=eta)) for eta in grid]
                    est = min(runs, key=lambda e: e.best_variation)
                    est = replace(est, matchings_solved=sum(e.matchings_solved for e in runs))
                else:
                    est = run(a, sample, acfg)
                records.append(_record(a, sid, est, seed, measure))
    return sorted(records, key=lambda r: (r.sample_id, r.algorithm))


# ----------------------------------------------------------------- consistency


@dataclass(frozen=True)
class ConsistencyRow:
    n: int
    median_distance: float
    median_normalized_variation: float
    distances: tuple = field(repr=False)
    normalized_variations: tuple = field(repr=False)


def consistency_simulation(prototype, noise, n_grid, trials, cfg=MeanConfig(), structural_noise=0.0, seed=0):
    """For each sample size, draw ``trials`` samples of noisy prototype copies,
    compute their MMM means and report the median distance to the prototype and
    the median ``V_n / n``."""
    rows = []
    for n in n_grid:
        dists, norm = [], []
        for t in range(trials):
            spec = GeneratorSpec(
                prototype=prototype,
                noise_sigma=noise,
                structural_noise=structural_noise,
                count=n,
                seed=derive_seed(seed, "consistency", n, t),
            )
            sample = generate(spec).sample
            est = run("MMM", sample, replace(cfg, seed=derive_seed(seed, "mmm", n, t)))
            dists.append(align(est.mean, prototype, cfg.solver).cost)
            norm.append(est.best_variation / n)
        rows.append(ConsistencyRow(n, statistics.median(dists), statistics.median(norm), tuple(dists), tuple(norm)))
    return rows


# -------------------------------------------------------------- classification


def condensed_prototypes(train, algorithm="MMM", cfg=MeanConfig()):
    """One mean per class, computed with ``algorithm``; keys follow class order."""
    protos = {}
    for c, idx in train.by_class().items():
        est = run(algorithm, train.sample.subset(idx), replace(cfg, seed=derive_seed(cfg.seed, "condense", str(c))))
        protos[c] = est.mean
    return protos


@dataclass(frozen=True)
class Classification:
    accuracy: float
    classes: tuple
    confusion: np.ndarray
    predictions: tuple

    def report(self):
        return {
            "accuracy": self.accuracy,
            "classes": list(self.classes),
            "confusion": self.confusion.tolist(),
            "per_class_accuracy": {
                str(c): (float(self.confusion[i, i] / row) if (row := self.confusion[i].sum()) else None)
                for i, c in enumerate(self.classes)
            },
        }


def nn_classify(train, test, cfg=MeanConfig(), condense=None):
    """1-nearest-neighbour classification under the graph metric.

    ``train`` is a labelled :class:`Dataset` or a ``{class: graph}`` mapping of
    prototypes. With ``condense`` set to an algorithm name, the training set is first
    replaced by one mean per class. Ties go to the class listed first.
    """
    if isinstance(train, Dataset):
        if condense is not None:
            protos = condensed_prototypes(train, condense, cfg)
            refs = list(protos.items())
        else:
            refs = list(zip(train.labels, train.graphs))
        classes = train.classes()
    else:
        refs = list(train.items())
        classes = list(train)
    if test.labels is None:
        raise InvalidArgumentError("test data needs labels")
    index = {c: i for i, c in enumerate(classes)}
    for c in test.labels:
        if c not in index:
            index[c] = len(classes)
            classes.append(c)
    confusion = np.zeros((len(classes), len(classes)), dtype=np.int64)
    predictions = []
    for g, truth in zip(test.graphs, test.labels):
        best = None
        for c, ref in refs:
            d = align(g, ref, cfg.solver).cost
            key = (d, index[c])
            if best is None or key < best[0]:
                best = (key, c)
        pred = best[1]
        predictions.append(pred)
        confusion[index[truth], index[pred]] += 1
    accuracy = float(np.trace(confusion) / len(predictions))
    return Classification(accuracy, tuple(classes), confusion, tuple(predictions))


def split_dataset(dataset, train_fraction=0.5, seed=0):
    """Stratified random train/test split."""
    rng = SplitMix64(derive_seed(seed, "split", dataset.name))
    train, test = [], []
    for idx in dataset.by_class().values():
        perm = [idx[i] for i in rng.permutation(len(idx))]
        k = max(1, round(train_fraction * len(idx)))
        train += perm[:k]
        test += perm[k:]
    train.sort()
    test.sort()
    return (
        Dataset(f"{dataset.name}:train", dataset.sample.subset(train), None, dataset.provenance),
        Dataset(f"{dataset.name}:test", dataset.sample.subset(test), None, dataset.provenance),
    )


__all__ = [
    "RunRecord",
    "PerformanceProfile",
    "PairwiseComparison",
    "RandomSamples",
    "ClassSamples",
    "ConsistencyRow",
    "Classification",
    "records_csv",
    "profile_csv",
    "performance_ratio",
    "performance_profile",
    "pairwise_comparison",
    "beats",
    "benchmark",
    "consistency_simulation",
    "condensed_prototypes",
    "nn_classify",
    "split_dataset",
]
