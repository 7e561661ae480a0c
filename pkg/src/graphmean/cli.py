"""``graphmean`` command line.

Exit codes: 0 success, 1 usage error, 2 data error, 3 size-cap error. Every command
writes ``config.json`` (the fully resolved configuration) to the output directory,
which defaults to ``$GRAPHMEAN_OUTPUT_DIR`` or ``./graphmean-out``.
"""

import argparse
import glob
import json
import math
import os
import sys

from graphmean import data, evaluation
from graphmean.align import EXACT_CAP, SolverConfig, distance_matrix, pad_all
from graphmean.errors import InvalidArgumentError, ParseError, UnsupportedSizeError
from graphmean.frechet import Sample
from graphmean.graph import AttributedGraph, edge_set
from graphmean.means import ALGORITHMS, INIT_POLICIES, ORDER_POLICIES, SGG_GRID, MeanConfig, run
from graphmean.symmetry import degree_of_asymmetry

ENV_OUTPUT_DIR = "GRAPHMEAN_OUTPUT_DIR"
EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_SIZE = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _algorithm(name):
    key = name.upper()
    if key not in ALGORITHMS:
        raise argparse.ArgumentTypeError(f"unknown algorithm {name!r} (choose from {', '.join(ALGORITHMS)})")
    return key


def _algorithm_list(text):
    return [_algorithm(a) for a in text.split(",") if a]


def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _common():
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--solver-exact-threshold", type=int, default=SolverConfig.exact_threshold)
    g.add_argument("--restarts", type=int, default=SolverConfig.restarts)
    g.add_argument("--output-dir", default=None, help=f"default: ${ENV_OUTPUT_DIR} or ./graphmean-out")
    return p


def _mean_flags(p):
    p.add_argument("--waiting-time", type=int, default=MeanConfig.waiting_time)
    p.add_argument("--max-iterations", type=int, default=MeanConfig.max_iterations)
    p.add_argument("--step-size", type=float, default=None, help="SGG constant step")
    p.add_argument("--step-schedule", choices=("constant", "harmonic"), default="constant")
    p.add_argument("--order-policy", choices=ORDER_POLICIES, default="shuffled")
    p.add_argument("--init-policy", choices=[i for i in INIT_POLICIES if i != "given"], default="random")


def _input_flags(p, name="--input", required=True):
    p.add_argument(name, required=required)
    p.add_argument("--format", choices=("gxl", "native"), default=None, help="guessed from the path when omitted")
    p.add_argument("--schema", default=None, help="JSON schema for GXL attributes (default: letter x/y)")


def build_parser():
    common = _common()
    parser = _Parser(prog="graphmean", description="Sample means of attributed graphs.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("mean", parents=[common], help="compute a sample mean")
    p.add_argument("--algorithm", type=_algorithm, default="MMM")
    _input_flags(p)
    _mean_flags(p)

    p = sub.add_parser("bench", parents=[common], help="benchmark algorithms on datasets")
    p.add_argument("--protocol", choices=("random", "class"), default="random")
    p.add_argument("--datasets", nargs="+", required=True, help="native dataset files")
    p.add_argument("--algorithms", type=_algorithm_list, default=list(ALGORITHMS))
    p.add_argument("--trials", type=_positive, default=10, help="samples per dataset (random) or replicates (class)")
    p.add_argument("--size-min", type=_positive, default=5)
    p.add_argument("--size-max", type=_positive, default=20)
    p.add_argument("--tuning-trials", type=_positive, default=10)
    p.add_argument("--measure", choices=("dispersion", "matchings"), default="dispersion")
    _mean_flags(p)

    p = sub.add_parser("classify", parents=[common], help="nearest-neighbour classification")
    p.add_argument("--train", required=True, help="native labelled dataset")
    p.add_argument("--test", default=None, help="native labelled dataset (default: split --train)")
    p.add_argument("--train-fraction", type=float, default=0.5)
    p.add_argument("--condense", default="none", type=lambda s: s if s.lower() == "none" else _algorithm(s))
    _mean_flags(p)

    p = sub.add_parser("gen", parents=[common], help="generate a synthetic dataset")
    p.add_argument("--family", choices=("letter-like", "random-uniform"), default="letter-like")
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--noise-sigma", type=float, default=0.1)
    p.add_argument("--structural-noise", type=float, default=0.0)
    p.add_argument("--letters", default=None, help="subset of built-in letters, e.g. AHT")
    p.add_argument("--order-min", type=int, default=3)
    p.add_argument("--order-max", type=int, default=6)
    p.add_argument("--density", type=float, default=0.5)
    p.add_argument("--attr-dim", type=int, default=2)
    p.add_argument("--name", default=None)
    p.add_argument("--out", default="dataset.json", help="file name inside the output directory")

    p = sub.add_parser("inspect", parents=[common], help="describe a graph or dataset")
    _input_flags(p)
    p.add_argument("--eps", type=float, default=1e-9, help="edge-reporting threshold")
    p.add_argument("--symmetry", action="store_true", help=f"require a symmetry report (order <= {EXACT_CAP})")
    return parser


# ---------------------------------------------------------------------- helpers


def _output_dir(args):
    out = args.output_dir or os.environ.get(ENV_OUTPUT_DIR) or "graphmean-out"
    os.makedirs(out, exist_ok=True)
    return out


def _write(out, name, payload):
    path = os.path.join(out, name)
    mode = "wb" if isinstance(payload, bytes) else "w"
    with open(path, mode, **({} if mode == "wb" else {"encoding": "utf-8", "newline": "\n"})) as fh:
        fh.write(payload)
    return path


def _json(obj):
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"


def _solver(args):
    return SolverConfig(exact_threshold=args.solver_exact_threshold, restarts=args.restarts, seed=args.seed)


def _mean_config(args):
    return MeanConfig(
        solver=_solver(args),
        seed=args.seed,
        waiting_time=args.waiting_time,
        max_iterations=args.max_iterations,
        step_size=args.step_size,
        step_schedule=args.step_schedule,
        order_policy=args.order_policy,
        init_policy=args.init_policy,
    )


def _echo_config(out, args):
    resolved = {k: v for k, v in sorted(vars(args).items()) if k != "output_dir"}
    resolved["output_dir"] = os.path.abspath(out)
    _write(out, "config.json", _json(resolved))


def _guess_format(path):
    if path.endswith(".json"):
        return "native"
    return "gxl"


def load_input(path, fmt=None, schema_path=None):
    """A graph or :class:`~graphmean.data.Dataset` from a native file, a GXL file,
    a CXL index or a directory of GXL files."""
    if not os.path.exists(path):
        raise ParseError("no such file or directory", path)
    fmt = fmt or _guess_format(path)
    if fmt == "native":
        return data.read_native(path)
    schema = data.Schema.load(schema_path) if schema_path else data.LETTER_SCHEMA
    if os.path.isdir(path):
        files = sorted(glob.glob(os.path.join(path, "*.gxl")))
        if not files:
            raise ParseError("directory contains no .gxl files", path)
        graphs = []
        for f in files:
            with open(f, "rb") as fh:
                graphs.append(data.parse_gxl(fh.read(), schema, f))
        return data.Dataset(os.path.basename(os.path.normpath(path)), Sample(graphs), None, f"gxl:{path}")
    if path.endswith(".cxl"):
        return data.load_dataset(os.path.dirname(path) or ".", os.path.basename(path), schema)
    with open(path, "rb") as fh:
        return data.parse_gxl(fh.read(), schema, path)


def _as_dataset(x, path):
    if isinstance(x, AttributedGraph):
        return data.Dataset(os.path.basename(path), Sample([x]), None, path)
    return x


def _labelled(path):
    ds = _as_dataset(load_input(path, "native"), path)
    if ds.labels is None:
        raise ParseError("dataset has no class labels", path)
    return ds


# --------------------------------------------------------------------- commands


def cmd_mean(args, out):
    ds = _as_dataset(load_input(args.input, args.format, args.schema), args.input)
    est = run(args.algorithm, ds.sample, _mean_config(args))
    _write(out, "mean.json", data.native_serialize(est.mean))
    _write(out, "report.json", _json(est.summary()))
    print(f"{est.algorithm}: n={len(ds.sample)} dispersion={est.dispersion:.6g} iterations={est.iterations} matchings={est.matchings_solved}")


def cmd_bench(args, out):
    datasets = []
    for path in args.datasets:
        x = load_input(path, "native")
        datasets.append(_as_dataset(x, path))
    if args.protocol == "random":
        protocol = evaluation.RandomSamples(args.trials, (args.size_min, args.size_max), args.seed)
    else:
        for ds, path in zip(datasets, args.datasets):
            if ds.labels is None:
                raise ParseError("class protocol needs labelled datasets", path)
        protocol = evaluation.ClassSamples(args.trials)
    records = evaluation.benchmark(datasets, args.algorithms, protocol, _mean_config(args), SGG_GRID, args.tuning_trials, args.measure)
    profiles = evaluation.performance_profile(records)
    pairwise = evaluation.pairwise_comparison(records)
    _write(out, "records.csv", evaluation.records_csv(records))
    _write(out, "profile.csv", evaluation.profile_csv(profiles))
    _write(out, "pairwise.csv", pairwise.to_csv())
    won, total = pairwise.competitions_won, pairwise.total
    print(f"{pairwise.samples} samples, {len(records)} runs")
    for rank, a in enumerate(pairwise.ranking(), 1):
        prof = next(p for p in profiles if p.algorithm == a)
        print(f"{rank}. {a:4s} W={won[a]} total={total[a]:.1f}% wins={100 * prof.wins:.1f}% tau_max={prof.tau_max:.3f}")


def cmd_classify(args, out):
    train = _labelled(args.train)
    if args.test:
        test = _labelled(args.test)
    else:
        train, test = evaluation.split_dataset(train, args.train_fraction, args.seed)
    condense = None if args.condense.lower() == "none" else args.condense
    result = evaluation.nn_classify(train, test, _mean_config(args), condense)
    report = result.report()
    report.update(condense=condense or "none", train_size=len(train.sample), test_size=len(test.sample))
    _write(out, "classification.json", _json(report))
    print(f"accuracy={result.accuracy:.4f} ({len(test.sample)} test graphs, condense={condense or 'none'})")


def cmd_gen(args, out):
    protos = labels = None
    if args.letters:
        letters = list(dict.fromkeys(args.letters.upper()))
        unknown = [c for c in letters if c not in data.LETTERS]
        if unknown:
            raise InvalidArgumentError(f"no built-in prototype for {''.join(unknown)}")
        protos = tuple(data.letter_prototype(c) for c in letters)
        labels = tuple(letters)
    spec = data.GeneratorSpec(
        family=args.family,
        prototype=protos,
        labels=labels,
        noise_sigma=args.noise_sigma,
        structural_noise=args.structural_noise,
        count=args.count,
        seed=args.seed,
        order_range=(args.order_min, args.order_max),
        density=args.density,
        attr_dim=args.attr_dim,
        name=args.name,
    )
    ds = data.generate(spec)
    path = _write(out, args.out, data.native_serialize(ds))
    print(f"wrote {len(ds.sample)} graphs to {path}")


def _describe(g, eps, require_symmetry):
    info = {"order": g.order, "attr_dim": g.attr_dim, "directed": g.directed, "edges": len(edge_set(g, eps))}
    if g.order <= EXACT_CAP or require_symmetry:
        rep = degree_of_asymmetry(g)
        info["symmetry"] = {
            "asymmetric": rep.asymmetric,
            "chi": rep.chi if math.isfinite(rep.chi) else "inf",
            "witness": None if rep.witness is None else list(rep.witness),
        }
    else:
        info["symmetry"] = "skipped (order above exact cap)"
    return info


def cmd_inspect(args, out):
    x = load_input(args.input, args.format, args.schema)
    if isinstance(x, AttributedGraph):
        report = {"kind": "graph", **_describe(x, args.eps, args.symmetry)}
        print(f"order={x.order} attr_dim={x.attr_dim} edges={report['edges']}")
        print(f"symmetry: {report['symmetry']}")
    else:
        graphs = pad_all(list(x.graphs))
        D2 = distance_matrix(graphs, _solver(args), squared=True)
        sums = [math.fsum(row) for row in D2]
        b = min(range(len(sums)), key=lambda i: (sums[i], i))
        report = {
            "kind": "dataset",
            "name": x.name,
            "size": len(x.sample),
            "classes": x.classes(),
            "max_order": x.sample.max_order,
            "medoid": b,
            "medoid_dispersion": math.sqrt(sums[b]),
            "graphs": [_describe(g, args.eps, args.symmetry) for g in x.graphs],
        }
        print(f"{x.name}: {len(x.sample)} graphs, max order {x.sample.max_order}, classes {len(report['classes'])}")
        print(f"medoid #{b}, dispersion around it {math.sqrt(sums[b]):.6g}")
    _write(out, "inspect.json", _json(report))


COMMANDS = {"mean": cmd_mean, "bench": cmd_bench, "classify": cmd_classify, "gen": cmd_gen, "inspect": cmd_inspect}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        out = _output_dir(args)
        _echo_config(out, args)
        COMMANDS[args.command](args, out)
    except UnsupportedSizeError as exc:
        print(f"graphmean: size limit: {exc}", file=sys.stderr)
        return EXIT_SIZE
    except (ParseError, OSError) as exc:
        print(f"graphmean: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except InvalidArgumentError as exc:
        print(f"graphmean: invalid argument: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
