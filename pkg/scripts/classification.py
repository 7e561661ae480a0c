"""Full versus condensed 1-NN accuracy on synthetic letter data."""

import argparse
import statistics

from graphmean.data import GeneratorSpec, generate
from graphmean.evaluation import nn_classify, split_dataset
from graphmean.means import MeanConfig


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--letters", default="AEF")
    ap.add_argument("--count", type=int, default=10)
    ap.add_argument("--sigma", type=float, default=0.3)
    ap.add_argument("--structural", type=float, default=0.05)
    ap.add_argument("--trials", type=int, default=10)
    ap.add_argument("--condense", default="MMM,MED,BAM")
    args = ap.parse_args()
    methods = args.condense.split(",")
    print("trial,full," + ",".join(methods))
    table = {m: [] for m in ["full"] + methods}
    for trial in range(args.trials):
        spec = GeneratorSpec(prototype=tuple(args.letters), count=args.count, noise_sigma=args.sigma, structural_noise=args.structural, seed=trial)
        train, test = split_dataset(generate(spec), 0.5, seed=trial)
        cfg = MeanConfig(seed=trial)
        table["full"].append(nn_classify(train, test, cfg).accuracy)
        for m in methods:
            table[m].append(nn_classify(train, test, cfg, condense=m).accuracy)
        print(f"{trial}," + ",".join(f"{table[m][-1]:.3f}" for m in ["full"] + methods))
    print("# median " + ", ".join(f"{m} {statistics.median(v):.3f}" for m, v in table.items()))


if __name__ == "__main__":
    main()
