"""Distance of the MMM mean to the generating prototype as the sample grows."""

import argparse

from graphmean.data import LETTERS, letter_prototype
from graphmean.evaluation import consistency_simulation


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--letters", default="AKZ")
    ap.add_argument("--sigma", type=float, default=0.05)
    ap.add_argument("--structural", type=float, default=0.0)
    ap.add_argument("--sizes", default="5,20,80")
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--seed", type=int, default=11)
    args = ap.parse_args()
    sizes = [int(v) for v in args.sizes.split(",")]
    print("letter,n,median_distance,median_variation_per_graph")
    for c in args.letters:
        if c not in LETTERS:
            raise SystemExit(f"unknown letter {c}")
        rows = consistency_simulation(letter_prototype(c), args.sigma, sizes, args.trials, structural_noise=args.structural, seed=args.seed)
        for r in rows:
            print(f"{c},{r.n},{r.median_distance:.6f},{r.median_normalized_variation:.6f}")


if __name__ == "__main__":
    main()
