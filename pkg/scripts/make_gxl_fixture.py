"""Write the small GXL/CXL fixture used by the test-suite (tests/data/letters)."""

import argparse
import os

from graphmean.data import GeneratorSpec, generate, letter_prototype, write_cxl, write_gxl


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "tests", "data", "letters"))
    ap.add_argument("--seed", type=int, default=11)
    args = ap.parse_args()
    letters = "AHT"
    spec = GeneratorSpec(
        prototype=tuple(letter_prototype(c) for c in letters),
        labels=tuple(letters),
        noise_sigma=0.15,
        count=4,
        seed=args.seed,
    )
    ds = generate(spec)
    os.makedirs(args.out, exist_ok=True)
    entries = []
    for k, (g, label) in enumerate(zip(ds.graphs[:10], ds.labels[:10])):
        name = f"{label}P1_{k:04d}.gxl"
        with open(os.path.join(args.out, name), "wb") as fh:
            fh.write(write_gxl(g, graph_id=f"{label}P1_{k:04d}", precision=6))
        entries.append((name, label))
    with open(os.path.join(args.out, "index.cxl"), "wb") as fh:
        fh.write(write_cxl(entries))
    print(f"wrote {len(entries)} graphs to {args.out}")


if __name__ == "__main__":
    main()
