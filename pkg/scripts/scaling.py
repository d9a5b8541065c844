"""Decomposition wall-clock against the number of positive edges.

Runs are sequential; timing concurrent runs on shared cores is meaningless.
"""

import argparse
import statistics

from graphlets.experiments import scaling_network, time_decomposition


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[10_000, 20_000, 40_000])
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--noisy", action="store_true", help="fit Poisson draws instead of rate matrices")
    args = ap.parse_args()

    print("# target\tseed\tedges\tcandidate_s\tem_s\ttotal_s")
    medians = []
    for size in args.sizes:
        totals = []
        for seed in range(args.seeds):
            y = scaling_network(size, seed, noisy=args.noisy)
            cand, em, total = time_decomposition(y)
            totals.append(total)
            print(f"{size}\t{seed}\t{len(y)}\t{cand:.3f}\t{em:.3f}\t{total:.3f}", flush=True)
        medians.append(statistics.median(totals))
        print(f"# median {size}: {medians[-1]:.3f}s", flush=True)
    for (a, ma), (b, mb) in zip(zip(args.sizes, medians), zip(args.sizes[1:], medians[1:])):
        print(f"# {a} -> {b}: x{mb / ma:.2f}")


if __name__ == "__main__":
    main()
