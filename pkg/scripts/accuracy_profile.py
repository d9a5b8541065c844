"""Empirical vs theoretical accuracy of truncated decompositions.

Prints, for each fraction K~/K, the quartiles of the empirical accuracy
over the simulated networks next to the closed-form expectation for
K = 30, alpha = 1.
"""

import argparse

import numpy as np

from graphlets.experiments import interpolate_empirical, weighted_trial
from graphlets.theory import accuracy_curve, interpolate_curve


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--runs", type=int, default=100)
    ap.add_argument("--noisy", action="store_true")
    ap.add_argument("--k", type=int, default=30)
    ap.add_argument("--alpha", type=int, default=1)
    ap.add_argument("--fractions", type=float, nargs="+", default=[0.1, 0.25, 0.5, 0.75, 0.9])
    args = ap.parse_args()

    out = [weighted_trial(s, noisy=args.noisy) for s in range(args.runs)]
    theory = accuracy_curve(args.k, args.alpha)
    print("# fraction\tq25\tmedian\tq75\ttheory")
    dev = []
    for f in args.fractions:
        emp = np.array([interpolate_empirical(o.empirical_curve, f) for o in out])
        q25, med, q75 = np.percentile(emp, [25, 50, 75])
        t = interpolate_curve(theory, f)
        dev.append(abs(med - t))
        print(f"{f:g}\t{q25:.4f}\t{med:.4f}\t{q75:.4f}\t{t:.4f}")
    print(f"# mean |median - theory| = {np.mean(dev):.4f}")


if __name__ == "__main__":
    main()
