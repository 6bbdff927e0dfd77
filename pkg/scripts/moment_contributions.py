"""Share of d_20 carried by each S_m for analytic N(40, 4) vs N(80, 8)."""

import argparse

import numpy as np

from nisqstab.studies import moment_contributions


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--mu", type=float, default=40.0)
    ap.add_argument("--sigma", type=float, default=4.0)
    ap.add_argument("--order", type=int, default=20)
    args = ap.parse_args()

    res = moment_contributions(args.mu, args.sigma, args.order)
    cum = np.cumsum(res.contributions)
    print(f"d_{args.order} = {res.d:.6f}")
    print(f"{'m':>3}{'S_m':>14}{'share':>10}{'cumulative':>12}")
    for m, (s, c, k) in enumerate(zip(res.terms.terms, res.contributions, cum)):
        print(f"{m:>3}{s:>14.6e}{c:>10.2%}{k:>12.2%}")


if __name__ == "__main__":
    main()
