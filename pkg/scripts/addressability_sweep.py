"""F_A against the correlation strength u: closed form and Monte Carlo."""

import argparse

import numpy as np

from nisqstab.addressability import fa_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--shots", type=int, default=1_000_000)
    ap.add_argument("--step", type=float, default=0.05)
    ap.add_argument("--p", type=float, default=0.0)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    grid = np.round(np.arange(0.0, 0.5 + 1e-9, args.step), 10)
    rows = fa_sweep(grid.tolist(), args.shots, args.seed, args.p)
    print(f"{'u':>6}{'closed form':>14}{'monte carlo':>14}{'abs err':>11}")
    for r in rows:
        print(f"{r.u:>6.3f}{r.closed_form:>14.6f}{r.monte_carlo:>14.6f}{r.abs_error:>11.2e}")


if __name__ == "__main__":
    main()
