"""S_m between two samples of one distribution as the sample size grows."""

import argparse

from scipy import stats

from nisqstab.studies import convergence_profile


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[128, 512, 2048, 8192, 32768])
    ap.add_argument("--max-m", type=int, default=4)
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    t = convergence_profile(stats.norm(10, 1), args.sizes, args.max_m, args.seed, args.seeds)
    print(f"{'N':>7}" + "".join(f"{'S_' + str(m):>12}" for m in range(args.max_m + 1)))
    for n, row in zip(t.sample_sizes, t.terms):
        print(f"{n:>7}" + "".join(f"{v:>12.4e}" for v in row))


if __name__ == "__main__":
    main()
