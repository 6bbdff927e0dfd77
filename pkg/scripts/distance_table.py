"""d_4 and d_20 of each comparison distribution against N(mu, sigma) on [0, 1]."""

import argparse

from nisqstab.studies import PUBLISHED_TABLE, distance_table


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--low", type=int, default=4)
    ap.add_argument("--high", type=int, default=20)
    ap.add_argument("--quad-points", type=int, default=1 << 16)
    args = ap.parse_args()

    rows = distance_table(args.low, args.high, quad_points=args.quad_points)
    print(f"{'distribution':<24}{'d_' + str(args.low):>12}{'d_' + str(args.high):>12}"
          f"{'rel err':>11}{'published d4':>14}")
    for r in rows:
        pub = PUBLISHED_TABLE.get(r.label)
        pub = "-" if pub is None else f"{pub[0]:.5f}"
        rel = "-" if r.d_high == 0 else f"{abs(r.relative_error):.4%}"
        print(f"{r.label:<24}{r.d_low:>12.6f}{r.d_high:>12.6f}{rel:>11}{pub:>14}")


if __name__ == "__main__":
    main()
