"""Sampling SNR of MBD and TVD for N(10, 1) vs N(10, 4), over several seeds."""

import argparse

import numpy as np

from nisqstab.studies import snr_study


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-samples", type=int, default=8192)
    ap.add_argument("--n-reps", type=int, default=400)
    ap.add_argument("--bins", type=int, default=20)
    ap.add_argument("--order", type=int, default=4)
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0, help="first seed")
    args = ap.parse_args()

    ratios = []
    print(f"{'seed':>6}{'MBD SNR':>12}{'TVD SNR':>12}")
    for s in range(args.seed, args.seed + args.seeds):
        r = snr_study(args.n_samples, args.n_reps, s, args.bins, args.order)
        ratios.append(r.mbd_snr / r.tvd_snr)
        print(f"{s:>6}{r.mbd_snr:>12.3f}{r.tvd_snr:>12.3f}")
    ratios = np.array(ratios)
    print(f"MBD ahead in {(ratios > 1).sum()}/{ratios.size} runs, "
          f"median ratio {np.median(ratios):.3f}")


if __name__ == "__main__":
    main()
