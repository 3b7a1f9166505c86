"""Iteration-count histograms of SS-MUSIC and iMUSIC at m in {31, 35, 40}."""

import argparse
import os

from ssmusic.harness import EnsembleSpec, iteration_histogram, write_text
from ssmusic.svg import bar_chart_svg


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, nargs="+", default=[31, 35, 40])
    ap.add_argument("--algo", nargs="+", default=["ss_music", "imusic"])
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    ap.add_argument("--out", default="results/hist")
    args = ap.parse_args()

    os.makedirs(args.out, exist_ok=True)
    for m in args.m:
        spec = EnsembleSpec(m=m, K=30, N=20, trials=args.trials, master_seed=args.seed)
        for algo in args.algo:
            hist = iteration_histogram(spec, algo, threads=args.threads)
            print(f"{algo} m={m}: {dict(sorted(hist.items()))}")
            write_text(os.path.join(args.out, f"hist_{algo}_m{m}.svg"),
                       bar_chart_svg(hist, f"{algo}, m={m}, K=30, N=20"))


if __name__ == "__main__":
    main()
