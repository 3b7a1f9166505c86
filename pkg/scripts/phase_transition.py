"""Success-rate map over (m, K) at fixed N, written as CSV and SVG heatmap."""

import argparse
import os

from ssmusic.harness import phase_transition, records_csv, write_text
from ssmusic.svg import heatmap_svg


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--algo", default="ss_music")
    ap.add_argument("--N", type=int, default=20)
    ap.add_argument("--m-max", type=int, default=50)
    ap.add_argument("--step", type=int, default=5)
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    ap.add_argument("--out", default="results/phase")
    args = ap.parse_args()

    grid = list(range(args.step, args.m_max + 1, args.step))
    rates, _, results = phase_transition(grid, grid, args.N, args.trials, args.algo,
                                         master_seed=args.seed, threads=args.threads)
    os.makedirs(args.out, exist_ok=True)
    write_text(os.path.join(args.out, f"phase_{args.algo}.csv"), records_csv(results, vars(args)))
    write_text(os.path.join(args.out, f"phase_{args.algo}.svg"),
               heatmap_svg(rates, grid, grid, f"{args.algo} exact recovery, N={args.N}"))
    for m, row in zip(grid, rates):
        print(f"m={m:3d} " + " ".join(f"{v:.2f}" for v in row))


if __name__ == "__main__":
    main()
