"""One-parameter sweeps around (m, K, N) = (40, 30, 20) for all algorithms.

``--vary`` picks the swept quantity: m, K, N or snr (noisy, m=40).
"""

import argparse
import os
from dataclasses import replace

from ssmusic.harness import ALGORITHMS, EnsembleSpec, records_csv, run_sweep, write_text
from ssmusic.svg import line_chart_svg

GRIDS = {
    "m": list(range(31, 46, 2)),
    "K": list(range(10, 40, 3)),
    "N": [1, 2, 5, 10, 15, 20, 25, 30],
    "snr": [10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0],
}
ALL = [a for a in ALGORITHMS if a != "music"]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--vary", choices=sorted(GRIDS), default="m")
    ap.add_argument("--algo", nargs="+", default=ALL)
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    ap.add_argument("--out", default="results/sweeps")
    args = ap.parse_args()

    base = EnsembleSpec(m=40, K=30, N=20, trials=args.trials, master_seed=args.seed)
    field = "snr_db" if args.vary == "snr" else args.vary
    grid = GRIDS[args.vary]
    results = run_sweep([replace(base, **{field: v}) for v in grid], args.algo, threads=args.threads)
    series = {a: [r.success_rate(a) for r in results] for a in args.algo}
    for a, rates in series.items():
        print(f"{a:10s} " + " ".join(f"{v:.2f}" for v in rates))

    os.makedirs(args.out, exist_ok=True)
    write_text(os.path.join(args.out, f"sweep_{args.vary}.csv"), records_csv(results, vars(args)))
    write_text(os.path.join(args.out, f"sweep_{args.vary}.svg"),
               line_chart_svg(grid, series, f"recovery vs {args.vary}", args.vary))


if __name__ == "__main__":
    main()
