#!/usr/bin/env python3
"""Estimator comparison on the noisy spiral.

Pits the tuned radial series against its polynomial-kernel variants and the
classical references (KRR, Nadaraya-Watson, k-NN). The degree-1 polynomial
series is the linear-projection reference the adaptive basis should beat.
"""

import argparse

import numpy as np

from spectral_series.benchmarks import run_spiral_compare
from spectral_series.cli import _write_csv


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=400)
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--noise-sd", type=float, default=0.1)
    ap.add_argument("--grid-size", type=int, default=5)
    ap.add_argument("--jmax", type=int, default=30)
    ap.add_argument("--out", default="spiral_compare")
    args = ap.parse_args()

    loss_rows, time_rows = run_spiral_compare(
        n=args.n, n_seeds=args.seeds, noise_sd=args.noise_sd,
        grid_size=args.grid_size, j_max=args.jmax,
    )
    loss_header = ["suite", "estimator", "sweep_value", "seed", "loss", "se"]
    time_header = ["suite", "estimator", "sweep_value", "seed", "stage", "seconds"]
    _write_csv(f"{args.out}_loss.csv", loss_header,
               [[r[k] for k in loss_header] for r in loss_rows])
    _write_csv(f"{args.out}_time.csv", time_header,
               [[r[k] for k in time_header] for r in time_rows])

    print(f"{'estimator':>18} {'median loss':>12} {'IQR':>22}")
    for est in ("series-radial", "series-poly", "series-poly1",
                "krr-radial", "nw", "knn"):
        losses = [r["loss"] for r in loss_rows if r["estimator"] == est]
        lo, med, hi = np.percentile(losses, [25, 50, 75])
        print(f"{est:>18} {med:>12.5f}   [{lo:>9.5f}, {hi:>9.5f}]")
    print(f"wrote {args.out}_loss.csv and {args.out}_time.csv")


if __name__ == "__main__":
    main()
