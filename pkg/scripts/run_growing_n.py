#!/usr/bin/env python3
"""Sample-size sweep: tuned series loss on a fixed spiral test set.

Train and validation sets grow with n while each seed's test set stays a
fresh 2000-point draw, so the median test loss traces the estimator's
convergence rather than test-set resampling noise.
"""

import argparse

import numpy as np

from spectral_series.benchmarks import run_growing_n
from spectral_series.cli import _write_csv


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ns", type=int, nargs="+", default=[100, 200, 400, 800])
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--noise-sd", type=float, default=0.25)
    ap.add_argument("--grid-size", type=int, default=5)
    ap.add_argument("--jmax", type=int, default=40)
    ap.add_argument("--out", default="growing_n")
    args = ap.parse_args()

    loss_rows, time_rows = run_growing_n(
        ns=tuple(args.ns), n_seeds=args.seeds, noise_sd=args.noise_sd,
        grid_size=args.grid_size, j_max=args.jmax,
    )
    loss_header = ["suite", "estimator", "sweep_value", "seed", "loss", "se"]
    time_header = ["suite", "estimator", "sweep_value", "seed", "stage", "seconds"]
    _write_csv(f"{args.out}_loss.csv", loss_header,
               [[r[k] for k in loss_header] for r in loss_rows])
    _write_csv(f"{args.out}_time.csv", time_header,
               [[r[k] for k in time_header] for r in time_rows])

    estimators = sorted({r["estimator"] for r in loss_rows})
    print(f"{'n':>6} " + " ".join(f"{e:>18}" for e in estimators))
    for n in args.ns:
        meds = [np.median([r["loss"] for r in loss_rows
                           if r["sweep_value"] == n and r["estimator"] == e])
                for e in estimators]
        print(f"{n:>6} " + " ".join(f"{m:>18.5f}" for m in meds))
    print(f"wrote {args.out}_loss.csv and {args.out}_time.csv")


if __name__ == "__main__":
    main()
