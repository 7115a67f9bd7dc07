"""Repeated 23/5 row splits on the hunting-spider data (not bundled).

Expected input: a directory holding ``X.csv`` (28 sites x 6 environmental
covariates) and ``Y.csv`` (28 x 12 abundance counts), optional header rows.
Counts are turned into presence/absence (count > 0). Covariates are used as
given; standardize them beforehand if desired.

    python3 scripts/spider_experiment.py /path/to/spider --reps 100
"""

import argparse
from pathlib import Path

from binrrr import io
from binrrr.cli import _write_experiment
from binrrr.experiment import METHODS, run_split_experiment
from binrrr.samplers import SamplerConfig


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("data_dir")
    ap.add_argument("--reps", type=int, default=100)
    ap.add_argument("--methods", default=",".join(METHODS))
    ap.add_argument("--iterations", type=int, default=10000)
    ap.add_argument("--burn-in", type=int, default=3000)
    ap.add_argument("--lambda", dest="lam", default="m")
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", default="spider_out")
    args = ap.parse_args()

    root = Path(args.data_dir)
    X = io.read_design_csv(root / "X.csv")
    Y = io.read_response_csv(root / "Y.csv", coding="threshold", threshold=0.0)
    if X.shape[0] != Y.shape[0]:
        raise SystemExit(f"row mismatch: X has {X.shape[0]}, Y has {Y.shape[0]}")
    cfg = SamplerConfig(iterations=args.iterations, burn_in=args.burn_in)
    res = run_split_experiment(
        X, Y, args.methods.split(","), args.reps, cfg, seed=args.seed, lam=args.lam,
        train_rows=23, test_rows=5, label="spider", n_jobs=args.jobs,
    )
    _write_experiment(Path(args.out), [res])


if __name__ == "__main__":
    main()
