#!/usr/bin/env python3
"""Uniform-draw ensemble experiment on a random 15x10 Gaussian system.

Same layout as volume_ensemble.py but rows are picked uniformly and steps
are relaxed to match the quasi-projector expectation; the bound columns
use the vol-max condition number 1 - sigma_hat_min^2 / vol_n_max. The
undershoot branch tracks that bound; pass --mode overshoot to see the
typically faster mirrored branch.
"""

import argparse
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from kacz.cli import main as kacz_main


def run(outdir: str, seed: int, members: int, iters: int, mode: str, vmax_mode: str) -> None:
    os.makedirs(outdir, exist_ok=True)
    out = os.path.join(outdir, f"uniform_ensemble_{mode}_seed{seed}.csv")
    code = kacz_main([
        "ensemble", "--synthetic", "15", "10", "--n-list", "1,2,3",
        "--members", str(members), "--iters", str(iters),
        "--sampler", "uniform", "--mode", mode, "--vmax-mode", vmax_mode,
        "--seed", str(seed), "-o", out,
    ])
    if code != 0:
        raise SystemExit(code)
    print(f"wrote {out}")


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", default="results")
    parser.add_argument("--seed", type=int, default=123)
    parser.add_argument("--members", type=int, default=15)
    parser.add_argument("--iters", type=int, default=2000)
    parser.add_argument("--mode", choices=["undershoot", "overshoot"], default="undershoot")
    parser.add_argument("--vmax-mode", choices=["exact", "running"], default="exact")
    args = parser.parse_args()
    run(args.outdir, args.seed, args.members, args.iters, args.mode, args.vmax_mode)
