#!/usr/bin/env python3
"""Generate the rescaled-spectrum data for the n=6 / n=7 comparison plot.

Writes a CSV with columns zeta,n,index,epsilon and prints, for a few sample
couplings, how many levels the two chains share.
"""

import argparse

import numpy as np

from susyxyz.cli import main as cli_main
from susyxyz.spinchain import build_sector_basis, common_levels, rescaled_spectrum

if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="fig1.csv")
    ap.add_argument("--grid", default="0:3:0.05")
    args = ap.parse_args()

    code = cli_main(["fig1", "--zeta-grid", args.grid, "--out", args.out])
    print(f"wrote {args.out} (exit {code})")

    s6 = build_sector_basis(6, -1.0)
    s7 = build_sector_basis(7, 1.0)
    for zeta in (0.0, 0.5, 1.0, 2.0, 3.0):
        e6 = rescaled_spectrum(6, zeta, s6)
        e7 = rescaled_spectrum(7, zeta, s7)
        matched, only6, only7 = common_levels(e6, e7, tol=1e-8)
        zeros = int(np.sum(np.abs(e7) < 1e-9))
        print(
            f"zeta={zeta:4.2f}: {len(matched)} shared levels, "
            f"{len(only6)}/{len(only7)} unmatched (n=6/n=7), "
            f"{zeros} zero modes at n=7"
        )
