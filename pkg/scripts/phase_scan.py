"""Evaluate the KMS_beta family of a config over a fine beta grid and write a CSV.

    python3 scripts/phase_scan.py configs/half_block.json --betas 0.05:6:60 --out scan.csv
"""

import argparse
import sys

from toeplitz_kms.cli import load_config
from toeplitz_kms.kms import StateSpec, phase_scan, scan_csv
from toeplitz_kms.lattice import degeneracy_group


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("config")
    parser.add_argument("--betas", default="0.1:5:50", help="start:stop:count (inclusive, linear)")
    parser.add_argument("--out")
    args = parser.parse_args()
    start, stop, count = args.betas.split(":")
    start, stop, count = float(start), float(stop), int(count)
    betas = [start + (stop - start) * i / max(count - 1, 1) for i in range(count)]
    cfg = load_config(args.config)
    dyn = cfg.dynamics()
    theta = cfg.theta_matrix()
    basis = degeneracy_group(theta.restrict(range(dyn.k, theta.n)))
    template = StateSpec(betas[0], dyn, cfg.measure_for(basis.m), basis)
    text = scan_csv(phase_scan(betas, cfg.element_list(theta), template))
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


if __name__ == "__main__":
    main()
