"""Print the degeneracy group and invariant lattice for random rational matrices.

    python3 scripts/lattice_report.py --n 3 --samples 5 --seed 1
"""

import argparse
import random

from toeplitz_kms.config import theta_to_json
from toeplitz_kms.lattice import box_oracle, degeneracy_group, in_degeneracy_group
from toeplitz_kms.suites import random_theta


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=3)
    parser.add_argument("--samples", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--radius", type=int, default=3)
    args = parser.parse_args()
    rng = random.Random(args.seed)
    for _ in range(args.samples):
        theta = random_theta(rng, args.n)
        basis = degeneracy_group(theta)
        bad = box_oracle(basis, lambda x, t=theta: in_degeneracy_group(t, x), args.radius)
        entries = ", ".join(f"({e['i']},{e['j']})={e['rational']}" + "".join(f"+{v}*{k}" for k, v in e["symbols"].items())
                            for e in theta_to_json(theta)["theta"]) or "zero"
        print(f"theta: {entries}")
        print(f"  rank {basis.m}, invariant factors {list(basis.a)}, box disagreements {len(bad)}")
        for g in basis.generators():
            print(f"  generator {list(g)}")


if __name__ == "__main__":
    main()
