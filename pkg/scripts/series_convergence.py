"""Show the truncated reconstruction series converging to the closed-form state value.

    python3 scripts/series_convergence.py --seed 2 --beta 1.5
"""

import argparse
import random

from toeplitz_kms.kms import StateSpec, kms_series_oracle, kms_state_eval
from toeplitz_kms.suites import random_state, relevant_monomial


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--beta", type=float, default=1.0)
    parser.add_argument("--n", type=int, default=3)
    parser.add_argument("--k", type=int, default=1)
    args = parser.parse_args()
    rng = random.Random(args.seed)
    fx = random_state(rng, n=args.n, k=args.k)
    spec = StateSpec(args.beta, fx.spec.dynamics, fx.spec.measure, fx.spec.basis)
    x = relevant_monomial(rng, fx)
    closed = kms_state_eval(x, spec)
    print(f"element {x.to_json()}")
    print(f"r = {list(spec.dynamics.r)}, beta = {args.beta}, closed form = {closed:.15g}")
    print(f"{'cutoff':>6} {'|error|':>12} {'tail bound':>12}")
    for cutoff in (1, 2, 4, 8, 16, 32):
        rep = kms_series_oracle(x, spec, cutoff=cutoff)
        print(f"{cutoff:>6} {abs(rep.value - closed):12.3e} {rep.tail_bound:12.3e}")


if __name__ == "__main__":
    main()
