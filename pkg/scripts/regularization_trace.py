"""Print the lambda_s trace of the regularized solver for a few operators.

Shows lambda_s decreasing to the radius as s shrinks, next to the
Collatz-Wielandt bracket at each x_s and an independent oracle value.
"""

import argparse
import math

import numpy as np

from conewise import Linear, MaxPlusConjugate, SolverConfig, SupFamily, eigen_solve
from conewise.oracles import karp_cycle_mean, perron_2x2, policy_enumeration


def cases():
    yield "linear [[1,2],[3,4]]", Linear([[1.0, 2.0], [3.0, 4.0]]), perron_2x2(1, 2, 3, 4)
    w = [[-math.inf, 1.0], [2.0, -math.inf]]
    yield "max-plus 2-cycle", MaxPlusConjugate(w), math.exp(karp_cycle_mean(w))
    fam = SupFamily([np.diag([2.0, 1.0]), np.diag([1.0, 3.0])])
    yield "sup of diag(2,1), diag(1,3)", fam, policy_enumeration(fam).value


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--schedule", choices=["geometric", "harmonic"], default="geometric")
    parser.add_argument("--max-outer", type=int, default=60)
    args = parser.parse_args()
    cfg = SolverConfig(schedule=args.schedule, max_outer=args.max_outer)

    for name, op, oracle in cases():
        res = eigen_solve(op, cfg)
        print(f"\n{name}: radius {res.radius!r}, oracle {oracle!r}")
        print(f"{'s':>10} {'lambda_s':>22} {'iters':>6} {'m(h(x)/x)':>22} {'M(h(x)/x)':>22}")
        for row in res.trace:
            print(f"{row.s:10.3g} {row.lam:22.17g} {row.inner_iters:6d} {row.bracket_lo:22.17g} {row.bracket_hi:22.17g}")
        for note in res.notes:
            print("  note:", note)


if __name__ == "__main__":
    main()
