#!/usr/bin/env python3
"""Adjudicate the two circulating closed forms for the hat norm of the
quaternionic symmetric-space operator against a brute-force oracle.

For each m the squared hat norm of the Wolf-family tensor over its holonomy
algebra is computed two independent ways (explicit rotation derivatives, and
the spectral structure-constant formula).  The two candidates on record,

    candidate A: 12 m (m-1) (3m+4)
    candidate B: 36 m^2 (m-1)

are then compared to the measurement.  The oracle matches neither; it
follows 36 m (m-1) (m+2) at machine precision, which also forces the
hat-to-trace-free ratio to be 4(m+2) instead of (4/3)(3m+4).  The random
sample sweep at the end shows that the ratio is constant over the whole
quaternionic curvature class, so the law is not special to the model point.
"""

import argparse

import numpy as np

from curvlab import criteria, decomp, holonomy, tensor


def adjudicate(max_m):
    print(f"{'m':>3} {'oracle':>12} {'route gap':>10} "
          f"{'cand A':>10} {'cand B':>10} {'36m(m-1)(m+2)':>14}")
    for m in range(2, max_m + 1):
        rm = decomp.wolf(m)
        alg = holonomy.sp_sp1_algebra(rm.space)
        direct = criteria.hat_norm_direct(rm, alg)
        rop = holonomy.project(tensor.to_operator(rm), alg)
        formula = criteria.hat_norm_formula(rop).total
        cand_a = 12 * m * (m - 1) * (3 * m + 4)
        cand_b = 36 * m * m * (m - 1)
        resolved = 36 * m * (m - 1) * (m + 2)

        def tag(c):
            return "ok" if abs(direct - c) <= 1e-7 * (1 + c) else "NO"

        print(
            f"{m:>3} {direct:>12.4f} {abs(direct - formula):>10.2e} "
            f"{cand_a:>7} {tag(cand_a):>2} {cand_b:>7} {tag(cand_b):>2} "
            f"{resolved:>11} {tag(resolved):>2}"
        )
    print()


def ratio_sweep(m, trials, seed):
    alg = holonomy.sp_sp1_algebra(decomp.wolf(m).space)
    ratios = []
    for trial in range(trials):
        rng = np.random.default_rng(seed ^ trial)
        rm = decomp.random_algebra_curvature(alg, rng=rng)
        hr = criteria.hat_ratio_qk(rm, alg)
        if not hr.pure_multiple:
            ratios.append(hr.ratio)
    print(
        f"hat ratio over {len(ratios)} random samples at m={m}: "
        f"mean {np.mean(ratios):.12f}, spread {np.ptp(ratios):.2e}; "
        f"4(m+2) = {4 * (m + 2)}, (4/3)(3m+4) = {(4 / 3) * (3 * m + 4):.6f}"
    )


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-m", type=int, default=5)
    ap.add_argument("--trials", type=int, default=25)
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()
    adjudicate(args.max_m)
    for m in (2, 3):
        ratio_sweep(m, args.trials, args.seed)


if __name__ == "__main__":
    main()
