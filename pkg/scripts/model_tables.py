#!/usr/bin/env python3
"""Print the closed-form constants of the model operators next to the
values computed from their component arrays.

Everything here is also enforced in the test suite; the script exists to
eyeball the tables and to regenerate them for notes.
"""

import argparse

import numpy as np

from curvlab import decomp, holonomy, tensor


def fmt_mults(op, gap=1e-6):
    return ", ".join(
        f"{v:.6g} (x{c})" for v, c in op.spectrum().multiplicities(gap)
    )


def hp_table(max_m):
    print("== quaternionic projective family ==")
    print(f"{'m':>3} {'dim':>5} {'scal':>8} {'|R|^2_op':>10}  restricted spectrum")
    for m in range(2, max_m + 1):
        rm = decomp.hp(m)
        alg = holonomy.sp_sp1_algebra(rm.space)
        rop = holonomy.project(tensor.to_operator(rm), alg)
        print(
            f"{m:>3} {4 * m:>5} {tensor.scalar(rm):>8.1f} "
            f"{tensor.to_operator(rm).norm_sq():>10.1f}  {fmt_mults(rop)}"
        )
    print("   closed forms: scal = 16m(m+2), |R|^2 = 16m(5m+1), "
          "spectrum {4 x m(2m+1), 4m x 3}")
    print()


def grassmann_table(pairs):
    print("== real Grassmannian family ==")
    print(f"{'p':>3} {'q':>3} {'scal':>8}  full spectrum")
    for p, q in pairs:
        rm = decomp.grassmannian(p, q)
        op = tensor.to_operator(rm)
        print(f"{p:>3} {q:>3} {tensor.scalar(rm):>8.1f}  {fmt_mults(op)}")
    print("   closed forms: scal = pq(p+q-2), nonzero spectrum "
          "{p x q(q-1)/2, q x p(p-1)/2}")
    print()


def wolf_table(max_m):
    print("== quaternionic symmetric-space family ==")
    print(f"{'m':>3} {'scal':>8} {'|R|^2_op':>10} {'|R0|^2':>8}  restricted spectrum")
    for m in range(2, max_m + 1):
        rm = decomp.wolf(m)
        alg = holonomy.sp_sp1_algebra(rm.space)
        rop = holonomy.project(tensor.to_operator(rm), alg)
        r0 = decomp.qk_decompose(rm, alg).parts["hyperkaehler_part"].norm_sq() / 4.0
        print(
            f"{m:>3} {tensor.scalar(rm):>8.1f} "
            f"{tensor.to_operator(rm).norm_sq():>10.1f} {r0:>8.1f}  {fmt_mults(rop)}"
        )
    print("   closed forms: scal = 4m(m+2), |R|^2 = 2m(7m-4), |R0|^2 = 9m(m-1), "
          "spectrum {m x 6, 4 x m(m-1)/2, 0 x rest}")
    print()


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-m", type=int, default=4)
    args = ap.parse_args()
    np.set_printoptions(precision=6, suppress=True)
    hp_table(args.max_m)
    grassmann_table([(2, 2), (2, 3), (3, 3), (2, 4), (3, 4), (4, 4)])
    wolf_table(args.max_m)


if __name__ == "__main__":
    main()
