#!/usr/bin/env python3
"""Embed a space into the renormed block model and report both norms.

Builds the exponent-1 pasting, wraps its block layout in the renormed
model (pairs of consecutive blocks aggregate additively), and measures
distortion under the renormed and the plain sup aggregation.
"""

import argparse

from spiralpaste import (
    embed_no_cotype,
    equivalence_ratio,
    grid_space,
    line_space,
    pair_isometry_check,
    tree_space,
)

SPACES = {"line": line_space, "grid": grid_space, "tree": tree_space}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--space", default="line", choices=sorted(SPACES))
    ap.add_argument("--eps", type=float, default=0.2)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    sp = SPACES[args.space]()
    res = embed_no_cotype(sp, args.eps)
    model = res.model
    print(f"space: {args.space} ({len(sp)} points), eps = {args.eps:g}")
    print(f"model blocks: {model.block_dims}")

    eq = equivalence_ratio(model, args.eps, seed=args.seed)
    print(f"norm equivalence: max ratio {eq.max_ratio:.9f} "
          f"(allowed up to {eq.bound:.6f}, {eq.samples} candidates)")
    if model.num_blocks >= 2:
        dev = pair_isometry_check(model, 1, 2, seed=args.seed)
        print(f"two-block additivity deviation: {dev:.3e}")

    ra, ramb = res.report_a, res.report_ambient
    print(f"renormed distortion: {ra.distortion:.6f} (bound {ra.analytic_bound:.6f})")
    print(f"ambient  distortion: {ramb.distortion:.6f} (bound {ramb.analytic_bound:.6f})")
    print("pass" if res.passed else "FAIL")


if __name__ == "__main__":
    main()
