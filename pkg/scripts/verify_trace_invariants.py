#!/usr/bin/env python3
"""Replay the proved descent/rate relations on recorded solver traces.

Runs the backtracking and fixed-step variants on the convex built-in
problems from random starts, then checks on every trace:

  * the one-step gap inequalities,
  * monotone decay of the momentum energy (accelerated variants),
  * the O(1/k^2) worst-component rate bound (instances with known L),
  * the accepted-L cap.

Exits nonzero if any check fails.
"""

import argparse
import sys

import numpy as np

from mofista import (Backtracking, FixedStep, ReferenceSet, SolverConfig,
                     accepted_L_bound_check, builtin_problem,
                     gap_step_bounds_check, level_set_reference,
                     lyapunov_monotone_check, pareto_segment, rate_bound_check,
                     run_solver, sample_initial_points)

CONVEX = ["BK1", "BK1_l1", "JOS1", "JOS1_l1", "SP1", "SP1_l1",
          "VFM1", "MHHM1", "MHHM2"]


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--eps", type=float, default=1e-6)
    ap.add_argument("--max-iter", type=int, default=500)
    args = ap.parse_args(argv)

    failures = 0
    for name in CONVEX:
        p, desc = builtin_problem(name)
        starts = sample_initial_points(desc, args.seeds, seed=(7, len(name)))
        variants = [("backtracking", Backtracking()),
                    ("fixed", FixedStep(desc.L_true))]
        for label, variant in variants:
            cfg = SolverConfig(eps=args.eps, max_iter=args.max_iter, variant=variant)
            for x0 in starts:
                res = run_solver(p, x0, cfg)
                refs = level_set_reference(p, desc, x0)
                # thin the grid so the replay stays quick
                zs = refs.points[:: max(1, len(refs.points) // 40)]
                ok = all(gap_step_bounds_check(res.trace, p, z) for z in zs)
                ok &= all(lyapunov_monotone_check(res.trace, p, z) for z in zs)
                ok &= accepted_L_bound_check(res.trace, desc.L_true, cfg)
                if label == "backtracking" and name in ("BK1", "JOS1"):
                    Z = ReferenceSet.from_points(pareto_segment(name, 20), x0)
                    ok &= rate_bound_check(res.trace, p, cfg, Z)
                flag = "ok" if ok else "FAIL"
                failures += not ok
                print(f"{name:8s} {label:12s} iters={len(res.trace.records):4d} "
                      f"status={res.status.value:10s} checks={flag}")
    if failures:
        print(f"{failures} trace check(s) failed", file=sys.stderr)
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
