#!/usr/bin/env python3
"""Solve an exported LP file with HiGHS and write `name value` lines.

Usage: solve_lp_highs.py MODEL.lp SOLUTION.txt [--time-limit SECONDS]

Exit status: 0 solution written, 2 proven infeasible, 3 no solution (limit).
"""
import argparse
import sys

import highspy


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("model")
    parser.add_argument("solution")
    parser.add_argument("--time-limit", type=float, default=1800.0)
    args = parser.parse_args()

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("threads", 1)
    h.setOptionValue("random_seed", 0)
    h.setOptionValue("time_limit", args.time_limit)
    h.setOptionValue("primal_feasibility_tolerance", 1e-10)
    h.setOptionValue("mip_feasibility_tolerance", 1e-10)
    if h.readModel(args.model) != highspy.HighsStatus.kOk:
        print(f"cannot read {args.model}", file=sys.stderr)
        return 1
    h.run()
    status = h.getModelStatus()
    print(h.modelStatusToString(status))
    if status == highspy.HighsModelStatus.kInfeasible:
        return 2
    sol = h.getSolution()
    if not sol.value_valid:
        return 3
    lp = h.getLp()
    with open(args.solution, "w") as out:
        out.write(f"# HiGHS {h.modelStatusToString(status)}, objective {h.getInfo().objective_function_value!r}\n")
        for name, value in zip(lp.col_names_, sol.col_value):
            out.write(f"{name} {value!r}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
