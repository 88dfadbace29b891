#!/usr/bin/env python3
"""Solve an LP/MPS file with HiGHS and write a plain `name value` solution file."""

import argparse
import math
import os
import sys

import highspy


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("model")
    parser.add_argument("solution")
    parser.add_argument("--time-limit", type=float, default=300.0)
    parser.add_argument("--gap", type=float, default=1e-6)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    h = highspy.Highs()
    h.setOptionValue("output_flag", True)
    h.setOptionValue("time_limit", args.time_limit)
    h.setOptionValue("mip_rel_gap", args.gap)
    h.setOptionValue("threads", args.threads)
    h.setOptionValue("random_seed", args.seed)
    if h.readModel(args.model) == highspy.HighsStatus.kError:
        print("cannot read model", args.model, file=sys.stderr)
        return 2
    h.run()

    status = h.getModelStatus()
    info = h.getInfo()
    has_values = info.primal_solution_status == 2  # kSolutionStatusFeasible
    if status == highspy.HighsModelStatus.kOptimal:
        label = "optimal"
    elif status in (highspy.HighsModelStatus.kInfeasible,
                    highspy.HighsModelStatus.kUnboundedOrInfeasible,
                    highspy.HighsModelStatus.kUnbounded):
        label = "infeasible"
        has_values = False
    else:
        label = "feasible" if has_values else "timeout"

    lines = [f"# status {label}"]
    if has_values:
        gap = info.mip_gap if math.isfinite(info.mip_gap) else 0.0
        lines.append(f"# objective {info.objective_function_value!r}")
        lines.append(f"# gap {gap!r}")
        names = h.getLp().col_names_
        values = h.getSolution().col_value
        for name, value in zip(names, values):
            lines.append(f"{name} {float(value)!r}")
    tmp = args.solution + ".part"
    with open(tmp, "w", encoding="utf-8") as out:
        out.write("\n".join(lines) + "\n")
    os.replace(tmp, args.solution)
    return 0


if __name__ == "__main__":
    sys.exit(main())
