#!/usr/bin/env python3
"""Sweep the reporting-fault probability and tabulate error rates.

Uses the experiment harness directly rather than the CLI. Each sweep
cell re-optimizes the likelihood thresholds with the fault model baked
into the objective, runs 50 seeded repetitions, and averages four
error rates: local and fused, before and after fault injection. The
fused column degrades far more slowly than the local one, which is
the point of voting.
"""

from dualdetect import ExperimentConfig, run_sweep


def main():
    base = ExperimentConfig(seed=1, repetitions=50)
    summary = run_sweep(base, "p_f", ["0.0", "0.12", "0.24", "0.36"])

    header = "%-6s %8s %8s %8s %8s   %8s %8s" % (
        "p_f", "ld_bf", "fd_bf", "ld_af", "fd_af", "lambda1", "lambda2")
    print(header)
    print("-" * len(header))
    for row in summary.rows:
        print("%-6s %8.2f %8.2f %8.2f %8.2f   %8.4f %8.4f" % (
            row.label, row.ld_bf, row.fd_bf, row.ld_af, row.fd_af,
            row.lambda1, row.lambda2))
    print()
    print("columns: ld/fd = local/fused decision error in percent,")
    print("bf/af = before/after fault injection; thresholds re-optimized")
    print("per cell against the fault-adjusted objective")


if __name__ == "__main__":
    main()
