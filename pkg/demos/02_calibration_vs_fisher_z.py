#!/usr/bin/env python3
"""Why impute-then-test breaks under MNAR, in one small table.

Fisher-Z on singly- or multiply-imputed data rejects true nulls far above
the nominal level when missingness depends on the missing values; the
paired test stays near nominal because both of its models receive the
same completed conditioning set.

Run:  python3 demos/02_calibration_vs_fisher_z.py    (~10 minutes)
"""

from paircd.benchmark import Mechanism, StandaloneCell, StandaloneFamily, run_flags

REPS = 40
print(f"linear-Gaussian null, n = 1500, 30% MNAR in 3 of 5 conditioning "
      f"columns, {REPS} replicates\n")
print(f"{'method':10s} {'FPR':>6s}   (nominal 0.05)")
for method in ("fz_single", "fz_rubin", "pairci"):
    cell = StandaloneCell(StandaloneFamily.LINEAR_GAUSSIAN, Mechanism.MNAR,
                          signal=0.0, n=1500, d=5, seed=42, method=method)
    fpr = run_flags(cell, REPS).mean()
    print(f"{method:10s} {fpr:6.3f}")
