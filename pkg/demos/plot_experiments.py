"""
Sweeping the workload
=====================

"""

# The harness averages each policy's delay over 20 random instances per
# workload value. Here optimal allocation is set against an equal split.
from decsched.experiment import ExperimentSpec, mean_curve, mean_gap, run_experiment

for profile in ("UMUC", "DMUC", "UMDC", "DMDC"):
    rows = run_experiment(ExperimentSpec("ALLOC_VS_W", profile, range(0, 21, 4)))
    oca, eca = mean_curve(rows, "OCA"), mean_curve(rows, "ECA")
    curve = "  ".join(f"{w:g}:{oca[w]:.2f}/{eca[w]:.2f}" for w in oca)
    print(f"{profile}  gap {mean_gap(rows, 'ECA', 'OCA'):.3f}   {curve}")

# With too many nodes the transfers dominate, so the delay-vs-N curve dips and
# then climbs again.
rows = run_experiment(ExperimentSpec("DELAY_VS_N", "UMUC", range(1, 9), policies=("OCA-OCO",)))
for n, d in mean_curve(rows, "OCA-OCO").items():
    print(f"N={n:g}  {'*' * int(d * 4)} {d:.2f}")
