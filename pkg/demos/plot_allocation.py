"""
Splitting a divisible workload across three nodes
=================================================

"""

# Three identical nodes share ten units of work. Each one needs one second to
# receive its input and one second to send its result back, over a channel
# that carries a single transfer at a time.
import numpy as np

from decsched import CommPlan, allocate, default_instance, delay_of_fixed_allocation, gap_profile, min_delay

inst = default_instance()
plan = CommPlan.identity(range(inst.n))

# While later nodes are still receiving, the early ones can already compute.
# Those idle windows are the gaps; together they absorb cap0 units for free.
g = gap_profile(inst, plan)
print("pre gaps ", g.pre_gap, " post gaps", g.post_gap, " cap0 =", g.cap0)

# Work beyond cap0 stretches the window between the two communication phases.
# Every node gains the same extra time, so the delay rises by (w - cap0) / R.
print("optimal delay", min_delay(inst, plan))

# The allocation fills the pre gaps, then the post gaps, then splits the rest
# in proportion to the rates.
alloc = allocate(inst, plan)
for i, w1, w2, w3 in zip(alloc.ids, alloc.phase1, alloc.phase2, alloc.phase3):
    print(f"node {i}: {w1:.3f} + {w2:.3f} + {w3:.3f}")

# Any other split does at best as well. Putting everything on one node is
# much worse, and random splits never win either.
print("all on node 0:", delay_of_fixed_allocation(inst, plan, [10, 0, 0]))
rng = np.random.default_rng(0)
samples = rng.dirichlet(np.ones(3), 1000) * inst.workload
print("best of 1000 random splits:",
      min(delay_of_fixed_allocation(inst, plan, a) for a in samples))

# Below cap0 the delay is just the communication time S + B.
for w in (0, 3, 6, 9, 12):
    print(f"w={w:>2}  delay={min_delay(inst.with_workload(w), plan):.4f}")
