"""
Drawing and checking schedules
==============================

"""

# The canonical schedule packs the inputs at the start and the results at the
# end, with all computing in between.
from decsched import CommPlan, allocate, default_instance, min_delay
from decsched.timeline import Feature, build_canonical, render_gantt, sample_adversarial, validate

inst = default_instance()
plan = CommPlan.identity(range(inst.n))
alloc = allocate(inst, plan)
canon = build_canonical(inst, plan, alloc)
print(render_gantt(canon))
print("violations:", validate(canon, inst, alloc))

# Split transfers, idle pauses and mixed directions are all allowed, but none
# of them helps. The sampler builds such schedules and they always end later.
for seed in range(3):
    tl = sample_adversarial(inst, plan, alloc, seed, list(Feature))
    print()
    print(render_gantt(tl))
    print(f"valid: {not validate(tl, inst, alloc)}  horizon {tl.horizon:.3f} >= {min_delay(inst, plan):.3f}")
