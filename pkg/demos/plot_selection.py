"""
How many nodes to use
=====================

"""

# Every extra node adds two transfers to the shared channel. With a small
# workload, that cost soon outweighs the extra computing power.
from decsched import Instance, select_exhaustive, select_greedy, select_linear
from decsched.model import generate_instance

unit = Instance.from_arrays(4.0, [1.0] * 5, [1.0] * 5, [1.0] * 5)
res = select_linear(unit)
for k, delay in res.trace:
    print(f"{k} nodes -> delay {delay:g}")
print("best:", res.selected)

# On mixed nodes, greedy growth and the full subset search can disagree. The
# exhaustive search is the reference.
inst = generate_instance(8, 3, "DMDC", workload=20.0)
for method in (select_linear, select_greedy, select_exhaustive):
    r = method(inst)
    print(f"{r.method.value:<15} nodes {r.selected}  delay {r.delay:.4f}")
