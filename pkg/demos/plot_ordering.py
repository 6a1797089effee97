"""
Choosing the communication order
================================

"""

# The order of the transfers decides how much work fits into the gaps. Take
# one fast node and two slow ones.
from decsched import Direction, counterexample, objective_v, order_descending_delay, order_exhaustive
from decsched.ordering import order_greedy_prefix

inst = counterexample("LDF", 3, 100)
ids = range(inst.n)
print("rates", inst.rates, " backward delays", inst.bwd)

# Sending the longest result first is optimal when all rates match. Here it
# keeps the fast node waiting at the front of the queue.
ldf = order_descending_delay(inst, ids, Direction.BACKWARD)
print("longest first", ldf, objective_v(inst, ids, ldf, Direction.BACKWARD).v)

# The best order sends the fast node's result last, so it computes the longest.
best, v_star = order_exhaustive(inst, ids, Direction.BACKWARD)
print("best order   ", best, v_star)

# Enumerating only the first k positions already guarantees k/N of the optimum.
for k in range(1, inst.n + 1):
    g = order_greedy_prefix(inst, ids, Direction.BACKWARD, k)
    print(f"k={k}: order {g.order} value {g.v:g} prefix {g.prefix_v:g} >= {k / inst.n * v_star:.1f}")

# As the fast node gets faster, the simple rule falls arbitrarily far behind.
for scale in (1e1, 1e2, 1e4, 1e6):
    c = counterexample("LDF", 3, scale)
    v = objective_v(c, ids, order_descending_delay(c, ids, Direction.BACKWARD), Direction.BACKWARD).v
    print(f"scale {scale:g}: ratio {v / order_exhaustive(c, ids, Direction.BACKWARD)[1]:.3g}")
