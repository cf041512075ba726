"""Watch a single register rotate toward its marked states.

Runs the statevector simulator step by step and prints the success
probability next to the closed-form prediction sin^2((2j+1) theta).
"""

import math

from gridgrover import (
    MarkedSet,
    analytic_amplitudes,
    grover_iterate,
    success_probability,
    uniform_init,
)

n = 64
marked = MarkedSet.from_indices(n, [13])

state = uniform_init(n)
best_j = round((math.pi / (4 * math.asin(math.sqrt(1 / n)))) - 0.5)
print(f"n={n}, one marked index, optimal stop around j={best_j}")
print(f"{'j':>3} {'simulated':>12} {'closed form':>12}")
for j in range(2 * best_j + 2):
    sim = success_probability(state, marked)
    a_marked, _ = analytic_amplitudes(n, 1, j)
    print(f"{j:>3} {sim:>12.6f} {a_marked**2:>12.6f}")
    state = grover_iterate(state, marked, 1)

print("\npast the optimum the probability rotates back down; overshooting")
print("is as bad as stopping early, which is why the schedule caps j")
