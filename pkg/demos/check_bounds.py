"""Compare the closed-form success floor and runtime bound against simulation."""

import math

from gridgrover import (
    BucketStats,
    GridProblem,
    MarkedSet,
    ScheduleParams,
    avg_success_probability,
    empirical_vs_closed_form,
    lemma_threshold,
    run_grid_search,
    theorem_bounds,
    trial_rng,
)

problem = GridProblem.product(
    [MarkedSet.from_indices(16, [3, 12]), MarkedSet.from_indices(16, [0, 9])]
)
stats = [BucketStats.from_counts(16, 2)] * 2

alpha = lemma_threshold(stats)
print(f"threshold alpha* = {alpha:.4f}; floor for k=2 is 1/16 = 0.0625")
print(f"{'m':>3} {'closed form':>12} {'empirical':>10} {'in band':>8}")
# the uncapped comparison needs m <= sqrt(n), so stop at 4
m_values = list(range(math.ceil(alpha) + 1, 5))
rows = empirical_vs_closed_form(problem, m_values, trials=20000, seed=99)
for row in rows:
    print(
        f"{row.m:>3} {row.closed_form:>12.6f} {row.empirical:>10.6f}"
        f" {str(row.within_band):>8}"
    )

params = ScheduleParams(seed=0)
lam, _ = params.resolve(problem)
bounds = theorem_bounds(stats, lam)
print(f"\nruntime bound: pre {bounds.pre_critical:.2f} + post {bounds.post_critical:.2f}"
      f" = {bounds.total:.2f} expected Grover iterations")

trials = 400
total = 0
for t in range(trials):
    seed = int(trial_rng(123, t).integers(0, 2**63))
    total += run_grid_search(problem, ScheduleParams(seed=seed)).ledger.total_grover_iterations
print(f"simulated mean over {trials} runs: {total / trials:.2f}")
