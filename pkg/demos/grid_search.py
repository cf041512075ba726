"""Run the parallel bucket search end to end and show the query ledger."""

from gridgrover import GridProblem, MarkedSet, ScheduleParams, run_grid_search

problem = GridProblem.product(
    [
        MarkedSet.from_indices(64, [7]),
        MarkedSet.from_indices(32, [0, 19]),
        MarkedSet.from_indices(16, [11]),
    ]
)

params = ScheduleParams(seed=2024)
lam, max_rounds = params.resolve(problem)
print(f"buckets {problem.sizes}, lambda={lam:.6f}, round budget {max_rounds}")

outcome = run_grid_search(problem, params)
print(f"success: {outcome.success}")
print(f"found path: {outcome.path}")
print(f"rounds used: {outcome.rounds_used}")
print(f"global oracle calls: {outcome.ledger.global_oracle_calls}")
for i, iters in enumerate(outcome.ledger.grover_iterations_per_bucket):
    print(f"  bucket {i}: {iters} Grover iterations")
print(f"total Grover iterations: {outcome.ledger.total_grover_iterations}")

# the same seed replays the same transcript
again = run_grid_search(problem, params)
assert again.to_dict() == outcome.to_dict()
print("replay with the same seed is identical")
