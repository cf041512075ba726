"""Parallel amplitude-amplified search over product grids, cost-bound
bisection, and a brachistochrone discretization to exercise both.

The layers, bottom up: :mod:`gridgrover.grover` simulates one real-valued
search register; :mod:`gridgrover.search` runs one register per bucket
with an adaptive iteration budget; :mod:`gridgrover.analysis` carries the
closed-form success probabilities and runtime ceilings;
:mod:`gridgrover.bisection` brackets an unknown minimum cost with range
oracles; :mod:`gridgrover.trajectory` supplies the descent-time cost on
discretized curves plus exhaustive baselines; :mod:`gridgrover.cli` wires
everything into a reproducible experiment runner.
"""

from .analysis import (
    BucketStats,
    LemmaCheckRow,
    RuntimeBounds,
    avg_success_probability,
    empirical_vs_closed_form,
    lemma_threshold,
    stats_from_problem,
    theorem_bounds,
    trig_identity_residual,
)
from .bisection import (
    BisectResult,
    BisectRound,
    BoundInterval,
    PathWitness,
    initial_upper_bound,
    range_oracle,
    run_bisect,
)
from .grover import (
    MarkedSet,
    Register,
    RotationAngle,
    analytic_amplitudes,
    apply_oracle,
    grover_iterate,
    invert_about_mean,
    measure,
    success_probability,
    uniform_init,
)
from .search import (
    BucketSpec,
    GridProblem,
    QueryLedger,
    RoundResult,
    ScheduleParams,
    SearchOutcome,
    default_lambda,
    default_max_rounds,
    derive_seed,
    exhaustive_search,
    lambda_upper_bound,
    run_grid_search,
    run_round,
    trial_rng,
)
from .trajectory import (
    DESK_SCALE_CAP,
    BrachistochroneCost,
    CostTable,
    Grid,
    PiecewiseLinearCurve,
    PolynomialCurve,
    QuadratureConfig,
    RangeProblemFamily,
    SolutionSetQuery,
    brachistochrone_cost,
    brute_force_minimum,
    build_brachistochrone_grid,
    cross_path_rate,
    cycloid_descent_time,
    derive_local_marked_sets,
    enumerate_solution_paths,
    interpolate,
    straight_line_descent_time,
)

__version__ = "0.1.0"
