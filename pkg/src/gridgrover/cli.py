"""Experiment runner: configure a problem from JSON, execute one of the
search / bisect / brachistochrone / analyze commands, and write
machine-readable results.

Outputs land in the ``--out`` directory: always a ``report.json``
(schema_version 1) embedding the effective config, the master seed, and
the structured result; tabular sweeps additionally get CSV files with a
header row, ``.`` decimal separator, and LF line endings.  Timestamps
are informational only; everything else reproduces byte-identically for
a fixed config and seed at any ``--jobs`` value (per-trial generators
are derived from the master seed and the trial index, never shared
across trials).

Exit codes: 0 success, 1 config or usage error, 2 search exhausted.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .analysis import (
    avg_success_probability,
    lemma_threshold,
    stats_from_problem,
    theorem_bounds,
)
from .bisection import initial_upper_bound, run_bisect
from .grover import MarkedSet
from .search import (
    GridProblem,
    ScheduleParams,
    derive_seed,
    run_grid_search,
    run_round,
    trial_rng,
)
from .trajectory import (
    BrachistochroneCost,
    CostTable,
    Grid,
    QuadratureConfig,
    RangeProblemFamily,
    SolutionSetQuery,
    build_brachistochrone_grid,
    cross_path_rate,
    cycloid_descent_time,
    interpolate,
    straight_line_descent_time,
)

__all__ = ["main", "ConfigError", "IndexSumCost", "SCHEMA_VERSION"]

SCHEMA_VERSION = 1
EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_EXHAUSTED = 2

MODES = ("search", "bisect", "brachistochrone", "analyze")


class ConfigError(Exception):
    """Config or usage problem; maps to exit code 1."""


@dataclass(frozen=True)
class IndexSumCost:
    """Toy separable cost offset + sum(indices); handy for exact oracles."""

    sizes: tuple[int, ...]
    offset: float = 0.0

    def __call__(self, path: Sequence[int]) -> float:
        return self.offset + float(sum(path))


class _Parser(argparse.ArgumentParser):
    # usage errors must exit 1, not argparse's default 2 (2 means
    # "search exhausted" here)
    def error(self, message: str):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="gridgrover",
        description="Amplified grid search, cost-bound bisection, and trajectory experiments.",
    )
    parser.add_argument("--config", required=True, help="path to a JSON config file")
    parser.add_argument("--mode", choices=MODES, help="override the config's mode")
    parser.add_argument("--seed", type=int, help="override the config's master seed")
    parser.add_argument("--out", default="results", help="output directory (default: results)")
    parser.add_argument("--jobs", type=int, default=1, help="worker processes for trial sweeps")
    parser.add_argument(
        "--strict-paper",
        action="store_true",
        default=None,
        help="leave a bucket uniform instead of capping its draw once the budget overshoots",
    )
    parser.add_argument("--max-rounds", type=int, help="override the schedule's round limit")
    parser.add_argument("--max-count", type=int, help="override the bisection round limit")
    return parser


def _load_config(path: str) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        config = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}") from exc
    if not isinstance(config, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return config


def _require(section: dict, key: str, where: str):
    if key not in section:
        raise ConfigError(f"{where}.{key} is required")
    return section[key]


def _int_list(value, where: str) -> list[int]:
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{where} must be a non-empty list of integers")
    try:
        return [int(v) for v in value]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where} must contain integers") from exc


# ---------------------------------------------------------------------------
# problem and cost construction


def _product_problem(section: dict, where: str) -> tuple[GridProblem, dict]:
    sizes = _int_list(_require(section, "bucket_sizes", where), f"{where}.bucket_sizes")
    marked = _require(section, "marked", where)
    if not isinstance(marked, list) or len(marked) != len(sizes):
        raise ConfigError(f"{where}.marked must list one index set per bucket")
    sets = [
        MarkedSet.from_indices(n, _int_list(idxs, f"{where}.marked[{i}]") if idxs else [])
        for i, (n, idxs) in enumerate(zip(sizes, marked))
    ]
    echo = {"bucket_sizes": sizes, "marked": [sorted(s.marked) for s in sets]}
    return GridProblem.product(sets), echo


def _quadrature_config(spec, where: str) -> QuadratureConfig:
    if spec is None:
        return QuadratureConfig()
    if not isinstance(spec, dict):
        raise ConfigError(f"{where} must be an object")
    allowed = {"base_panels", "nodes_per_panel", "max_panels", "rel_tol"}
    unknown = set(spec) - allowed
    if unknown:
        raise ConfigError(f"{where} has unknown keys: {sorted(unknown)}")
    return QuadratureConfig(**spec)


def _brachistochrone_cost(spec: dict, where: str):
    """Grid + cost model from inline grid fields; returns (grid, cost, echo)."""
    g = float(spec.get("g", 9.8))
    kind = spec.get("interpolation", "polynomial")
    if kind not in ("polynomial", "linear"):
        raise ConfigError(f"{where}.interpolation must be 'polynomial' or 'linear'")
    quadrature = _quadrature_config(spec.get("quadrature"), f"{where}.quadrature")
    if "columns" in spec:
        columns = spec["columns"]
        if not isinstance(columns, list) or not columns:
            raise ConfigError(f"{where}.columns must be a non-empty list of ordinate lists")
        k = len(columns)
        xs = np.array([math.pi * i / (k + 1) for i in range(1, k + 1)])
        cols = tuple(np.asarray(c, dtype=float) for c in columns)
        grid = Grid(abscissae=xs, columns=cols, start=(0.0, 2.0), end=(math.pi, 0.0))
        grid_echo = {"columns": [[float(v) for v in c] for c in cols]}
    else:
        k = int(_require(spec, "k", where))
        n = _require(spec, "n", where)
        n = _int_list(n, f"{where}.n") if isinstance(n, list) else int(n)
        grid = build_brachistochrone_grid(k, n)
        grid_echo = {"k": k, "n": list(grid.sizes)}
    cost = BrachistochroneCost(grid=grid, g=g, quadrature=quadrature, kind=kind)
    echo = {
        "type": "brachistochrone",
        **grid_echo,
        "g": g,
        "interpolation": kind,
        "quadrature": {
            "base_panels": quadrature.base_panels,
            "nodes_per_panel": quadrature.nodes_per_panel,
            "max_panels": quadrature.max_panels,
            "rel_tol": quadrature.rel_tol,
        },
    }
    return grid, cost, echo


def _build_cost(spec, where: str):
    """(sizes, cost, echo, grid-or-None) from a typed cost config block."""
    if not isinstance(spec, dict):
        raise ConfigError(f"{where} must be an object")
    kind = spec.get("type")
    if kind == "brachistochrone":
        grid, cost, echo = _brachistochrone_cost(spec, where)
        return grid.sizes, cost, echo, grid
    if kind == "index_sum":
        sizes = tuple(_int_list(_require(spec, "sizes", where), f"{where}.sizes"))
        offset = float(spec.get("offset", 0.0))
        echo = {"type": "index_sum", "sizes": list(sizes), "offset": offset}
        return sizes, IndexSumCost(sizes=sizes, offset=offset), echo, None
    raise ConfigError(f"{where}.type must be 'brachistochrone' or 'index_sum'")


def _schedule(section: dict, seed: int, problem: GridProblem) -> tuple[ScheduleParams, dict]:
    params = ScheduleParams(
        seed=seed,
        lam=section.get("lambda"),
        max_rounds=section.get("max_rounds"),
        strict_paper=bool(section.get("strict_paper", False)),
    )
    lam, max_rounds = params.resolve(problem)
    echo = {"lambda": lam, "max_rounds": max_rounds, "strict_paper": params.strict_paper}
    return params, echo


# ---------------------------------------------------------------------------
# trial sweeps (picklable workers; contiguous chunks keep output identical
# for every --jobs value because each trial owns a derived generator)


def _chunks(trials: int, jobs: int) -> list[tuple[int, int]]:
    jobs = max(1, min(jobs, trials))
    bounds = [i * trials // jobs for i in range(jobs + 1)]
    return [(lo, hi) for lo, hi in zip(bounds, bounds[1:]) if lo < hi]


def _run_chunked(fn: Callable, payloads: list, jobs: int) -> list:
    if jobs <= 1 or len(payloads) <= 1:
        return [fn(p) for p in payloads]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, payloads))


def _rebuild_product(bucket_sizes: Sequence[int], marked: Sequence[Sequence[int]]) -> GridProblem:
    return GridProblem.product(
        [MarkedSet.from_indices(n, idxs) for n, idxs in zip(bucket_sizes, marked)]
    )


def _lemma_chunk(payload) -> list[int]:
    bucket_sizes, marked, rows, seed, lo, hi = payload
    problem = _rebuild_product(bucket_sizes, marked)
    hits = []
    for row_index, m in rows:
        count = 0
        for t in range(lo, hi):
            if run_round(problem, float(m), trial_rng(seed, row_index, t)).accepted:
                count += 1
        hits.append(count)
    return hits


def _runtime_chunk(payload) -> list[tuple[int, bool, int, int]]:
    bucket_sizes, marked, lam, max_rounds, strict, seed, lo, hi = payload
    problem = _rebuild_product(bucket_sizes, marked)
    rows = []
    for t in range(lo, hi):
        params = ScheduleParams(seed=derive_seed(seed, t), lam=lam, max_rounds=max_rounds, strict_paper=strict)
        outcome = run_grid_search(problem, params)
        rows.append((t, outcome.success, outcome.rounds_used, outcome.ledger.total_grover_iterations))
    return rows


# ---------------------------------------------------------------------------
# commands: each returns (exit_code, effective_config, result, csv_tables)


def cmd_search(section: dict, seed: int, jobs: int):
    if "bucket_sizes" in section:
        problem, problem_echo = _product_problem(section, "search")
        effective = {"problem": problem_echo}
    elif "cost" in section:
        bounds = _require(section, "bounds", "search")
        if not (isinstance(bounds, list) and len(bounds) == 2):
            raise ConfigError("search.bounds must be [a, b]")
        a, b = float(bounds[0]), float(bounds[1])
        if not a < b:
            raise ConfigError("search.bounds needs a < b")
        sizes, cost, cost_echo, _grid = _build_cost(section["cost"], "search.cost")
        problem = RangeProblemFamily.from_cost(sizes, cost)(a, b)
        effective = {"problem": {"cost": cost_echo, "bounds": [a, b]}}
    else:
        raise ConfigError("search needs bucket_sizes+marked or cost+bounds")
    params, schedule_echo = _schedule(section, seed, problem)
    effective.update(schedule_echo)
    outcome = run_grid_search(problem, params)
    code = EXIT_OK if outcome.success else EXIT_EXHAUSTED
    return code, effective, outcome.to_dict(), {}


def _bootstrap_upper_bound(sizes, cost, seed: int, a0: float) -> float:
    """Deterministic b0: cost of seeded random paths, first finite one > a0."""
    rng = trial_rng(seed)
    for _ in range(64):
        candidate = initial_upper_bound(sizes, cost, rng)
        if math.isfinite(candidate) and candidate > a0:
            return candidate
    raise ConfigError("could not bootstrap a finite upper bound; set b0 explicitly")


def cmd_bisect(section: dict, seed: int, jobs: int):
    sizes, cost, cost_echo, _grid = _build_cost(_require(section, "cost", "bisect"), "bisect.cost")
    family = RangeProblemFamily.from_cost(sizes, cost)
    a0 = float(section.get("a0", 0.0))
    b0 = section.get("b0")
    b0 = _bootstrap_upper_bound(sizes, family.cost_of, seed, a0) if b0 is None else float(b0)
    max_count = int(section.get("max_count", 16))
    epsilon = float(section.get("epsilon", 0.0))
    backend = section.get("backend", "grover")
    # the bracket only fixes the problem's shape here; resolve() needs k
    params, schedule_echo = _schedule(section, seed, family(a0, b0))
    result = run_bisect(
        family, family.cost_of, a0, b0, max_count, params, backend=backend, epsilon=epsilon
    )
    effective = {
        "cost": cost_echo,
        "a0": a0,
        "b0": b0,
        "max_count": max_count,
        "epsilon": epsilon,
        "backend": backend,
        **schedule_echo,
    }
    return EXIT_OK, effective, result.to_dict(), {}


def cmd_brachistochrone(section: dict, seed: int, jobs: int):
    grid, cost, cost_echo = _brachistochrone_cost(section, "brachistochrone")
    table = CostTable.build(grid.sizes, cost)
    min_path, min_cost = table.minimum()
    samples = int(section.get("curve_samples", 101))
    if samples < 2:
        raise ConfigError("brachistochrone.curve_samples must be >= 2")
    curve = interpolate(grid, min_path, kind=cost.kind)
    xs = np.linspace(grid.start[0], grid.end[0], samples)
    ys = np.asarray(curve(xs), dtype=float)
    tables = {
        "minimum_curve.csv": (["x", "y"], [[float(x), float(y)] for x, y in zip(xs, ys)])
    }
    result = {
        "minimum": {"path": list(min_path), "cost": min_cost},
        "straight_line_cost": straight_line_descent_time(cost.g),
        "cycloid_floor": cycloid_descent_time(cost.g),
    }
    effective = {**cost_echo, "curve_samples": samples}

    if "enumerate" in section:
        bounds = section["enumerate"]
        if not (isinstance(bounds, list) and len(bounds) == 2):
            raise ConfigError("brachistochrone.enumerate must be [a, b]")
        a, b = float(bounds[0]), float(bounds[1])
        if not a < b:
            raise ConfigError("brachistochrone.enumerate needs a < b")
        effective["enumerate"] = [a, b]
        sol_paths = table.solution_paths(a, b)
        query = SolutionSetQuery(a, b, grid, cost, _table=table)
        header = [f"i{j}" for j in range(grid.k)] + ["cost"]
        tables["enumeration.csv"] = (header, [[*p, table.cost_of(p)] for p in sol_paths])
        result["enumerate"] = {
            "bounds": [a, b],
            "solution_count": len(sol_paths),
            "local_marked_sets": [sorted(ms.marked) for ms in table.marked_sets(a, b)],
            "cross_path_rate": cross_path_rate(query),
        }

    if "bisect" in section:
        sub = section["bisect"]
        if not isinstance(sub, dict):
            raise ConfigError("brachistochrone.bisect must be an object")
        family = RangeProblemFamily(table)
        a0 = float(sub.get("a0", 0.0))
        b0 = sub.get("b0")
        b0 = (
            _bootstrap_upper_bound(grid.sizes, family.cost_of, seed, a0)
            if b0 is None
            else float(b0)
        )
        max_count = int(sub.get("max_count", 16))
        epsilon = float(sub.get("epsilon", 0.0))
        backend = sub.get("backend", "grover")
        params, schedule_echo = _schedule(sub, seed, family(a0, b0))
        inner = run_bisect(
            family, family.cost_of, a0, b0, max_count, params, backend=backend, epsilon=epsilon
        )
        result["bisect"] = inner.to_dict()
        effective["bisect"] = {
            "a0": a0,
            "b0": b0,
            "max_count": max_count,
            "epsilon": epsilon,
            "backend": backend,
            **schedule_echo,
        }

    return EXIT_OK, effective, result, tables


def cmd_analyze(section: dict, seed: int, jobs: int):
    task = section.get("task")
    if task not in ("lemma", "runtime"):
        raise ConfigError("analyze.task must be 'lemma' or 'runtime'")
    problem, problem_echo = _product_problem(section, "analyze")
    stats = stats_from_problem(problem)
    if task == "lemma":
        return _analyze_lemma(section, seed, jobs, problem, problem_echo, stats)
    return _analyze_runtime(section, seed, jobs, problem, problem_echo, stats)


def _analyze_lemma(section, seed, jobs, problem, problem_echo, stats):
    alpha_star = lemma_threshold(stats)
    floor = 4.0 ** (-problem.k)
    if "m_values" in section:
        m_values = _int_list(section["m_values"], "analyze.m_values")
    else:
        m_values = list(range(math.ceil(alpha_star) + 1, math.floor(4.0 * alpha_star) + 1))
    if not m_values:
        raise ConfigError("analyze.m_values resolves to an empty sweep")
    trials = int(section.get("trials", 0))
    band_sigmas = float(section.get("band_sigmas", 3.0))

    rows = []
    for m in m_values:
        closed = avg_success_probability(m, stats)
        rows.append(
            {
                "m": m,
                "closed_form": closed,
                "floor": floor,
                "above_floor": bool(m <= alpha_star or closed >= floor),
            }
        )
    violations = sum(1 for r in rows if not r["above_floor"])

    if trials > 0:
        for s in stats:
            for m in m_values:
                if m > math.sqrt(s.n):
                    raise ConfigError(
                        f"analyze.m_values: m={m} exceeds sqrt(n)={math.sqrt(s.n):.3f}; "
                        "capped draws would not match the closed form"
                    )
        spec = (
            tuple(problem_echo["bucket_sizes"]),
            tuple(tuple(s) for s in problem_echo["marked"]),
        )
        row_ids = list(enumerate(m_values))
        payloads = [(*spec, row_ids, seed, lo, hi) for lo, hi in _chunks(trials, jobs)]
        per_chunk = _run_chunked(_lemma_chunk, payloads, jobs)
        totals = [sum(chunk[i] for chunk in per_chunk) for i in range(len(m_values))]
        for row, hits in zip(rows, totals):
            closed = row["closed_form"]
            sigma = math.sqrt(closed * (1.0 - closed) / trials)
            empirical = hits / trials
            row["empirical"] = empirical
            row["sigma"] = sigma
            row["within_band"] = bool(abs(empirical - closed) <= band_sigmas * sigma)

    header = ["m", "closed_form", "floor", "above_floor"]
    if trials > 0:
        header += ["empirical", "sigma", "within_band"]
    table = [[row[h] for h in header] for row in rows]
    effective = {
        "task": "lemma",
        "problem": problem_echo,
        "m_values": m_values,
        "trials": trials,
        "band_sigmas": band_sigmas,
    }
    result = {
        "alpha_star": alpha_star,
        "floor": floor,
        "violations": violations,
        "rows": rows,
    }
    return EXIT_OK, effective, result, {"lemma.csv": (header, table)}


def _analyze_runtime(section, seed, jobs, problem, problem_echo, stats):
    params, schedule_echo = _schedule(section, seed, problem)
    lam, max_rounds = params.resolve(problem)
    bounds = theorem_bounds(stats, lam)
    trials = int(section.get("trials", 200))
    if trials < 1:
        raise ConfigError("analyze.trials must be >= 1")

    spec = (
        tuple(problem_echo["bucket_sizes"]),
        tuple(tuple(s) for s in problem_echo["marked"]),
    )
    payloads = [
        (*spec, lam, max_rounds, params.strict_paper, seed, lo, hi)
        for lo, hi in _chunks(trials, jobs)
    ]
    trial_rows = [row for chunk in _run_chunked(_runtime_chunk, payloads, jobs) for row in chunk]

    totals = [r[3] for r in trial_rows]
    successes = sum(1 for r in trial_rows if r[1])
    mean_iters = sum(totals) / trials
    result = {
        "alpha_star": bounds.alpha_star,
        "critical_round": bounds.critical_round,
        "pre_critical": bounds.pre_critical,
        "post_critical": bounds.post_critical,
        "total_bound": bounds.total,
        "trials": trials,
        "success_rate": successes / trials,
        "mean_total_iterations": mean_iters,
        "within_bound": bool(mean_iters <= bounds.total),
    }
    effective = {"task": "runtime", "problem": problem_echo, "trials": trials, **schedule_echo}
    summary_header = [
        "k",
        "lambda",
        "alpha_star",
        "critical_round",
        "pre_critical",
        "post_critical",
        "total_bound",
        "trials",
        "success_rate",
        "mean_total_iterations",
        "within_bound",
    ]
    summary_row = [
        problem.k,
        lam,
        bounds.alpha_star,
        bounds.critical_round,
        bounds.pre_critical,
        bounds.post_critical,
        bounds.total,
        trials,
        result["success_rate"],
        mean_iters,
        result["within_bound"],
    ]
    trials_header = ["trial", "success", "rounds", "total_grover_iterations"]
    tables = {
        "runtime.csv": (summary_header, [summary_row]),
        "trials.csv": (trials_header, [list(r) for r in trial_rows]),
    }
    return EXIT_OK, effective, result, tables


# ---------------------------------------------------------------------------
# output plumbing


def _csv_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_csv_cell(v) for v in row])


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    raise TypeError(f"not JSON-serializable: {type(obj).__name__}")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.jobs < 1:
            raise ConfigError("--jobs must be >= 1")
        config = _load_config(args.config)
        mode = args.mode or config.get("mode")
        if mode not in MODES:
            raise ConfigError(f"mode must be one of {', '.join(MODES)} (via config or --mode)")
        seed = args.seed if args.seed is not None else int(config.get("seed", 0))
        section = dict(config.get(mode, {}))
        if args.strict_paper:
            section["strict_paper"] = True
        if args.max_rounds is not None:
            section["max_rounds"] = args.max_rounds
        if args.max_count is not None:
            section["max_count"] = args.max_count

        command = {
            "search": cmd_search,
            "bisect": cmd_bisect,
            "brachistochrone": cmd_brachistochrone,
            "analyze": cmd_analyze,
        }[mode]
        code, effective, result, tables = command(section, seed, args.jobs)

        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        for name, (header, rows) in tables.items():
            _write_csv(out_dir / name, header, rows)
        report = {
            "schema_version": SCHEMA_VERSION,
            "mode": mode,
            "seed": seed,
            "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "config": effective,
            "result": result,
        }
        (out_dir / "report.json").write_text(
            json.dumps(report, indent=2, sort_keys=True, default=_json_default) + "\n",
            encoding="utf-8",
        )
        return code
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
