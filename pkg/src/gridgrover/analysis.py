"""Closed-form success probabilities and runtime bounds for the parallel
search, plus empirical-vs-analytic comparison utilities.

The central quantity is the single-round success probability at integer
budget m, averaged over the uniform draw j in {0, ..., m-1}:

    P_m = prod_i [ 1/2 - sin(4 m theta_i) / (4 m sin(2 theta_i)) ]

which stays at or above 1/4^k for every integer m above the threshold
alpha* = max_i 1/sin(2 theta_i).  That threshold also sets the runtime
ceiling: the expected total Grover-iteration count of the adaptive
schedule is bounded by the pre-critical plus post-critical terms
computed in :func:`theorem_bounds`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .grover import RotationAngle
from .search import GridProblem, run_round, trial_rng

__all__ = [
    "BucketStats",
    "RuntimeBounds",
    "LemmaCheckRow",
    "stats_from_problem",
    "avg_success_probability",
    "trig_identity_residual",
    "lemma_threshold",
    "theorem_bounds",
    "empirical_vs_closed_form",
]


@dataclass(frozen=True)
class BucketStats:
    """Per-bucket quantities driving the closed forms.

    alpha = 1/sin(2 theta) = n / (2 sqrt((n - m) m)); for buckets with
    marked fraction at most 3/4 it is bounded by sqrt(n/m).
    """

    n: int
    marked_count: int
    theta: float
    alpha: float

    @classmethod
    def from_counts(cls, n: int, marked_count: int) -> "BucketStats":
        if not 0 < marked_count < n:
            raise ValueError("bucket stats need 0 < marked_count < n (degenerate bucket)")
        theta = RotationAngle.from_counts(n, marked_count).theta
        alpha = n / (2.0 * math.sqrt((n - marked_count) * marked_count))
        return cls(n=n, marked_count=marked_count, theta=theta, alpha=alpha)


def stats_from_problem(problem: GridProblem) -> list[BucketStats]:
    """Project every bucket's local oracle and derive its stats."""
    return [
        BucketStats.from_counts(ms.size, ms.count) for ms in problem.marked_sets()
    ]


def avg_success_probability(m: int, stats: Sequence[BucketStats]) -> float:
    """Closed-form P_m for integer draw-range size m (draws {0,...,m-1})."""
    if m < 1 or int(m) != m:
        raise ValueError("closed form is defined for integer m >= 1")
    if not stats:
        raise ValueError("need at least one bucket")
    m = int(m)
    prob = 1.0
    for s in stats:
        two_theta = 2.0 * s.theta
        prob *= 0.5 - math.sin(4.0 * m * s.theta) / (4.0 * m * math.sin(two_theta))
    return prob


def trig_identity_residual(m: int, theta: float) -> float:
    """|sum_{j=0}^{m-1} (1 - cos((2j+1) theta)) - (m - sin(2 m theta)/(2 sin theta))|.

    The identity underlies the closed form; the residual should sit at
    float-rounding level for any m >= 1 and theta not a multiple of pi.
    """
    if m < 1 or int(m) != m:
        raise ValueError("identity needs integer m >= 1")
    if abs(math.sin(theta)) < 1e-15:
        raise ValueError("theta must not be a multiple of pi")
    m = int(m)
    j = np.arange(m)
    lhs = float(np.sum(1.0 - np.cos((2 * j + 1) * theta)))
    rhs = m - math.sin(2 * m * theta) / (2.0 * math.sin(theta))
    return abs(lhs - rhs)


def lemma_threshold(stats: Sequence[BucketStats]) -> float:
    """alpha* = max_i alpha_i; integer budgets above it keep P_m >= 1/4^k."""
    if not stats:
        raise ValueError("need at least one bucket")
    return max(s.alpha for s in stats)


@dataclass(frozen=True)
class RuntimeBounds:
    """Expected-iteration ceiling split at the critical round."""

    alpha_star: float
    critical_round: int
    pre_critical: float
    post_critical: float

    @property
    def total(self) -> float:
        return self.pre_critical + self.post_critical


def theorem_bounds(stats: Sequence[BucketStats], lam: float) -> RuntimeBounds:
    """Expected total Grover iterations: (k/2)(lam/(lam-1)) alpha* before
    the critical round ceil(log_lam alpha*), plus the geometric tail
    k lam / (2^(2k+1) (1 - (1 - 2^(-2k)) lam)) alpha* after it.

    Requires every bucket's marked fraction at most 3/4; denser buckets
    are classical-sampling territory and are rejected.
    """
    if not stats:
        raise ValueError("need at least one bucket")
    k = len(stats)
    four_k = 4.0**k
    if not 1.0 < lam < four_k / (four_k - 1.0):
        raise ValueError(f"growth factor {lam} outside (1, {four_k / (four_k - 1.0)}) for k={k}")
    for s in stats:
        if s.marked_count > 0.75 * s.n:
            raise ValueError(
                "marked fraction above 3/4: classical sampling already succeeds, "
                "the runtime bound does not apply"
            )
    alpha_star = lemma_threshold(stats)
    critical = max(0, math.ceil(math.log(alpha_star) / math.log(lam))) if alpha_star > 1 else 0
    pre = (k / 2.0) * (lam / (lam - 1.0)) * alpha_star
    post = k * lam / (2.0 ** (2 * k + 1) * (1.0 - (1.0 - 2.0 ** (-2 * k)) * lam)) * alpha_star
    return RuntimeBounds(
        alpha_star=alpha_star, critical_round=critical, pre_critical=pre, post_critical=post
    )


@dataclass(frozen=True)
class LemmaCheckRow:
    """One empirical-vs-closed-form comparison point."""

    m: int
    closed_form: float
    empirical: float
    sigma: float
    within_band: bool

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "closed_form": self.closed_form,
            "empirical": self.empirical,
            "sigma": self.sigma,
            "within_band": self.within_band,
        }


def empirical_vs_closed_form(
    problem: GridProblem,
    m_values: Iterable[int],
    trials: int,
    seed: int,
    band_sigmas: float = 3.0,
) -> list[LemmaCheckRow]:
    """Monte Carlo single-round success frequency against P_m.

    Runs ``trials`` independent rounds at each integer m and compares the
    acceptance frequency with the closed form, flagging rows outside the
    binomial ``band_sigmas`` band.  Every m must stay within the uncapped
    draw regime (m <= sqrt(n_i) for all buckets) so the simulated draw
    set {0,...,m-1} is exactly the one the closed form averages over.

    Each trial gets its own generator derived from (seed, row, trial),
    so frequencies do not depend on how trials are batched across
    workers.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    stats = stats_from_problem(problem)
    rows: list[LemmaCheckRow] = []
    for row_index, m in enumerate(m_values):
        if m < 1 or int(m) != m:
            raise ValueError("m values must be integers >= 1")
        m = int(m)
        for s in stats:
            if m > math.sqrt(s.n):
                raise ValueError(
                    f"m={m} exceeds sqrt(n)={math.sqrt(s.n):.3f}: capped draws would "
                    "no longer match the closed form"
                )
        closed = avg_success_probability(m, stats)
        hits = 0
        for t in range(trials):
            if run_round(problem, float(m), trial_rng(seed, row_index, t)).accepted:
                hits += 1
        empirical = hits / trials
        sigma = math.sqrt(closed * (1.0 - closed) / trials)
        rows.append(
            LemmaCheckRow(
                m=m,
                closed_form=closed,
                empirical=empirical,
                sigma=sigma,
                within_band=abs(empirical - closed) <= band_sigmas * sigma,
            )
        )
    return rows
