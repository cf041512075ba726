"""Real-amplitude simulator for Grover-style amplitude amplification.

A search register holds a real amplitude vector of arbitrary length (no
power-of-two restriction).  The phase-flip oracle and the inversion about
the mean are both real-linear maps, so a register prepared uniform never
leaves the real span and complex amplitudes are unnecessary.

Closed-form amplitudes after ``j`` iterations are available through
:func:`analytic_amplitudes` for the non-degenerate case ``0 < M < n``;
the statevector path handles the degenerate marked counts exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

__all__ = [
    "NORM_TOL",
    "EXACT_TOL",
    "Register",
    "MarkedSet",
    "RotationAngle",
    "uniform_init",
    "apply_oracle",
    "invert_about_mean",
    "grover_iterate",
    "analytic_amplitudes",
    "success_probability",
    "measure",
]

# Componentwise tolerance for statevector-vs-analytic agreement, and the
# norm drift allowed on a register.
NORM_TOL = 1e-10
# Tolerance for identities that are exact up to float rounding.
EXACT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Register:
    """Real amplitude vector over ``n`` basis states, normalized to 1."""

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=float)
        if amps.ndim != 1 or amps.size == 0:
            raise ValueError("register needs a non-empty 1-d amplitude vector")
        if not np.all(np.isfinite(amps)):
            raise ValueError("register amplitudes must be finite")
        norm = float(np.sum(amps * amps))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"register norm {norm!r} deviates from 1 by more than {NORM_TOL}")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n(self) -> int:
        return self.amplitudes.size


@dataclass(frozen=True)
class MarkedSet:
    """Subset of basis-state indices flagged by a bucket's local oracle."""

    size: int
    marked: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        if self.size < 1:
            raise ValueError("marked set needs size >= 1")
        marked = frozenset(int(i) for i in self.marked)
        for i in marked:
            if not 0 <= i < self.size:
                raise ValueError(f"marked index {i} outside [0, {self.size})")
        object.__setattr__(self, "marked", marked)

    @classmethod
    def from_indices(cls, size: int, indices: Iterable[int]) -> "MarkedSet":
        return cls(size=size, marked=frozenset(int(i) for i in indices))

    @property
    def count(self) -> int:
        return len(self.marked)

    def indicator(self) -> np.ndarray:
        """Boolean mask of length ``size``, True on marked indices."""
        mask = np.zeros(self.size, dtype=bool)
        if self.marked:
            mask[np.fromiter(self.marked, dtype=int)] = True
        return mask


@dataclass(frozen=True)
class RotationAngle:
    """Amplification angle theta = arcsin(sqrt(M/N)) for a bucket."""

    theta: float
    n: int
    marked_count: int

    @classmethod
    def from_counts(cls, n: int, marked_count: int) -> "RotationAngle":
        if n < 1:
            raise ValueError("bucket size must be >= 1")
        if not 0 <= marked_count <= n:
            raise ValueError("marked count must lie in [0, n]")
        theta = math.asin(math.sqrt(marked_count / n))
        return cls(theta=theta, n=n, marked_count=marked_count)


def uniform_init(n: int) -> Register:
    """Uniform superposition over ``n`` states, amplitude 1/sqrt(n) each."""
    if n < 1:
        raise ValueError("register size must be >= 1")
    return Register(np.full(n, 1.0 / math.sqrt(n)))


def apply_oracle(register: Register, marked: MarkedSet) -> Register:
    """Flip the sign of every marked amplitude."""
    if marked.size != register.n:
        raise ValueError("marked set size does not match register size")
    amps = register.amplitudes.copy()
    mask = marked.indicator()
    amps[mask] = -amps[mask]
    return Register(amps)


def invert_about_mean(register: Register) -> Register:
    """Map every amplitude a_k to 2*mean - a_k (the diffusion step)."""
    amps = register.amplitudes
    return Register(2.0 * amps.mean() - amps)


def grover_iterate(register: Register, marked: MarkedSet, times: int) -> Register:
    """Apply the oracle-then-diffusion step ``times`` times."""
    if times < 0:
        raise ValueError("iteration count must be >= 0")
    state = register
    for _ in range(times):
        state = invert_about_mean(apply_oracle(state, marked))
    return state


def analytic_amplitudes(n: int, marked_count: int, times: int) -> tuple[float, float]:
    """Closed-form (marked, unmarked) amplitudes after ``times`` iterations.

    Starting from the uniform state, every marked amplitude equals
    sin((2j+1) theta)/sqrt(M) and every unmarked amplitude equals
    cos((2j+1) theta)/sqrt(N-M).  Defined only for 0 < M < N; the
    degenerate counts are left to the statevector path.
    """
    if n < 2:
        raise ValueError("need n >= 2 for distinct marked and unmarked classes")
    if not 0 < marked_count < n:
        raise ValueError("analytic amplitudes need 0 < marked_count < n")
    if times < 0:
        raise ValueError("iteration count must be >= 0")
    theta = RotationAngle.from_counts(n, marked_count).theta
    phase = (2 * times + 1) * theta
    return (
        math.sin(phase) / math.sqrt(marked_count),
        math.cos(phase) / math.sqrt(n - marked_count),
    )


def success_probability(register: Register, marked: MarkedSet) -> float:
    """Probability that a measurement lands on a marked index."""
    if marked.size != register.n:
        raise ValueError("marked set size does not match register size")
    amps = register.amplitudes
    return float(np.sum(amps[marked.indicator()] ** 2))


def measure(register: Register, rng: np.random.Generator, shots: int | None = None):
    """Sample basis-state indices with probability amplitude^2.

    Non-destructive: the register is unchanged.  With ``shots=None`` a
    single int is returned, otherwise an int array of that length.
    """
    probs = register.amplitudes**2
    cum = np.cumsum(probs)
    cum /= cum[-1]
    u = rng.random() if shots is None else rng.random(shots)
    idx = np.searchsorted(cum, u, side="right")
    idx = np.minimum(idx, register.n - 1)
    return int(idx) if shots is None else idx
