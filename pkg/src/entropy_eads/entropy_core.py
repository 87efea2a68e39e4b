"""Window entropy from boundary violations.

Each reading in a window is classified against a normal range (0 inside,
1 outside). The indicators are summed into a running cumulative-state
sequence, the distinct cumulative values are counted, and the Shannon
entropy of the resulting count distribution is the window's score::

    readings  16.0  19.1  19.3  17.0
    indicator    0     1     1     0
    cumulative   0     1     2     2
    histogram  {0: 1, 1: 1, 2: 2}  ->  p = (0.25, 0.25, 0.5)
    H = -sum(p * log10(p)) = 0.4515

The logarithm is base 10 by default. With base 10, seven consecutive
violations give ``log10(7) = 0.8451`` and a fully in-range window gives 0.

A single-sample window always has one cumulative state and therefore
``H == 0`` even when the sample violates the range. Callers that must not
miss such windows should look at the violation count as well
(:func:`violation_count`).
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from entropy_eads.errors import EmptyWindowError, RejectedInputError

DEFAULT_LOG_BASE = 10.0


@dataclass(frozen=True, slots=True)
class BoundaryRange:
    """Closed normal interval ``[lower, upper]`` for one physical parameter."""

    lower: float
    upper: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lower) and math.isfinite(self.upper)):
            raise ValueError(f"boundary values must be finite, got [{self.lower}, {self.upper}]")
        if self.lower > self.upper:
            raise ValueError(f"lower bound {self.lower} exceeds upper bound {self.upper}")

    def contains(self, x: float) -> bool:
        return self.lower <= x <= self.upper


@dataclass(frozen=True, slots=True)
class StateHistogram:
    """Distinct cumulative states in order of first appearance, with counts."""

    states: tuple[int, ...]
    counts: tuple[int, ...]

    @property
    def n(self) -> int:
        return sum(self.counts)

    @property
    def k(self) -> int:
        return len(self.states)


def classify_reading(x: float, bounds: BoundaryRange) -> int:
    """Return 0 if ``x`` lies inside ``bounds`` (ends inclusive), else 1.

    Raises:
        RejectedInputError: ``x`` is NaN or infinite.
    """
    if not math.isfinite(x):
        raise RejectedInputError(f"non-finite reading {x!r}")
    return 0 if bounds.lower <= x <= bounds.upper else 1


def indicators(samples: Iterable[float], bounds: BoundaryRange) -> list[int]:
    return [classify_reading(x, bounds) for x in samples]


def violation_count(samples: Iterable[float], bounds: BoundaryRange) -> int:
    return sum(indicators(samples, bounds))


def cumulative_states(bits: Sequence[int]) -> list[int]:
    """Running sum of violation indicators, starting from an implicit 0."""
    if len(bits) == 0:
        raise EmptyWindowError("cannot build cumulative states for an empty window")
    out: list[int] = []
    total = 0
    for b in bits:
        if b not in (0, 1):
            raise RejectedInputError(f"indicator must be 0 or 1, got {b!r}")
        total += b
        out.append(total)
    return out


def accumulate(states: Sequence[int]) -> StateHistogram:
    """Count repetitions of each distinct cumulative state.

    Cumulative states never decrease, so equal values are contiguous and a
    single pass over runs is enough.
    """
    if len(states) == 0:
        raise EmptyWindowError("cannot accumulate an empty state sequence")
    distinct: list[int] = []
    counts: list[int] = []
    for s in states:
        if distinct and distinct[-1] == s:
            counts[-1] += 1
        else:
            if distinct and s < distinct[-1]:
                raise ValueError("cumulative states must be non-decreasing")
            distinct.append(s)
            counts.append(1)
    return StateHistogram(tuple(distinct), tuple(counts))


def probabilities(hist: StateHistogram) -> list[float]:
    total = hist.n
    if total < 1:
        raise EmptyWindowError("histogram has no observations")
    return [c / total for c in hist.counts]


def entropy(probs: Sequence[float], base: float = DEFAULT_LOG_BASE) -> float:
    """Shannon entropy ``-sum(p * log(p))`` in the given logarithm base.

    A one-element distribution returns exactly ``0.0``.
    """
    if len(probs) == 0:
        raise EmptyWindowError("empty probability vector")
    if len(probs) == 1:
        return 0.0
    log_base = math.log(base)
    return -math.fsum(p * math.log(p) for p in probs) / log_base


def window_entropy(
    samples: Sequence[float], bounds: BoundaryRange, base: float = DEFAULT_LOG_BASE
) -> float:
    """Entropy of one acquisition window against a normal range.

    Raises:
        EmptyWindowError: ``samples`` is empty.
        RejectedInputError: a sample is not finite.
    """
    if len(samples) == 0:
        raise EmptyWindowError("window has no samples")
    hist = accumulate(cumulative_states(indicators(samples, bounds)))
    return entropy(probabilities(hist), base=base)
