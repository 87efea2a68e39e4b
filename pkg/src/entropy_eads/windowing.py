"""Tumbling fixed-width windows anchored at the analysis period start."""

from __future__ import annotations

import enum
import logging
from collections.abc import Iterable
from dataclasses import dataclass
from datetime import datetime, timedelta

logger = logging.getLogger(__name__)

DEFAULT_WIDTH = timedelta(seconds=600)
MAX_NODE_ID = 54


class Series(str, enum.Enum):
    TEMPERATURE = "temperature"
    HUMIDITY = "humidity"
    LIGHT = "light"
    VOLTAGE = "voltage"


@dataclass(frozen=True, slots=True, order=True)
class SeriesKey:
    node_id: int
    series: Series

    def __post_init__(self) -> None:
        if not 1 <= self.node_id <= MAX_NODE_ID:
            raise ValueError(f"node_id {self.node_id} outside [1, {MAX_NODE_ID}]")


@dataclass(frozen=True, slots=True)
class TimedReading:
    timestamp: datetime
    value: float


@dataclass(frozen=True, slots=True)
class WindowSpec:
    """Half-open analysis period ``[period_start, period_end)`` cut into slots."""

    period_start: datetime
    period_end: datetime
    width: timedelta = DEFAULT_WIDTH

    def __post_init__(self) -> None:
        if not self.period_start < self.period_end:
            raise ValueError("period_start must be before period_end")
        if self.width <= timedelta(0):
            raise ValueError("window width must be positive")

    @property
    def n_slots(self) -> int:
        """Number of window slots needed to cover the period (last may be short)."""
        span = self.period_end - self.period_start
        full, rest = divmod(span, self.width)
        return full + (1 if rest else 0)

    def slot_start(self, index: int) -> datetime:
        return self.period_start + index * self.width

    def index_of(self, ts: datetime) -> int | None:
        """Window ordinal for ``ts``, or None when it lies outside the period."""
        if ts < self.period_start or ts >= self.period_end:
            return None
        return (ts - self.period_start) // self.width


@dataclass(frozen=True, slots=True)
class AcquisitionWindow:
    key: SeriesKey
    index: int
    samples: tuple[float, ...]
    timestamps: tuple[datetime, ...]

    @property
    def n(self) -> int:
        return len(self.samples)


def partition(
    readings: Iterable[TimedReading], key: SeriesKey, spec: WindowSpec
) -> list[AcquisitionWindow]:
    """Assign each reading to its tumbling window.

    Readings are sorted by timestamp first; the sort is stable so duplicate
    timestamps keep their input order. Windows without readings are omitted.
    Readings outside the period are dropped and counted in a warning.
    """
    ordered = sorted(readings, key=lambda r: r.timestamp)
    bins: dict[int, list[TimedReading]] = {}
    dropped = 0
    for r in ordered:
        idx = spec.index_of(r.timestamp)
        if idx is None:
            dropped += 1
            continue
        bins.setdefault(idx, []).append(r)
    if dropped:
        logger.warning("%s/%s: %d reading(s) outside the analysis period excluded",
                       key.node_id, key.series.value, dropped)
    return [
        AcquisitionWindow(
            key=key,
            index=idx,
            samples=tuple(r.value for r in bins[idx]),
            timestamps=tuple(r.timestamp for r in bins[idx]),
        )
        for idx in sorted(bins)
    ]
