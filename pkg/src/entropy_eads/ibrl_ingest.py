"""Reader for the Intel Berkeley Research Lab sensor log.

Each line of the distributed ``data.txt`` is whitespace separated::

    date       time            epoch moteid temperature humidity light voltage
    2004-03-01 00:00:30.123    12    7      17.2        43.1     45.08 2.69

Trailing sensor fields are frequently missing in the real file; those are
kept as ``None``. Anything else that does not parse is counted as malformed
and skipped.
"""

from __future__ import annotations

import io
import logging
import math
import os
from collections import defaultdict
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field
from datetime import date, datetime, time
from typing import BinaryIO, Union

from entropy_eads.windowing import MAX_NODE_ID, Series, SeriesKey, TimedReading

logger = logging.getLogger(__name__)

DEFAULT_PERIOD = (datetime(2004, 3, 1, 0, 0, 0), datetime(2004, 3, 1, 4, 0, 0))
DEFAULT_EXCLUDED_NODES = frozenset({5, 15})

_SENSOR_FIELDS = (Series.TEMPERATURE, Series.HUMIDITY, Series.LIGHT, Series.VOLTAGE)


@dataclass(frozen=True, slots=True)
class RawRecord:
    date: date
    time: time
    epoch: int
    mote_id: int
    temperature: float | None = None
    humidity: float | None = None
    light: float | None = None
    voltage: float | None = None

    @property
    def timestamp(self) -> datetime:
        return datetime.combine(self.date, self.time)

    def value(self, series: Series) -> float | None:
        return getattr(self, series.value)


@dataclass(frozen=True)
class DatasetFilter:
    period: tuple[datetime, datetime] = DEFAULT_PERIOD
    excluded_nodes: frozenset[int] = DEFAULT_EXCLUDED_NODES
    max_node_id: int = MAX_NODE_ID

    def __post_init__(self) -> None:
        start, end = self.period
        if not start < end:
            raise ValueError("filter period start must precede its end")
        if not 1 <= self.max_node_id <= MAX_NODE_ID:
            raise ValueError(f"max_node_id must be in [1, {MAX_NODE_ID}]")
        bad = sorted(n for n in self.excluded_nodes if not 1 <= n <= self.max_node_id)
        if bad:
            raise ValueError(f"excluded nodes {bad} outside [1, {self.max_node_id}]")

    def node_allowed(self, node_id: int) -> bool:
        return 1 <= node_id <= self.max_node_id and node_id not in self.excluded_nodes

    def in_period(self, ts: datetime) -> bool:
        return self.period[0] <= ts < self.period[1]


@dataclass
class IngestReport:
    lines_read: int = 0
    lines_malformed: int = 0
    records_out_of_period: int = 0
    records_excluded_node: int = 0
    records_kept: int = 0

    def is_consistent(self) -> bool:
        return self.lines_read == (
            self.lines_malformed
            + self.records_out_of_period
            + self.records_excluded_node
            + self.records_kept
        )

    def summary(self) -> str:
        return (
            f"lines_read={self.lines_read} lines_malformed={self.lines_malformed} "
            f"records_out_of_period={self.records_out_of_period} "
            f"records_excluded_node={self.records_excluded_node} "
            f"records_kept={self.records_kept}"
        )


def _parse_time(text: str) -> time:
    """``HH:MM:SS[.ffffff...]``; fractions beyond microseconds are truncated."""
    clock, _, frac = text.partition(".")
    hh, mm, ss = clock.split(":")
    if len(hh) != 2 or len(mm) != 2 or len(ss) != 2 or (frac and not frac.isdigit()):
        raise ValueError(f"bad time {text!r}")
    micro = int(frac[:6].ljust(6, "0")) if frac else 0
    return time(int(hh), int(mm), int(ss), micro)


def parse_line(line: str) -> RawRecord | None:
    """Parse one log line; return None when the line is malformed."""
    parts = line.split()
    if len(parts) < 4 or len(parts) > 8:
        return None
    try:
        d = date.fromisoformat(parts[0])
        t = _parse_time(parts[1])
        epoch = int(parts[2])
        mote = int(parts[3])
        values = [float(p) for p in parts[4:]]
    except ValueError:
        return None
    if epoch < 0 or mote < 1 or not all(math.isfinite(v) for v in values):
        return None
    values += [None] * (4 - len(values))
    return RawRecord(d, t, epoch, mote, *values)


Source = Union[str, os.PathLike, BinaryIO, Iterable[bytes], Iterable[str]]


def _iter_lines(source: Source) -> Iterator[str]:
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            yield from _iter_lines(fh)
        return
    for raw in source:
        if isinstance(raw, bytes):
            raw = raw.decode("utf-8", errors="replace")
        yield raw.rstrip("\r\n")


@dataclass
class Dataset:
    streams: dict[SeriesKey, list[TimedReading]] = field(default_factory=dict)
    report: IngestReport = field(default_factory=IngestReport)

    def nodes(self) -> list[int]:
        return sorted({k.node_id for k in self.streams})

    def stream(self, node_id: int, series: Series) -> list[TimedReading]:
        return self.streams.get(SeriesKey(node_id, series), [])


def load_dataset(source: Source, filt: DatasetFilter | None = None) -> Dataset:
    """Read an IBRL log and split it into per-(node, series) streams.

    ``source`` may be a path, a binary file object or any iterable of byte
    lines. Every line lands in exactly one report category; nodes are checked
    before the period.

    Raises:
        OSError: the source cannot be opened or read.
    """
    filt = filt or DatasetFilter()
    report = IngestReport()
    buckets: dict[SeriesKey, list[TimedReading]] = defaultdict(list)
    for line in _iter_lines(source):
        report.lines_read += 1
        rec = parse_line(line)
        if rec is None:
            report.lines_malformed += 1
            continue
        if not filt.node_allowed(rec.mote_id):
            report.records_excluded_node += 1
            continue
        ts = rec.timestamp
        if not filt.in_period(ts):
            report.records_out_of_period += 1
            continue
        report.records_kept += 1
        for series in _SENSOR_FIELDS:
            v = rec.value(series)
            if v is not None:
                buckets[SeriesKey(rec.mote_id, series)].append(TimedReading(ts, v))

    assert report.is_consistent(), report.summary()
    if report.records_kept == 0:
        logger.warning("no records kept after filtering (%s)", report.summary())
    streams = {k: sorted(v, key=lambda r: r.timestamp) for k, v in sorted(buckets.items())}
    return Dataset(streams, report)


def load_text(text: str, filt: DatasetFilter | None = None) -> Dataset:
    """Convenience wrapper around :func:`load_dataset` for in-memory text."""
    return load_dataset(io.BytesIO(text.encode("utf-8")), filt)


def paired_readings(
    temperature: list[TimedReading], humidity: list[TimedReading]
) -> list[tuple[datetime, float, float]]:
    """Join two streams of one node on identical timestamps.

    Temperature and humidity from the same record share a timestamp. Repeated
    timestamps are matched in order of appearance; unmatched readings drop out.
    """
    by_ts: dict[datetime, list[float]] = defaultdict(list)
    for r in humidity:
        by_ts[r.timestamp].append(r.value)
    used: dict[datetime, int] = defaultdict(int)
    out = []
    for r in temperature:
        hs = by_ts.get(r.timestamp)
        i = used[r.timestamp]
        if hs is not None and i < len(hs):
            out.append((r.timestamp, r.value, hs[i]))
            used[r.timestamp] += 1
    return out
