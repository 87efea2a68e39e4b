"""Window decisions, node aggregation and method comparison.

Entropy points sit on the axes of the (H_temperature, H_humidity) plane when
at most one series is irregular; with the default rule a window is anomalous
only when both entropies are strictly positive.
"""

from __future__ import annotations

import enum
from collections import defaultdict
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

from entropy_eads.entropy_core import (
    DEFAULT_LOG_BASE,
    BoundaryRange,
    violation_count,
    window_entropy,
)
from entropy_eads.errors import ConfigurationError
from entropy_eads.ibrl_ingest import Dataset
from entropy_eads.windowing import AcquisitionWindow, Series, SeriesKey, WindowSpec, partition

DEFAULT_TEMPERATURE_BOUNDS = BoundaryRange(15.55, 18.00)
DEFAULT_HUMIDITY_BOUNDS = BoundaryRange(42.25, 45.80)


class Combinator(str, enum.Enum):
    BOTH_EXCEED = "both_exceed"
    EITHER_EXCEEDS = "either_exceeds"


@dataclass(frozen=True, slots=True)
class EntropyPoint:
    node_id: int
    window_index: int
    h_temp: float
    h_hum: float
    n_temp: int
    n_hum: int
    violations_temp: int
    violations_hum: int


@dataclass(frozen=True, slots=True)
class DecisionRule:
    tau: float = 0.0
    combinator: Combinator = Combinator.BOTH_EXCEED

    def __post_init__(self) -> None:
        if not (self.tau >= 0.0 and self.tau != float("inf")):
            raise ValueError(f"tau must be finite and non-negative, got {self.tau}")


@dataclass(frozen=True)
class GroundTruth:
    fully_anomalous_nodes: frozenset[int] = frozenset({37})
    partially_anomalous_nodes: frozenset[int] = frozenset({14})

    def __post_init__(self) -> None:
        both = self.fully_anomalous_nodes & self.partially_anomalous_nodes
        if both:
            raise ValueError(f"nodes {sorted(both)} listed as both fully and partially anomalous")

    @property
    def positives(self) -> frozenset[int]:
        return self.fully_anomalous_nodes | self.partially_anomalous_nodes


@dataclass(frozen=True, slots=True)
class NodeSummary:
    node_id: int
    windows_flagged: int
    windows_total: int

    @property
    def flagged(self) -> bool:
        return self.windows_flagged >= 1

    @property
    def coverage(self) -> float:
        return self.windows_flagged / self.windows_total


@dataclass
class Confusion:
    tp: set[int] = field(default_factory=set)
    fp: set[int] = field(default_factory=set)
    tn: set[int] = field(default_factory=set)
    fn: set[int] = field(default_factory=set)
    # fully anomalous nodes whose windows were not all flagged
    incomplete_full_coverage: set[int] = field(default_factory=set)

    @property
    def counts(self) -> dict[str, int]:
        return {"tp": len(self.tp), "fp": len(self.fp), "tn": len(self.tn), "fn": len(self.fn)}

    @property
    def full_coverage_ok(self) -> bool:
        return not self.incomplete_full_coverage


@dataclass
class ComparisonReport:
    entropy_flagged_nodes: set[int]
    ellipse_flagged_nodes: set[int]
    entropy_windows: dict[int, tuple[int, int]]
    ellipse_points: dict[int, tuple[int, int]]
    entropy_confusion: Confusion
    ellipse_confusion: Confusion

    @property
    def entropy_only(self) -> set[int]:
        return self.entropy_flagged_nodes - self.ellipse_flagged_nodes

    @property
    def ellipse_only(self) -> set[int]:
        return self.ellipse_flagged_nodes - self.entropy_flagged_nodes

    @property
    def nodes(self) -> list[int]:
        return sorted(self.entropy_windows)


def decide(p: EntropyPoint, rule: DecisionRule = DecisionRule()) -> bool:
    """True when the window is anomalous under ``rule``."""
    t_hit = p.h_temp > rule.tau
    h_hit = p.h_hum > rule.tau
    if rule.combinator is Combinator.BOTH_EXCEED:
        return t_hit and h_hit
    return t_hit or h_hit


def summarize_node(points: Sequence[EntropyPoint], rule: DecisionRule = DecisionRule()) -> NodeSummary | None:
    if not points:
        return None
    node = points[0].node_id
    if any(p.node_id != node for p in points):
        raise ConfigurationError("summarize_node got points from several nodes")
    flagged = sum(decide(p, rule) for p in points)
    return NodeSummary(node, flagged, len(points))


def summarize(points: Iterable[EntropyPoint], rule: DecisionRule = DecisionRule()) -> dict[int, NodeSummary]:
    by_node: dict[int, list[EntropyPoint]] = defaultdict(list)
    for p in points:
        by_node[p.node_id].append(p)
    return {n: summarize_node(ps, rule) for n, ps in sorted(by_node.items())}


def evaluate(flagged: Mapping[int, bool], truth: GroundTruth = GroundTruth(),
             coverage: Mapping[int, float] | None = None) -> Confusion:
    """Node-level confusion against the ground-truth sets.

    ``flagged`` maps every analyzed node to its decision. When ``coverage``
    (fraction of flagged windows per node) is given, fully anomalous nodes
    below 1.0 are reported in ``incomplete_full_coverage``.
    """
    conf = Confusion()
    positives = truth.positives
    for node, hit in flagged.items():
        if node in positives:
            (conf.tp if hit else conf.fn).add(node)
        else:
            (conf.fp if hit else conf.tn).add(node)
    if coverage is not None:
        for node in truth.fully_anomalous_nodes:
            if node in coverage and coverage[node] < 1.0:
                conf.incomplete_full_coverage.add(node)
    return conf


def evaluate_summaries(summaries: Mapping[int, NodeSummary], truth: GroundTruth = GroundTruth()) -> Confusion:
    return evaluate(
        {n: s.flagged for n, s in summaries.items()},
        truth,
        coverage={n: s.coverage for n, s in summaries.items()},
    )


def compare(
    entropy_summaries: Mapping[int, NodeSummary],
    ellipse_classifications: Mapping[int, Sequence[bool]],
    truth: GroundTruth = GroundTruth(),
) -> ComparisonReport:
    """Contrast entropy and ellipse detections on the same node set.

    A node is ellipse-flagged when any of its points is anomalous.

    Raises:
        ConfigurationError: the two methods cover different nodes.
    """
    if set(entropy_summaries) != set(ellipse_classifications):
        missing = sorted(set(entropy_summaries) ^ set(ellipse_classifications))
        raise ConfigurationError(f"methods cover different node sets; mismatch on {missing}")
    ellipse_points = {
        n: (sum(bool(c) for c in cls), len(cls))
        for n, cls in sorted(ellipse_classifications.items())
    }
    ellipse_flags = {n: hits >= 1 for n, (hits, _) in ellipse_points.items()}
    return ComparisonReport(
        entropy_flagged_nodes={n for n, s in entropy_summaries.items() if s.flagged},
        ellipse_flagged_nodes={n for n, f in ellipse_flags.items() if f},
        entropy_windows={n: (s.windows_flagged, s.windows_total) for n, s in sorted(entropy_summaries.items())},
        ellipse_points=ellipse_points,
        entropy_confusion=evaluate_summaries(entropy_summaries, truth),
        ellipse_confusion=evaluate(ellipse_flags, truth),
    )


def _series_windows(dataset: Dataset, node: int, series: Series, spec: WindowSpec) -> dict[int, AcquisitionWindow]:
    key = SeriesKey(node, series)
    return {w.index: w for w in partition(dataset.streams.get(key, []), key, spec)}


def entropy_points(
    dataset: Dataset,
    spec: WindowSpec,
    temp_bounds: BoundaryRange = DEFAULT_TEMPERATURE_BOUNDS,
    hum_bounds: BoundaryRange = DEFAULT_HUMIDITY_BOUNDS,
    base: float = DEFAULT_LOG_BASE,
) -> list[EntropyPoint]:
    """One point per (node, window) holding samples in both series.

    Windows where only one of the two series has readings are skipped.
    """
    points = []
    for node in dataset.nodes():
        temp = _series_windows(dataset, node, Series.TEMPERATURE, spec)
        hum = _series_windows(dataset, node, Series.HUMIDITY, spec)
        for idx in sorted(temp.keys() & hum.keys()):
            ts, hs = temp[idx].samples, hum[idx].samples
            points.append(
                EntropyPoint(
                    node_id=node,
                    window_index=idx,
                    h_temp=window_entropy(ts, temp_bounds, base),
                    h_hum=window_entropy(hs, hum_bounds, base),
                    n_temp=len(ts),
                    n_hum=len(hs),
                    violations_temp=violation_count(ts, temp_bounds),
                    violations_hum=violation_count(hs, hum_bounds),
                )
            )
    return points
