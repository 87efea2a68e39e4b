"""Command-line front end.

Subcommands::

    entropy-eads entropy        per-window entropies, node summaries, scatter plot
    entropy-eads ellipse        elliptical baseline fit and point classification
    entropy-eads compare        both methods on the same data
    entropy-eads ingest-report  line accounting for an input file

Exit codes: 0 success, 1 validation error, 2 I/O error, 3 degenerate data.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timedelta
from pathlib import Path
from typing import Any

from entropy_eads import __version__
from entropy_eads.detector_eval import (
    DEFAULT_HUMIDITY_BOUNDS,
    DEFAULT_TEMPERATURE_BOUNDS,
    Combinator,
    ComparisonReport,
    DecisionRule,
    EntropyPoint,
    GroundTruth,
    NodeSummary,
    compare,
    decide,
    entropy_points,
    summarize,
)
from entropy_eads.elliptical_baseline import (
    DEFAULT_CONFIDENCE,
    EllipseModel,
    Point2,
    classify_point,
    ellipse_boundary,
    fit,
    mahalanobis_sq,
)
from entropy_eads.entropy_core import BoundaryRange
from entropy_eads.errors import ConfigurationError, DegenerateDataError
from entropy_eads.ibrl_ingest import (
    DEFAULT_EXCLUDED_NODES,
    DEFAULT_PERIOD,
    Dataset,
    DatasetFilter,
    load_dataset,
    paired_readings,
)
from entropy_eads.svg import Mark, scatter
from entropy_eads.windowing import Series, WindowSpec

logger = logging.getLogger("entropy_eads")

EXIT_OK, EXIT_VALIDATION, EXIT_IO, EXIT_DEGENERATE = 0, 1, 2, 3

_COMBINATOR_FLAGS = {"and": Combinator.BOTH_EXCEED, "or": Combinator.EITHER_EXCEEDS}


@dataclass
class RunConfig:
    input: str | None = None
    start: str = DEFAULT_PERIOD[0].isoformat()
    end: str = DEFAULT_PERIOD[1].isoformat()
    window_seconds: float = 600.0
    temp_bounds: str = f"{DEFAULT_TEMPERATURE_BOUNDS.lower}:{DEFAULT_TEMPERATURE_BOUNDS.upper}"
    hum_bounds: str = f"{DEFAULT_HUMIDITY_BOUNDS.lower}:{DEFAULT_HUMIDITY_BOUNDS.upper}"
    exclude_nodes: str = ",".join(str(n) for n in sorted(DEFAULT_EXCLUDED_NODES))
    tau: float = 0.0
    combinator: str = "and"
    confidence: float = DEFAULT_CONFIDENCE
    out: str = "out"
    log_base: float = 10.0


@dataclass
class Resolved:
    """Validated, typed view of a :class:`RunConfig`."""

    raw: RunConfig
    input: Path
    spec: WindowSpec
    temp_bounds: BoundaryRange
    hum_bounds: BoundaryRange
    excluded: frozenset[int]
    rule: DecisionRule
    confidence: float
    out: Path
    log_base: float
    truth: GroundTruth = field(default_factory=GroundTruth)

    @property
    def filter(self) -> DatasetFilter:
        return DatasetFilter(period=(self.spec.period_start, self.spec.period_end), excluded_nodes=self.excluded)


def parse_bounds(text: str) -> BoundaryRange:
    try:
        lo, hi = (float(v) for v in str(text).split(":"))
    except ValueError:
        raise ConfigurationError(f"bounds must look like LO:HI, got {text!r}") from None
    try:
        return BoundaryRange(lo, hi)
    except ValueError as exc:
        raise ConfigurationError(str(exc)) from None


def parse_nodes(text: str) -> frozenset[int]:
    text = str(text).strip()
    if not text:
        return frozenset()
    try:
        return frozenset(int(v) for v in text.split(","))
    except ValueError:
        raise ConfigurationError(f"node list must be comma-separated integers, got {text!r}") from None


def resolve(cfg: RunConfig) -> Resolved:
    """Validate every field before any work is done."""
    if not cfg.input:
        raise ConfigurationError("--input is required")
    try:
        start = datetime.fromisoformat(cfg.start)
        end = datetime.fromisoformat(cfg.end)
    except ValueError as exc:
        raise ConfigurationError(f"bad period timestamp: {exc}") from None
    if cfg.combinator not in _COMBINATOR_FLAGS:
        raise ConfigurationError(f"combinator must be 'and' or 'or', got {cfg.combinator!r}")
    if not cfg.log_base > 0 or cfg.log_base == 1:
        raise ConfigurationError("log base must be positive and not 1")
    try:
        spec = WindowSpec(start, end, timedelta(seconds=float(cfg.window_seconds)))
        rule = DecisionRule(float(cfg.tau), _COMBINATOR_FLAGS[cfg.combinator])
        excluded = parse_nodes(cfg.exclude_nodes)
        DatasetFilter(period=(start, end), excluded_nodes=excluded)
        if not 0.0 < float(cfg.confidence) < 1.0:
            raise ValueError(f"confidence must be in (0, 1), got {cfg.confidence}")
    except ConfigurationError:
        raise
    except ValueError as exc:
        raise ConfigurationError(str(exc)) from None
    return Resolved(
        raw=cfg,
        input=Path(cfg.input),
        spec=spec,
        temp_bounds=parse_bounds(cfg.temp_bounds),
        hum_bounds=parse_bounds(cfg.hum_bounds),
        excluded=excluded,
        rule=rule,
        confidence=float(cfg.confidence),
        out=Path(cfg.out),
        log_base=float(cfg.log_base),
    )


def _num(v: float) -> str:
    return format(v, ".12g")


def _csv(header: list[str], rows: list[list[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _group(node: int, truth: GroundTruth) -> str:
    if node in truth.fully_anomalous_nodes:
        return "full"
    if node in truth.partially_anomalous_nodes:
        return "partial"
    return "other"


def _write(res: Resolved, files: dict[str, str]) -> None:
    res.out.mkdir(parents=True, exist_ok=True)
    files = {**files, "config.json": json.dumps(asdict(res.raw), indent=2, sort_keys=True) + "\n"}
    for name, text in files.items():
        (res.out / name).write_text(text, encoding="utf-8")


def _load(res: Resolved) -> Dataset:
    ds = load_dataset(res.input, res.filter)
    logger.info("ingest: %s", ds.report.summary())
    return ds


# -- entropy --------------------------------------------------------------------------

def run_entropy(res: Resolved, ds: Dataset) -> tuple[list[EntropyPoint], dict[int, NodeSummary]]:
    points = entropy_points(ds, res.spec, res.temp_bounds, res.hum_bounds, res.log_base)
    if not points:
        raise DegenerateDataError("no analyzable windows (no window holds both temperature and humidity)")
    return points, summarize(points, res.rule)


def entropy_files(res: Resolved, points: list[EntropyPoint], summaries: dict[int, NodeSummary]) -> dict[str, str]:
    rows = [
        [p.node_id, p.window_index, res.spec.slot_start(p.window_index).isoformat(),
         _num(p.h_temp), _num(p.h_hum), p.n_temp, p.n_hum, p.violations_temp, p.violations_hum,
         "anomalous" if decide(p, res.rule) else "normal"]
        for p in points
    ]
    points_csv = _csv(
        ["node_id", "window_index", "window_start", "h_temp", "h_hum", "n_temp", "n_hum",
         "violations_temp", "violations_hum", "decision"],
        rows,
    )
    summary_csv = _csv(
        ["node_id", "windows_flagged", "windows_total", "flagged"],
        [[s.node_id, s.windows_flagged, s.windows_total, int(s.flagged)] for s in summaries.values()],
    )
    svg = scatter(
        [Mark(p.h_temp, p.h_hum, _group(p.node_id, res.truth), p.node_id) for p in points],
        title="Window entropies",
        xlabel="H (temperature)",
        ylabel="H (humidity)",
    )
    return {"entropy_points.csv": points_csv, "node_summary.csv": summary_csv, "entropy_scatter.svg": svg}


def cmd_entropy(res: Resolved) -> int:
    points, summaries = run_entropy(res, _load(res))
    _write(res, entropy_files(res, points, summaries))
    flagged = [n for n, s in summaries.items() if s.flagged]
    print(f"{len(points)} windows over {len(summaries)} nodes; flagged nodes: {flagged}")
    return EXIT_OK


# -- ellipse --------------------------------------------------------------------------

def node_points(ds: Dataset) -> dict[int, list[tuple[datetime, Point2]]]:
    out = {}
    for node in ds.nodes():
        pairs = paired_readings(ds.stream(node, Series.TEMPERATURE), ds.stream(node, Series.HUMIDITY))
        if pairs:
            out[node] = [(ts, Point2(t, h)) for ts, t, h in pairs]
    return out


def run_ellipse(res: Resolved, ds: Dataset) -> tuple[EllipseModel, dict[int, list[tuple[datetime, Point2]]]]:
    per_node = node_points(ds)
    all_pts = [p for pts in per_node.values() for _, p in pts]
    return fit(all_pts, res.confidence), per_node


def ellipse_files(res: Resolved, model: EllipseModel, per_node: dict[int, list[tuple[datetime, Point2]]]) -> dict[str, str]:
    (stt, sth), (_, shh) = model.covariance
    model_csv = _csv(
        ["mean_t", "mean_h", "cov_tt", "cov_th", "cov_hh", "confidence", "threshold"],
        [[_num(model.mean[0]), _num(model.mean[1]), _num(stt), _num(sth), _num(shh),
          _num(model.confidence), _num(model.threshold)]],
    )
    rows, marks = [], []
    for node, pts in per_node.items():
        for ts, p in pts:
            rows.append([node, ts.isoformat(), _num(p.t), _num(p.h), _num(mahalanobis_sq(p, model)),
                         "anomalous" if classify_point(p, model) else "normal"])
            marks.append(Mark(p.t, p.h, _group(node, res.truth), node))
    cls_csv = _csv(["node_id", "timestamp", "temperature", "humidity", "mahalanobis_sq", "decision"], rows)
    curve = [(b.t, b.h) for b in ellipse_boundary(model, 128)]
    svg = scatter(
        marks,
        title=f"Elliptical boundary ({model.confidence:.0%} confidence)",
        xlabel="temperature (C)",
        ylabel="humidity (%)",
        curve=curve,
    )
    return {"ellipse_model.csv": model_csv, "point_classification.csv": cls_csv, "ellipse_scatter.svg": svg}


def cmd_ellipse(res: Resolved) -> int:
    model, per_node = run_ellipse(res, _load(res))
    _write(res, ellipse_files(res, model, per_node))
    n_anom = sum(classify_point(p, model) for pts in per_node.values() for _, p in pts)
    print(f"fitted on {sum(len(v) for v in per_node.values())} points; threshold {model.threshold:.4f}; "
          f"{n_anom} anomalous")
    return EXIT_OK


# -- compare --------------------------------------------------------------------------

def run_compare(res: Resolved, ds: Dataset) -> ComparisonReport:
    _, summaries = run_entropy(res, ds)
    model, per_node = run_ellipse(res, ds)
    common = sorted(summaries.keys() & per_node.keys())
    dropped = sorted(summaries.keys() ^ per_node.keys())
    if dropped:
        logger.warning("nodes %s covered by only one method; left out of the comparison", dropped)
    if not common:
        raise DegenerateDataError("no node is covered by both methods")
    cls = {n: [classify_point(p, model) for _, p in per_node[n]] for n in common}
    return compare({n: summaries[n] for n in common}, cls, res.truth)


def comparison_files(res: Resolved, report: ComparisonReport) -> dict[str, str]:
    rows = []
    for n in report.nodes:
        ew, et = report.entropy_windows[n]
        pf, pt = report.ellipse_points[n]
        truth = {"full": "fully_anomalous", "partial": "partially_anomalous", "other": "none"}[_group(n, res.truth)]
        rows.append([n, truth, ew, et, int(n in report.entropy_flagged_nodes),
                     pf, pt, int(n in report.ellipse_flagged_nodes)])
    table = _csv(
        ["node_id", "truth", "entropy_windows_flagged", "entropy_windows_total", "entropy_flagged",
         "ellipse_points_flagged", "ellipse_points_total", "ellipse_flagged"],
        rows,
    )
    ec, pc = report.entropy_confusion, report.ellipse_confusion
    lines = [
        f"nodes analyzed: {len(report.nodes)}",
        f"entropy flagged ({len(report.entropy_flagged_nodes)}): {sorted(report.entropy_flagged_nodes)}",
        f"ellipse flagged ({len(report.ellipse_flagged_nodes)}): {sorted(report.ellipse_flagged_nodes)}",
        f"entropy only: {sorted(report.entropy_only)}",
        f"ellipse only: {sorted(report.ellipse_only)}",
        "entropy confusion: " + " ".join(f"{k}={v}" for k, v in ec.counts.items()),
        "ellipse confusion: " + " ".join(f"{k}={v}" for k, v in pc.counts.items()),
        f"fully anomalous nodes with complete entropy coverage: {ec.full_coverage_ok}",
    ]
    return {"comparison.csv": table, "comparison.txt": "\n".join(lines) + "\n"}


def cmd_compare(res: Resolved) -> int:
    report = run_compare(res, _load(res))
    files = comparison_files(res, report)
    _write(res, files)
    sys.stdout.write(files["comparison.txt"])
    return EXIT_OK


# -- ingest report --------------------------------------------------------------------

def cmd_ingest_report(res: Resolved) -> int:
    ds = _load(res)
    report = ds.report
    if not report.is_consistent():
        raise AssertionError(f"ingest report does not partition lines_read: {report.summary()}")
    if report.records_kept == 0:
        logger.warning("no records kept")
    text = "\n".join(f"{k}: {v}" for k, v in asdict(report).items()) + "\n"
    _write(res, {"ingest_report.txt": text})
    print(report.summary())
    return EXIT_OK


COMMANDS = {
    "entropy": cmd_entropy,
    "ellipse": cmd_ellipse,
    "compare": cmd_compare,
    "ingest-report": cmd_ingest_report,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # usage errors are validation errors, not I/O
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    # defaults are None so that unset flags fall through to the config file
    common.add_argument("--config", help="JSON file with RunConfig fields (flags override it)")
    common.add_argument("--input", help="IBRL data file")
    common.add_argument("--start", help="period start, ISO-8601 (default 2004-03-01T00:00:00)")
    common.add_argument("--end", help="period end, exclusive (default 2004-03-01T04:00:00)")
    common.add_argument("--window-seconds", type=float, dest="window_seconds")
    common.add_argument("--temp-bounds", dest="temp_bounds", metavar="LO:HI")
    common.add_argument("--hum-bounds", dest="hum_bounds", metavar="LO:HI")
    common.add_argument("--exclude-nodes", dest="exclude_nodes", metavar="LIST")
    common.add_argument("--tau", type=float)
    common.add_argument("--combinator", choices=sorted(_COMBINATOR_FLAGS))
    common.add_argument("--confidence", type=float)
    common.add_argument("--out", metavar="DIR")
    common.add_argument("--log-base", type=float, dest="log_base")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="entropy-eads", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=COMMANDS[name].__doc__)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    values: dict[str, Any] = asdict(RunConfig())
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            loaded = json.load(fh)
        unknown = set(loaded) - set(values)
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        values.update(loaded)
    for key in values:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    return RunConfig(**values)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        res = resolve(config_from_args(args))
        return COMMANDS[args.command](res)
    except DegenerateDataError as exc:
        print(f"error: degenerate data: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (ConfigurationError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
