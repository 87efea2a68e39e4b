from __future__ import annotations

from pathlib import Path

import pytest

DATA_DIR = Path(__file__).parent / "data"
REPO_ROOT = Path(__file__).parent.parent

_criteria: dict[str, str] = {}


def pytest_addoption(parser):
    parser.addoption(
        "--ibrl-data",
        default=str(REPO_ROOT / "data" / "data.txt"),
        help="path to the IBRL data.txt used by the dataset reproduction check",
    )


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion reported in the summary")


@pytest.fixture
def synthetic_path() -> Path:
    return DATA_DIR / "synthetic_ibrl.txt"


@pytest.fixture
def ibrl_path(request) -> Path:
    return Path(request.config.getoption("--ibrl-data"))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    label = marker.args[0]
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[rep.outcome]
        if _criteria.get(label) != "FAIL":
            _criteria[label] = status


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_criteria, key=lambda s: int(s.split(".")[0])):
        terminalreporter.write_line(f"{_criteria[label]:4}  {label}")
