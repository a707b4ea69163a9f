from __future__ import annotations

import time
from pathlib import Path

import pytest
from hypothesis import settings

from uavplace.geometry import BuildingDims
from uavplace.scenario import load_scenario

settings.register_profile("default", deadline=None, max_examples=60, derandomize=True)
settings.load_profile("default")

ROOT = Path(__file__).resolve().parents[1]
SCENARIO = ROOT / "scenarios" / "highrise.cfg"


@pytest.fixture
def highrise() -> BuildingDims:
    return BuildingDims(30.0, 40.0, 60.0)


@pytest.fixture
def scenario():
    return load_scenario(SCENARIO)


@pytest.fixture
def scenario_path() -> Path:
    return SCENARIO


# acceptance criteria report: one line per criterion in the terminal summary
SUITE_BUDGET_S = 300.0
_LINES: list = []
_START = [0.0]


class AcceptanceRecorder:
    def __call__(self, cid: str, ok: bool, text: str) -> bool:
        line = f"[{'PASS' if ok else 'FAIL'}] {cid}: {text}"
        _LINES.append(line)
        print(line)
        return ok


@pytest.fixture
def acceptance() -> AcceptanceRecorder:
    return AcceptanceRecorder()


def pytest_sessionstart(session):
    _START[0] = time.perf_counter()


def _suite_line():
    elapsed = time.perf_counter() - _START[0]
    ok = elapsed < SUITE_BUDGET_S
    return ok, f"[{'PASS' if ok else 'FAIL'}] C10 suite runtime: {elapsed:.1f} s (limit {SUITE_BUDGET_S:.0f} s)"


def pytest_sessionfinish(session, exitstatus):
    if not _suite_line()[0] and exitstatus == 0:
        session.exitstatus = 1


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in _LINES:
        terminalreporter.write_line(line)
    terminalreporter.write_line(_suite_line()[1])
