from pathlib import Path

import pytest

DATA = Path(__file__).resolve().parents[1] / "src" / "debtnet" / "data"
GOLDEN = Path(__file__).resolve().parent / "golden"

_acceptance_lines: list[str] = []


def record_criterion(number: int, passed: bool, detail: str):
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {detail}"
    _acceptance_lines.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)


@pytest.fixture
def micro_paths():
    return DATA / "micro_loans.csv", DATA / "micro_fundings.csv"


@pytest.fixture
def synthetic_paths():
    return DATA / "synthetic_loans.csv", DATA / "synthetic_fundings.csv"
