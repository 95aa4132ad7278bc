"""Shared fixtures and the acceptance summary printed after the run."""

import numpy as np
import pytest

ACCEPTANCE_LINES: list = []


def record_criterion(number: int, ok: bool, message: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {message}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
