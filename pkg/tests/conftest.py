"""Shared fixtures and the acceptance summary printed at the end of the run."""
from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dirlip import testfns  # noqa: E402
from dirlip.harness import rescale_to_unit  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def acceptance_log():
    """Append one ``CRITERION k: PASS|FAIL ...`` line per acceptance criterion."""

    def log(line: str) -> None:
        ACCEPTANCE_LINES.append(line)
        print(line)

    return log


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def canonical_4096():
    return testfns.canonical(4096)


@pytest.fixture(scope="session")
def two_zero_4096():
    return testfns.two_zero(4096)


@pytest.fixture(scope="session")
def canonical_unit(canonical_4096):
    return rescale_to_unit(canonical_4096, 0.5)


@pytest.fixture(scope="session")
def two_zero_unit(two_zero_4096):
    return rescale_to_unit(two_zero_4096, 0.5)
