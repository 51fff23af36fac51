"""Shared fixtures and the acceptance-summary reporter.

Acceptance tests register one line per criterion via ``record_acceptance``;
the lines are echoed in the terminal summary so a plain ``pytest`` run shows
one pass/fail line per criterion.
"""

import pytest

from stbc42 import RngStream, get_code, make_qam

ACCEPTANCE_LINES = []


def record_acceptance(name: str, passed: bool, detail: str = "") -> None:
    status = "PASS" if passed else "FAIL"
    ACCEPTANCE_LINES.append(f"{status}  {name}" + (f"  [{detail}]" if detail else ""))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def proposed_code():
    return get_code("proposed")


@pytest.fixture(scope="session")
def djabba_code():
    return get_code("djabba")


@pytest.fixture(scope="session")
def qpsk():
    return make_qam(4, normalized=True)


@pytest.fixture(scope="session")
def qpsk_raw():
    return make_qam(4, normalized=False)


@pytest.fixture()
def rng():
    return RngStream(20240809)
