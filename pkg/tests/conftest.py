"""Shared fixtures: prime contexts, the GL(4) parabolic and hypothesis profiles."""

from __future__ import annotations

import os
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

from metasum.charsums import PrimeContext  # noqa: E402
from metasum.expsum import gl4_parabolic  # noqa: E402

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("thorough", max_examples=500, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

CONTEXTS = [(3, 1), (5, 2), (7, 3)]


@pytest.fixture(scope="session")
def gl4():
    return gl4_parabolic()


@pytest.fixture(scope="session", params=CONTEXTS, ids=lambda pn: f"p{pn[0]}n{pn[1]}")
def ctx(request):
    return PrimeContext(*request.param)


@pytest.fixture(scope="session")
def ctx7():
    return PrimeContext(7, 3)


# -- acceptance reporting -------------------------------------------------------------

ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture
def acceptance(capsys):
    """Record and echo the PASS/FAIL line of one acceptance criterion."""

    def report(number: int, title: str, ok: bool, detail: str) -> bool:
        line = f"{'PASS' if ok else 'FAIL'}  criterion {number:>2}  {title}: {detail}"
        ACCEPTANCE_LINES[number] = line
        with capsys.disabled():
            print("\n" + line)
        return ok

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
