from __future__ import annotations

from pathlib import Path

import pytest

from ttsec.lattice import COMPARTMENT, TWO_POINT, TwoPoint

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"

L, H = TwoPoint.L, TwoPoint.H


@pytest.fixture
def two_point():
    return TWO_POINT


@pytest.fixture
def compartment():
    return COMPARTMENT


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if not test_acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(test_acceptance.RESULTS):
        terminalreporter.write_line(test_acceptance.RESULTS[n])
