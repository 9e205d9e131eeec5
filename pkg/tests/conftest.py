import math

import numpy as np
import pytest

from planar_spectra.geometry import DomainSpec


@pytest.fixture
def unit_disc():
    return DomainSpec.disc(1.0)


@pytest.fixture
def unit_square():
    return DomainSpec.rectangle(1.0, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def rel(a, b):
    return abs(a / b - 1.0)


J01 = 2.404825557695773
J11 = 3.831705970207512
PI = math.pi


# one PASS/FAIL line per acceptance criterion, printed after the run
_ACCEPTANCE = {}


@pytest.fixture
def criterion():
    def record(number: int, passed: bool, detail: str):
        _ACCEPTANCE[number] = (bool(passed), detail)
        return bool(passed)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
