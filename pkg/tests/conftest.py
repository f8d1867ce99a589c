import numpy as np
import pytest

from combwalk import WaveState, evolve
from combwalk.evolution import truncation_for

ACCEPTANCE = {}


def record(key: str, passed: bool, detail: str) -> None:
    """Store one acceptance outcome for the end-of-run summary."""
    ACCEPTANCE[key] = (passed, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: (int(k.split()[0].rstrip('abc')), k)):
        passed, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {key}: {detail}")


@pytest.fixture(scope="session")
def origin_state():
    """Oracle states e^{-itH}|0,0> on a window the front never reaches, cached per t."""
    cache = {}

    def get(t: float) -> WaveState:
        if t not in cache:
            cache[t] = evolve(WaveState.point(truncation_for(t), (0, 0)), t)
        return cache[t]

    return get


@pytest.fixture
def rng():
    return np.random.default_rng(20240613)
