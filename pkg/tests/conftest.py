import os

import pytest
from hypothesis import HealthCheck, settings

from mlsep.figures import beta2_grid
from mlsep.zeros import alpha_grid, sweep, threshold_alpha0

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", parent=settings.get_profile("default"), max_examples=200)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


# The verified sweeps take tens of seconds; share them across modules.
@pytest.fixture(scope="session")
def alpha0():
    return threshold_alpha0(1e-10)


@pytest.fixture(scope="session")
def sweep_alpha():
    return sweep("alpha", alpha_grid())


@pytest.fixture(scope="session")
def sweep_one():
    return sweep(1.0, alpha_grid())


@pytest.fixture(scope="session")
def sweep_two(alpha0):
    return sweep(2.0, beta2_grid(alpha0))


# -- acceptance report -------------------------------------------------------------

ACCEPTANCE_LINES: dict[int, str] = {}


def record_criterion(number: int, title: str, ok: bool, detail: str) -> str:
    line = f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}: {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)
    return line


def pytest_sessionstart(session):
    import time

    session.config._mlsep_t0 = time.perf_counter()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    import time

    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
    elapsed = time.perf_counter() - config._mlsep_t0
    terminalreporter.write_line(f"session wall time {elapsed:.1f} s (budget 600 s for the full suite)")
