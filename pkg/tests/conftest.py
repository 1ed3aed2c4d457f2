from __future__ import annotations

import numpy as np
import pytest

from tvpshrink.simulate import SimConfig, sim_tvp

ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture(scope="session")
def small_sim():
    return sim_tvp(SimConfig(T=60, theta=(0.2, 0.0), beta_mean=(1.0, -0.5), seed=7))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
