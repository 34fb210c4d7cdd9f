import numpy as np
import pytest
from hypothesis import settings

from crossmi import PairedSeries

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


def bivariate_normal(n, rho, seed):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n)
    y = rho * x + np.sqrt(1 - rho * rho) * rng.standard_normal(n)
    return PairedSeries(x, y)


@pytest.fixture
def normal_pair():
    return bivariate_normal


@pytest.fixture
def write_csv(tmp_path):
    def _write(name, text):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path
    return _write


# one line per acceptance criterion, shown in the terminal summary
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
