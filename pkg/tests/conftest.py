import warnings

import numpy as np
import pytest

from tkeo_eeg.core import TimeSeries


def tone(freq_hz, fs, n, amplitude=1.0, phase=0.0):
    t = np.arange(n) / fs
    return TimeSeries(amplitude * np.cos(2 * np.pi * freq_hz * t + phase), fs)


def psi(x):
    """Reference TKEO written out sample by sample."""
    return np.array([x[i] ** 2 - x[i - 1] * x[i + 1] for i in range(1, len(x) - 1)])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(autouse=True)
def _quiet_clamp_warnings():
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message="band .* clamped")
        yield


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1][2:])):
            terminalreporter.write_line(line)
