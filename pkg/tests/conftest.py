import math
from fractions import Fraction

import pytest

from scwlink.config import LinkConfig, with_noise
from scwlink.detection import NoiseSpec
from scwlink.link import with_changes
from scwlink.scenarios import apply_calibration, calibrate_to_levels


def series_bessel(order, m, terms=40):
    """J_order(m) from the ascending series in exact rationals."""
    x = Fraction(m) / 2
    total = Fraction(0)
    for k in range(terms):
        total += (-1) ** k * x ** (2 * k + order) / (math.factorial(k) * math.factorial(k + order))
    return float(total)


def bisect(f, lo, hi, tol=1e-13):
    f_lo = f(lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if (f(mid) > 0) == (f_lo > 0):
            lo, f_lo = mid, f(mid)
        else:
            hi = mid
    return 0.5 * (lo + hi)


@pytest.fixture(scope="session")
def paper_calibration():
    cfg = with_noise(LinkConfig(), disable=True)
    return calibrate_to_levels(cfg, 3.5, 3.2)


@pytest.fixture(scope="session")
def calibrated(paper_calibration):
    """Default link, noise off, calibrated to the 3.5 V / 3.2 V levels."""
    return apply_calibration(with_noise(LinkConfig(), disable=True), paper_calibration)


@pytest.fixture(scope="session")
def calibrated_noisy(calibrated):
    """Same link with shot noise switched on."""
    return with_changes(calibrated, detection={"noise": NoiseSpec(shot_noise=True, seed=0)})


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion(request):
    """Record a one-line PASS/FAIL verdict for the terminal summary."""

    def record(label, passed, detail=""):
        ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] {label}: {detail}")
        assert passed, f"{label}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
