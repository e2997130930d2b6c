import numpy as np
import pytest

from ilwlab.fourier import SpectralField, from_modes, make_grid


def random_field(rng, grid, kmax=None, mean_zero=False, scale=1.0):
    """Real band-limited field with Gaussian coefficients on modes 1..kmax."""
    kmax = kmax or grid.n_points // 2 - 1
    modes = {n: scale * complex(rng.standard_normal(), rng.standard_normal()) for n in range(1, kmax + 1)}
    if not mean_zero:
        modes[0] = scale * rng.standard_normal()
    return from_modes(grid, modes)


def default_profile(grid, a=0.1, b=0.05):
    return from_modes(grid, {1: a / 2, 2: -0.5j * b})


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def grid8():
    return make_grid(1.0, 8)


__all__ = ["random_field", "default_profile", "SpectralField"]


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[k])
