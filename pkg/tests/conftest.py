"""Shared helpers: analytic densities and closed-form entropy oracles."""

import math

import numpy as np
import pytest

from cvwitness.numerics import Grid1D, SampledDensity1D


def gauss_density(grid: Grid1D, mean: float = 0.0, var: float = 1.0) -> SampledDensity1D:
    x = grid.points()
    vals = np.exp(-((x - mean) ** 2) / (2.0 * var)) / math.sqrt(2.0 * math.pi * var)
    return SampledDensity1D.from_values(grid, vals)


def quadratic_gauss_density(grid: Grid1D, sigma: float = 1.0) -> SampledDensity1D:
    """x^2-weighted Gaussian: the sum-variable marginal of the
    Hermite-Gauss family, q(u) = u^2 e^{-u^2/(2 sigma^2)} / (sqrt(2 pi) sigma^3)."""
    x = grid.points()
    vals = x * x * np.exp(-x * x / (2.0 * sigma * sigma))
    return SampledDensity1D.from_values(grid, vals)


def shannon_gauss(var: float) -> float:
    """Closed form 1/2 ln(2 pi e var)."""
    return 0.5 * math.log(2.0 * math.pi * math.e * var)


def renyi_gauss(var: float, alpha: float) -> float:
    """Closed form 1/2 ln(2 pi var) + ln(alpha) / (2 (alpha - 1))."""
    if alpha == math.inf:
        return 0.5 * math.log(2.0 * math.pi * var)
    if abs(alpha - 1.0) < 1e-12:
        return shannon_gauss(var)
    return 0.5 * math.log(2.0 * math.pi * var) + math.log(alpha) / (2.0 * (alpha - 1.0))


@pytest.fixture(scope="session")
def fine_grid() -> Grid1D:
    return Grid1D.symmetric(12.0, 2401)


@pytest.fixture(scope="session")
def pipeline_points() -> int:
    # small self-dual pipeline grid keeps the unit tests fast; the
    # acceptance suite runs the production default
    return 729
