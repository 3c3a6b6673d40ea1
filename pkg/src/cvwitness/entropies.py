"""Shannon, Renyi and Tsallis entropies for sampled and binned distributions.

The entropy order alpha is a plain positive float; ``math.inf`` selects the
min-entropy and values within ALPHA_SHANNON_WINDOW of 1 route to the Shannon
formulas (the (1 - alpha)^-1 prefactor amplifies quadrature noise faster
than the limit converges).
"""

from __future__ import annotations

import math
import warnings

import numpy as np

from .marginals import DiscreteDistribution
from .numerics import SampledDensity1D, SampledFunction1D, integrate

__all__ = [
    "ALPHA_SHANNON_WINDOW",
    "lalpha_norm",
    "renyi_continuous",
    "shannon_continuous",
    "renyi_discrete",
    "tsallis_discrete",
    "validate_order",
]

#: |alpha - 1| below this routes to the Shannon limit formulas.
ALPHA_SHANNON_WINDOW = 1e-6

#: Density values below this are dropped from log integrands (x ln x -> 0).
ZERO_FLOOR = 1e-300


def validate_order(alpha: float) -> float:
    """Check alpha in (0, inf]; returns it unchanged."""
    if alpha != math.inf and not (alpha > 0 and math.isfinite(alpha)):
        raise ValueError(f"entropy order must be positive or inf, got {alpha}")
    return alpha


def _is_shannon(alpha: float) -> bool:
    return alpha != math.inf and abs(alpha - 1.0) < ALPHA_SHANNON_WINDOW


def _power_integral(d: SampledDensity1D, alpha: float,
                    truncation_tol: float = 1e-10) -> float:
    """integral of d^alpha with a heavy-tail truncation estimate.

    Raising a density to a power alpha < 1 fattens its tails; the warning
    fires when the density itself has decayed at the grid edge yet the
    powered integrand still contributes materially there (densities with
    genuine mass at the boundary, e.g. compact support, are left alone).
    """
    powered = d.values ** alpha
    total = integrate(SampledFunction1D(d.grid, powered))
    edge = (powered[0] + powered[-1]) * d.grid.spacing
    density_decayed = max(d.values[0], d.values[-1]) < 1e-6 * d.values.max()
    if total > 0 and density_decayed and edge > truncation_tol * total:
        warnings.warn(
            f"integral of d^{alpha:g} has edge contribution {edge / total:.2e} "
            "of the total; grid may truncate the fattened tails", UserWarning)
    return total


def lalpha_norm(d: SampledDensity1D, alpha: float) -> float:
    """L_alpha norm [integral d^alpha]^{1/alpha}; sup of d at alpha = inf."""
    validate_order(alpha)
    if alpha == math.inf:
        return float(d.values.max())
    if abs(alpha - 1.0) < ALPHA_SHANNON_WINDOW:
        return d.mass()
    return _power_integral(d, alpha) ** (1.0 / alpha)


def shannon_continuous(d: SampledDensity1D) -> float:
    """Differential entropy -integral d ln d, with 0 ln 0 = 0."""
    v = d.values
    mask = v > ZERO_FLOOR
    integrand = np.where(mask, -v * np.log(np.where(mask, v, 1.0)), 0.0)
    return integrate(SampledFunction1D(d.grid, integrand))


def renyi_continuous(d: SampledDensity1D, alpha: float) -> float:
    """Renyi entropy (1 - alpha)^-1 ln integral d^alpha.

    alpha = 1 (within the routing window) gives the Shannon entropy and
    alpha = inf the min-entropy -ln sup d.
    """
    validate_order(alpha)
    if alpha == math.inf:
        return -math.log(float(d.values.max()))
    if _is_shannon(alpha):
        return shannon_continuous(d)
    return math.log(_power_integral(d, alpha)) / (1.0 - alpha)


def renyi_discrete(dist: DiscreteDistribution, alpha: float) -> float:
    """Discrete Renyi entropy (1 - alpha)^-1 ln sum rho_k^alpha."""
    validate_order(alpha)
    p = dist.probabilities
    if alpha == math.inf:
        return -math.log(float(p.max()))
    if _is_shannon(alpha):
        pos = p[p > 0]
        return float(-(pos * np.log(pos)).sum())
    return math.log(float((p[p > 0] ** alpha).sum())) / (1.0 - alpha)


def tsallis_discrete(dist: DiscreteDistribution, alpha: float) -> float:
    """Discrete Tsallis entropy (sum rho_k^alpha - 1)/(1 - alpha).

    At alpha = 1 (within the routing window) returns the discrete Shannon
    entropy, the alpha -> 1 limit.
    """
    validate_order(alpha)
    if alpha == math.inf:
        raise ValueError("Tsallis entropy is not defined at alpha = inf")
    if _is_shannon(alpha):
        return renyi_discrete(dist, 1.0)
    p = dist.probabilities
    return (float((p[p > 0] ** alpha).sum()) - 1.0) / (1.0 - alpha)
