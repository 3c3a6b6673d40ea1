"""Bipartite example states and their joint quadrature densities.

Pure two-mode states are carried as complex amplitude tables on a grid pair
(`PureGridState`); every criterion downstream only ever consumes joint
quadrature densities (`JointDensity2D`) or 1D marginals, so mixed states
(dephased cats, thermal products) are represented directly through those.

The catalog: the Hermite-Gauss family eta(r1, r2) ~ (r1+r2) exp(-(r1+r2)^2 /
4 sigma_+^2) exp(-(r1-r2)^2 / 4 sigma_-^2), NOON superpositions
(|N,0> + |0,N>)/sqrt(2), dephased two-mode cat states built from coherent
amplitudes (nu, nu) and (-nu, -nu), and Gaussian products (vacuum, squeezed,
thermal) used as separable controls.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .numerics import (
    Grid1D,
    SampledFunction1D,
    TruncationWarning,
    frft_values,
    integrate,
    fock_wavefunction,
)

__all__ = [
    "HermiteGaussParams",
    "NoonParams",
    "CatParams",
    "GaussianProductParams",
    "QuadratureAngles",
    "PureGridState",
    "JointDensity2D",
    "build_hermite_gauss",
    "build_noon",
    "build_gaussian_product",
    "gaussian_wavefunction",
    "coherent_wavefunction",
    "joint_density_pure",
    "cat_joint_density",
    "cat_mode_components",
    "default_grid",
]

MAX_NOON_PHOTONS = 10

#: Default number of grid points for the 2D pipeline (odd, 5-smooth, and the
#: self-dual spacing sqrt(2 pi / n) resolves every catalog state).
DEFAULT_GRID_POINTS = 1215


def default_grid(n_points: int = DEFAULT_GRID_POINTS) -> Grid1D:
    """Self-dual symmetric grid used by the evaluation pipeline."""
    return Grid1D.self_dual(n_points)


@dataclass(frozen=True)
class QuadratureAngles:
    """Per-mode rotation angles defining r_j = cos(theta_j) x_j + sin(theta_j) p_j."""

    theta1: float = 0.0
    theta2: float = 0.0

    def __post_init__(self):
        for name in ("theta1", "theta2"):
            v = float(np.mod(getattr(self, name), 2.0 * math.pi))
            object.__setattr__(self, name, v)


@dataclass(frozen=True)
class HermiteGaussParams:
    sigma_plus: float
    sigma_minus: float

    def __post_init__(self):
        if not (self.sigma_plus > 0 and math.isfinite(self.sigma_plus)):
            raise ValueError(f"sigma_plus must be positive, got {self.sigma_plus}")
        if not (self.sigma_minus > 0 and math.isfinite(self.sigma_minus)):
            raise ValueError(f"sigma_minus must be positive, got {self.sigma_minus}")

    @property
    def ratio(self) -> float:
        return self.sigma_minus / self.sigma_plus


@dataclass(frozen=True)
class NoonParams:
    n_photons: int
    max_photons: int = MAX_NOON_PHOTONS

    def __post_init__(self):
        if not 1 <= self.n_photons <= self.max_photons:
            raise ValueError(
                f"n_photons must be in [1, {self.max_photons}], got {self.n_photons}")


@dataclass(frozen=True)
class CatParams:
    """Dephased entangled cat: coherent amplitude nu, dephasing p in [0, 1]."""

    nu: complex
    p: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"dephasing p must lie in [0, 1], got {self.p}")
        if not math.isfinite(abs(complex(self.nu))):
            raise ValueError("nu must be finite")
        object.__setattr__(self, "nu", complex(self.nu))

    def normalization(self) -> float:
        """1 / (2 - 2 (1 - p) e^{-4 |nu|^2}), fixing trace one."""
        return 1.0 / (2.0 - 2.0 * (1.0 - self.p) * math.exp(-4.0 * abs(self.nu) ** 2))


@dataclass(frozen=True)
class GaussianProductParams:
    """Separable product of two Gaussian modes given by quadrature variances.

    Covers vacuum (all 1/2), squeezed vacua (e^{-2r}/2, e^{+2r}/2) and thermal
    modes ((2 nbar + 1)/2 in both quadratures).  ``pure`` attests that each
    mode saturates the uncertainty product (needed by the strong criteria).
    """

    var_x1: float
    var_p1: float
    var_x2: float
    var_p2: float
    pure: bool

    def __post_init__(self):
        for name in ("var_x1", "var_p1", "var_x2", "var_p2"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ValueError(f"{name} must be positive, got {v}")
        if self.pure:
            for vx, vp in ((self.var_x1, self.var_p1), (self.var_x2, self.var_p2)):
                if abs(vx * vp - 0.25) > 1e-9:
                    raise ValueError(
                        "pure Gaussian modes must saturate var_x * var_p = 1/4")

    @classmethod
    def vacuum(cls) -> "GaussianProductParams":
        return cls(0.5, 0.5, 0.5, 0.5, pure=True)

    @classmethod
    def squeezed(cls, r1: float, r2: float) -> "GaussianProductParams":
        return cls(0.5 * math.exp(-2 * r1), 0.5 * math.exp(2 * r1),
                   0.5 * math.exp(-2 * r2), 0.5 * math.exp(2 * r2), pure=True)

    @classmethod
    def thermal(cls, nbar1: float, nbar2: float) -> "GaussianProductParams":
        v1 = 0.5 * (2 * nbar1 + 1)
        v2 = 0.5 * (2 * nbar2 + 1)
        return cls(v1, v1, v2, v2, pure=(nbar1 == nbar2 == 0))


@dataclass(frozen=True)
class PureGridState:
    """Two-mode wavefunction Psi(q1, q2) tabulated on grid1 x grid2."""

    grid1: Grid1D
    grid2: Grid1D
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex)
        if amp.shape != (self.grid1.n_points, self.grid2.n_points):
            raise ValueError("amplitude shape must match the grid pair")
        object.__setattr__(self, "amplitudes", amp)

    def norm(self) -> float:
        return math.sqrt(float(np.sum(np.abs(self.amplitudes) ** 2))
                         * self.grid1.spacing * self.grid2.spacing)

    @classmethod
    def from_raw(cls, grid1: Grid1D, grid2: Grid1D, amp: np.ndarray) -> "PureGridState":
        amp = np.asarray(amp, dtype=complex)
        nrm = math.sqrt(float(np.sum(np.abs(amp) ** 2)) * grid1.spacing * grid2.spacing)
        if nrm <= 0:
            raise ValueError("state has zero norm on this grid")
        return cls(grid1, grid2, amp / nrm)

    @classmethod
    def product(cls, f1: SampledFunction1D, f2: SampledFunction1D) -> "PureGridState":
        return cls.from_raw(f1.grid, f2.grid, np.outer(f1.values, f2.values))


@dataclass(frozen=True)
class JointDensity2D:
    """Non-negative joint quadrature density P(q1, q2), unit total mass."""

    grid1: Grid1D
    grid2: Grid1D
    values: np.ndarray = field(repr=False)
    renormalization: float = 0.0

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.grid1.n_points, self.grid2.n_points):
            raise ValueError("density shape must match the grid pair")
        if vals.min() < 0:
            raise ValueError("joint density has negative entries; use from_raw()")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_raw(cls, grid1: Grid1D, grid2: Grid1D, vals: np.ndarray,
                 clip_tol: float = 1e-12) -> "JointDensity2D":
        vals = np.asarray(vals, dtype=float)
        peak = vals.max() if vals.size else 0.0
        if vals.min() < -clip_tol * max(peak, 1.0):
            raise ValueError(f"joint density significantly negative ({vals.min():.3e})")
        vals = np.clip(vals, 0.0, None)
        mass = float(np.sum(vals)) * grid1.spacing * grid2.spacing
        if mass <= 0:
            raise ValueError("joint density has no mass")
        return cls(grid1, grid2, vals / mass, renormalization=abs(1.0 - mass))

    def mass(self) -> float:
        return float(np.sum(self.values)) * self.grid1.spacing * self.grid2.spacing


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------

def build_hermite_gauss(params: HermiteGaussParams, grid1: Grid1D,
                        grid2: Grid1D | None = None) -> PureGridState:
    """Hermite-Gauss state: (r1+r2) times a two-width Gaussian envelope.

    Entangled for every (sigma_+, sigma_-); vanishes on the line r1 = -r2.
    At sigma_+ = sigma_- = 1 it coincides with the N = 1 NOON state.
    """
    grid2 = grid2 or grid1
    span = 8.0 * max(params.sigma_plus, params.sigma_minus)
    if min(grid1.max, grid2.max) < span / math.sqrt(2.0):
        warnings.warn("hermite-gauss grid may truncate the state", TruncationWarning)
    x1 = grid1.points()[:, None]
    x2 = grid2.points()[None, :]
    amp = ((x1 + x2)
           * np.exp(-((x1 + x2) ** 2) / (4.0 * params.sigma_plus ** 2))
           * np.exp(-((x1 - x2) ** 2) / (4.0 * params.sigma_minus ** 2)))
    return PureGridState.from_raw(grid1, grid2, amp)


def build_noon(params: NoonParams, grid1: Grid1D,
               grid2: Grid1D | None = None) -> PureGridState:
    """NOON state (|N,0> + |0,N>)/sqrt(2) as a position-space wavefunction.

    The two branches are orthogonal for N >= 1, so the 1/sqrt(2) prefactor is
    exact; the sampled amplitude is renormalized on the grid regardless.
    """
    grid2 = grid2 or grid1
    n = params.n_photons
    f0_1 = fock_wavefunction(0, grid1).values
    fn_1 = fock_wavefunction(n, grid1).values
    if grid2 == grid1:
        f0_2, fn_2 = f0_1, fn_1
    else:
        f0_2 = fock_wavefunction(0, grid2).values
        fn_2 = fock_wavefunction(n, grid2).values
    amp = (np.outer(fn_1, f0_2) + np.outer(f0_1, fn_2)) / math.sqrt(2.0)
    return PureGridState.from_raw(grid1, grid2, amp)


def gaussian_wavefunction(grid: Grid1D, var_x: float) -> SampledFunction1D:
    """Real Gaussian mode wavefunction with position variance ``var_x``."""
    if var_x <= 0:
        raise ValueError("variance must be positive")
    x = grid.points()
    psi = (2.0 * math.pi * var_x) ** -0.25 * np.exp(-x * x / (4.0 * var_x))
    nrm = math.sqrt(integrate(SampledFunction1D(grid, psi * psi)))
    return SampledFunction1D(grid, psi / nrm)


def build_gaussian_product(params: GaussianProductParams, grid: Grid1D) -> PureGridState:
    """Pure Gaussian product state (vacuum / squeezed vacua) on the grid."""
    if not params.pure:
        raise ValueError("only pure Gaussian products have a wavefunction; "
                         "mixed ones are handled at the density level")
    return PureGridState.product(gaussian_wavefunction(grid, params.var_x1),
                                 gaussian_wavefunction(grid, params.var_x2))


def coherent_wavefunction(nu: complex, grid: Grid1D) -> SampledFunction1D:
    """Coherent state <x|nu> with the fixed phase convention

    <x|nu> = pi^{-1/4} exp(-(x - sqrt(2) Re nu)^2 / 2
                           + i sqrt(2) Im nu x - i Re nu Im nu).
    """
    x = grid.points()
    mr, mi = nu.real, nu.imag
    psi = (np.pi ** -0.25
           * np.exp(-0.5 * (x - math.sqrt(2.0) * mr) ** 2
                    + 1j * math.sqrt(2.0) * mi * x - 1j * mr * mi))
    return SampledFunction1D(grid, psi)


def joint_density_pure(state: PureGridState, angles: QuadratureAngles) -> JointDensity2D:
    """Joint distribution of (r1(theta1), r2(theta2)) for a pure state.

    Applies the fractional Fourier transform mode by mode and squares; at
    theta = 0 this is |Psi|^2 and at theta = pi/2 the momentum joint density.
    """
    amp = state.amplitudes
    amp = frft_values(amp, state.grid1, angles.theta1, axis=0)
    amp = frft_values(amp, state.grid2, angles.theta2, axis=1)
    return JointDensity2D.from_raw(state.grid1, state.grid2, np.abs(amp) ** 2)


# ---------------------------------------------------------------------------
# dephased cat states (mixed; handled analytically term by term)
# ---------------------------------------------------------------------------

def cat_mode_components(nu: complex, grid: Grid1D):
    """Single-mode pieces of the cat density in a rotated quadrature basis.

    For coherent amplitude mu = nu e^{-i theta} the joint cat density in that
    basis is N [ g+(q1) g+(q2) + g-(q1) g-(q2)
                 - (1-p) 2 Re( c(q1) c(q2) ) ]
    with g+- = |<q|+-mu>|^2 and the coherence c(q) = <q|mu><-mu|q>.
    Returns (g_plus, g_minus, c) sampled on the grid.
    """
    x = grid.points()
    mr, mi = nu.real, nu.imag
    g_plus = np.pi ** -0.5 * np.exp(-((x - math.sqrt(2.0) * mr) ** 2))
    g_minus = np.pi ** -0.5 * np.exp(-((x + math.sqrt(2.0) * mr) ** 2))
    cross = np.pi ** -0.5 * np.exp(-x * x - 2.0 * mr * mr
                                   + 2j * math.sqrt(2.0) * mi * x)
    return g_plus, g_minus, cross


def cat_joint_density(params: CatParams, conjugate_pair: str, grid1: Grid1D,
                      grid2: Grid1D | None = None, theta: float = 0.0) -> JointDensity2D:
    """Joint quadrature density of the dephased cat state.

    ``conjugate_pair`` selects the position ("position") or momentum
    ("momentum") basis; an additional rotation ``theta`` is supported exactly
    through the coherent-state rotation nu -> nu e^{-i theta} applied to every
    term (the dephasing weight depends only on |nu| and is invariant).
    """
    if conjugate_pair not in ("position", "momentum"):
        raise ValueError("conjugate_pair must be 'position' or 'momentum'")
    grid2 = grid2 or grid1
    angle = theta + (math.pi / 2.0 if conjugate_pair == "momentum" else 0.0)
    mu = params.nu * np.exp(-1j * angle)
    norm = params.normalization()
    gp1, gm1, c1 = cat_mode_components(mu, grid1)
    if grid2 == grid1:
        gp2, gm2, c2 = gp1, gm1, c1
    else:
        gp2, gm2, c2 = cat_mode_components(mu, grid2)
    vals = norm * (np.outer(gp1, gp2) + np.outer(gm1, gm2)
                   - 2.0 * (1.0 - params.p) * np.real(np.outer(c1, c2)))
    return JointDensity2D.from_raw(grid1, grid2, vals)
