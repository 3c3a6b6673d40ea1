"""Marginal distributions of joint quadrature densities.

From a pair of joint densities (one in the r basis, one in the conjugate s
basis) this module extracts the eight distributions every criterion
consumes: the subsystem marginals R1, R2, S1, S2 and the global sum /
difference marginals R+, R-, S+, S- of r1 +- r2 and s1 +- s2.  It also
provides finite-resolution binning, variances, and the 4x4 covariance
matrix feeding the second-order baselines.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .numerics import (
    Grid1D,
    SampledDensity1D,
    SampledFunction1D,
    convolve_values,
    integrate,
)
from .states import (
    CatParams,
    GaussianProductParams,
    JointDensity2D,
    PureGridState,
    QuadratureAngles,
    cat_joint_density,
    cat_mode_components,
    joint_density_pure,
)

__all__ = [
    "MarginalSet",
    "DiscreteDistribution",
    "CovarianceMatrix4",
    "global_marginals",
    "variance",
    "mean",
    "discretize",
    "covariance_from_quadratures",
    "covariance_of_pure_state",
    "covariance_of_gaussian_product",
    "covariance_of_cat",
    "cat_marginal_set",
    "gaussian_product_marginal_set",
    "marginal_set_of_pure_state",
]


@dataclass(frozen=True)
class MarginalSet:
    """The eight quadrature distributions of one state at fixed angles."""

    r1: SampledDensity1D
    r2: SampledDensity1D
    s1: SampledDensity1D
    s2: SampledDensity1D
    r_plus: SampledDensity1D
    r_minus: SampledDensity1D
    s_plus: SampledDensity1D
    s_minus: SampledDensity1D
    metadata: dict = field(default_factory=dict, compare=False)

    def pair(self, pairing: str) -> tuple[SampledDensity1D, SampledDensity1D]:
        """The (R, S) pair for a PPT pairing id 'R+S-' or 'R-S+'."""
        if pairing == "R+S-":
            return self.r_plus, self.s_minus
        if pairing == "R-S+":
            return self.r_minus, self.s_plus
        raise ValueError(f"unknown pairing {pairing!r}")

    def max_renormalization(self) -> float:
        return max(d.renormalization for d in (
            self.r1, self.r2, self.s1, self.s2,
            self.r_plus, self.r_minus, self.s_plus, self.s_minus))


@dataclass(frozen=True)
class DiscreteDistribution:
    """Binned probabilities rho_k over bins [offset + k d, offset + (k+1) d)."""

    bin_width: float
    offset: float
    probabilities: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not self.bin_width > 0:
            raise ValueError("bin_width must be positive")
        p = np.asarray(self.probabilities, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise ValueError("probabilities must be a non-empty 1D array")
        if p.min() < 0:
            raise ValueError("probabilities must be non-negative")
        total = p.sum()
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"probabilities must sum to 1 (got {total!r})")
        object.__setattr__(self, "probabilities", p)

    @classmethod
    def from_weights(cls, bin_width: float, offset: float,
                     weights: np.ndarray) -> "DiscreteDistribution":
        w = np.asarray(weights, dtype=float)
        w = np.clip(w, 0.0, None)
        total = w.sum()
        if total <= 0:
            raise ValueError("no probability mass in the bins")
        return cls(bin_width, offset, w / total)


@dataclass(frozen=True)
class CovarianceMatrix4:
    """Symmetric covariance matrix over the ordered basis (x1, p1, x2, p2)."""

    matrix: np.ndarray = field(repr=False)
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.shape != (4, 4):
            raise ValueError("covariance matrix must be 4x4")
        if not np.allclose(m, m.T, atol=1e-10 * max(1.0, float(np.abs(m).max()))):
            raise ValueError("covariance matrix must be symmetric")
        object.__setattr__(self, "matrix", 0.5 * (m + m.T))


def _antidiagonal_sums(values: np.ndarray, index_sum: np.ndarray) -> np.ndarray:
    return np.bincount(index_sum.ravel(), weights=values.ravel(),
                       minlength=values.shape[0] + values.shape[1] - 1)


def _sum_index(n1: int, n2: int) -> np.ndarray:
    return np.arange(n1)[:, None] + np.arange(n2)[None, :]


def _marginal_pair(joint: JointDensity2D) -> tuple[SampledDensity1D, ...]:
    """(q1 marginal, q2 marginal, sum marginal, difference marginal)."""
    g1, g2 = joint.grid1, joint.grid2
    if not g1.compatible_spacing(g2):
        raise ValueError("joint grids must share their spacing for +- marginals")
    h = g1.spacing
    p = joint.values
    m1 = SampledDensity1D.from_values(g1, p.sum(axis=1) * g2.spacing)
    m2 = SampledDensity1D.from_values(g2, p.sum(axis=0) * g1.spacing)
    idx = _sum_index(g1.n_points, g2.n_points)
    plus = _antidiagonal_sums(p, idx) * h
    minus = _antidiagonal_sums(p[:, ::-1], idx) * h
    m_plus = SampledDensity1D.from_values(g1.sum_grid(g2), plus)
    m_minus = SampledDensity1D.from_values(g1.difference_grid(g2), minus)
    return m1, m2, m_plus, m_minus


def global_marginals(joint_r: JointDensity2D, joint_s: JointDensity2D) -> MarginalSet:
    """All eight marginals from the r-basis and s-basis joint densities.

    R+(u) = integral dt P_r(t, u - t) and R-(u) = integral dt P_r(t, t - u),
    rendered exactly on the sum / difference lattice of the two grids; the
    subsystem marginals integrate out the partner axis.  Every output is
    renormalized, with the largest applied correction recorded in metadata.
    """
    r1, r2, r_plus, r_minus = _marginal_pair(joint_r)
    s1, s2, s_plus, s_minus = _marginal_pair(joint_s)
    ms = MarginalSet(r1, r2, s1, s2, r_plus, r_minus, s_plus, s_minus)
    ms.metadata["max_renormalization"] = ms.max_renormalization()
    return ms


def mean(d: SampledDensity1D) -> float:
    x = d.grid.points()
    return integrate(SampledFunction1D(d.grid, d.values * x))


def variance(d: SampledDensity1D) -> float:
    """Second central moment of a normalized density."""
    x = d.grid.points()
    m = integrate(SampledFunction1D(d.grid, d.values * x))
    m2 = integrate(SampledFunction1D(d.grid, d.values * x * x))
    return m2 - m * m


def _cumulative(d: SampledDensity1D) -> np.ndarray:
    """Trapezoid CDF sampled on the grid (starts at 0)."""
    v = d.values
    h = d.grid.spacing
    return np.concatenate(([0.0], np.cumsum(0.5 * (v[1:] + v[:-1]) * h)))


def discretize(d: SampledDensity1D, bin_width: float, offset: float = 0.0) -> DiscreteDistribution:
    """Bin a density into probabilities rho_k = integral over bin k.

    Bins are [offset + k d, offset + (k+1) d) and tile the full grid support;
    probabilities are renormalized to sum exactly to one.
    """
    if bin_width <= 0:
        raise ValueError("bin_width must be positive")
    if bin_width < d.grid.spacing:
        raise ValueError(
            f"bin_width {bin_width} is below the grid spacing {d.grid.spacing:.3g}; "
            "the density cannot resolve such bins")
    k_lo = math.floor((d.grid.min - offset) / bin_width)
    k_hi = math.ceil((d.grid.max - offset) / bin_width)
    edges = offset + np.arange(k_lo, k_hi + 1) * bin_width
    edges = np.clip(edges, d.grid.min, d.grid.max)
    cdf = _cumulative(d)
    probs = np.diff(np.interp(edges, d.grid.points(), cdf))
    return DiscreteDistribution.from_weights(
        bin_width, offset + k_lo * bin_width, probs)


# ---------------------------------------------------------------------------
# covariance matrices
# ---------------------------------------------------------------------------

def _joint_moments(joint: JointDensity2D) -> dict:
    h1, h2 = joint.grid1.spacing, joint.grid2.spacing
    q1 = joint.grid1.points()[:, None]
    q2 = joint.grid2.points()[None, :]
    p = joint.values
    w = h1 * h2
    total = float(p.sum()) * w
    e1 = float((p * q1).sum()) * w / total
    e2 = float((p * q2).sum()) * w / total
    v1 = float((p * q1 * q1).sum()) * w / total - e1 * e1
    v2 = float((p * q2 * q2).sum()) * w / total - e2 * e2
    c12 = float((p * q1 * q2).sum()) * w / total - e1 * e2
    return {"v1": v1, "v2": v2, "c12": c12}


def covariance_from_quadratures(joints: dict[float, JointDensity2D],
                                consistency_tol: float = 1e-3) -> CovarianceMatrix4:
    """Covariance matrix (x1, p1, x2, p2) from angle-resolved joint densities.

    ``joints`` maps the per-mode rotation angle theta (same on both modes) to
    the joint density of (r1(theta), r2(theta)); angles 0, pi/2 and pi/4 are
    required.  Second moments come from theta = 0 and pi/2; the symmetrized
    in-mode cross moments <x p + p x>/2 follow from Var r(pi/4) =
    (Var x + Var p)/2 + Cov_sym.  The two cross-mode x-p covariances cannot be
    separated by these three angles and are assigned evenly; they vanish for
    every catalog state.  A parallelogram-identity check flags inconsistent
    inputs.
    """
    try:
        m0 = _joint_moments(joints[0.0])
        mq = _joint_moments(joints[math.pi / 2])
        md = _joint_moments(joints[math.pi / 4])
    except KeyError as exc:
        raise ValueError("joints must include angles 0, pi/4 and pi/2") from exc

    cm = np.zeros((4, 4))
    cm[0, 0], cm[2, 2] = m0["v1"], m0["v2"]
    cm[1, 1], cm[3, 3] = mq["v1"], mq["v2"]
    cm[0, 2] = cm[2, 0] = m0["c12"]
    cm[1, 3] = cm[3, 1] = mq["c12"]
    cm[0, 1] = cm[1, 0] = md["v1"] - 0.5 * (m0["v1"] + mq["v1"])
    cm[2, 3] = cm[3, 2] = md["v2"] - 0.5 * (m0["v2"] + mq["v2"])
    cross = md["c12"] - 0.5 * (m0["c12"] + mq["c12"])
    cm[0, 3] = cm[3, 0] = cross
    cm[1, 2] = cm[2, 1] = cross

    # parallelogram consistency of the constituent joints
    flags = {}
    for angle, mom in ((0.0, m0), (math.pi / 2, mq)):
        _, _, d_plus, d_minus = _marginal_pair(joints[angle])
        lhs = variance(d_plus) + variance(d_minus)
        rhs = 2.0 * (mom["v1"] + mom["v2"])
        gap = abs(lhs - rhs)
        if gap > consistency_tol * max(1.0, abs(rhs)):
            flags[angle] = gap
    if flags:
        warnings.warn(f"parallelogram identity violated: {flags}", UserWarning)
    return CovarianceMatrix4(cm, metadata={"parallelogram_flags": flags})


def covariance_of_pure_state(state: PureGridState) -> CovarianceMatrix4:
    joints = {ang: joint_density_pure(state, QuadratureAngles(ang, ang))
              for ang in (0.0, math.pi / 4, math.pi / 2)}
    return covariance_from_quadratures(joints)


def covariance_of_gaussian_product(params: GaussianProductParams) -> CovarianceMatrix4:
    return CovarianceMatrix4(np.diag([params.var_x1, params.var_p1,
                                      params.var_x2, params.var_p2]))


def covariance_of_cat(params: CatParams, grid: Grid1D) -> CovarianceMatrix4:
    joints = {ang: cat_joint_density(params, "position", grid, theta=ang)
              for ang in (0.0, math.pi / 4, math.pi / 2)}
    return covariance_from_quadratures(joints)


# ---------------------------------------------------------------------------
# direct marginal-set builders
# ---------------------------------------------------------------------------

def marginal_set_of_pure_state(state: PureGridState,
                               angles: QuadratureAngles = QuadratureAngles()) -> MarginalSet:
    """Eight marginals of a pure state: r basis at the given angles, s basis
    a quarter turn further (s_j is conjugate to r_j)."""
    joint_r = joint_density_pure(state, angles)
    joint_s = joint_density_pure(state, QuadratureAngles(
        angles.theta1 + math.pi / 2, angles.theta2 + math.pi / 2))
    return global_marginals(joint_r, joint_s)


def _integral_complex(values: np.ndarray, grid: Grid1D) -> complex:
    re = integrate(SampledFunction1D(grid, np.real(values)))
    if not np.iscomplexobj(values):
        return re
    return re + 1j * integrate(SampledFunction1D(grid, np.imag(values)))


def _convolution_marginals(grid: Grid1D, term_pairs_r, term_pairs_s, weights):
    """Shared assembly for states whose joints are sums of product terms.

    ``term_pairs_*`` lists (f, g) sampled factors per term (complex allowed);
    the sum marginal of each term is f * g, the difference marginal f * g~
    with g~(y) = g(-y).  Weights multiply term contributions.
    """
    h = grid.spacing
    out = {}
    for label, pairs in (("r", term_pairs_r), ("s", term_pairs_s)):
        plus = np.zeros(2 * grid.n_points - 1, dtype=complex)
        minus = np.zeros_like(plus)
        single = np.zeros(grid.n_points, dtype=complex)
        for w, (f, g) in zip(weights, pairs):
            plus += w * convolve_values(f, g, h)
            minus += w * convolve_values(f, g[::-1], h)
            single += w * f * _integral_complex(g, grid)
        out[label] = (np.real(single), np.real(plus), np.real(minus))
    sum_grid = grid.sum_grid(grid)
    diff_grid = grid.difference_grid(grid)
    r1v, rpv, rmv = out["r"]
    s1v, spv, smv = out["s"]
    r1 = SampledDensity1D.from_values(grid, r1v)
    s1 = SampledDensity1D.from_values(grid, s1v)
    return MarginalSet(
        r1=r1, r2=r1, s1=s1, s2=s1,
        r_plus=SampledDensity1D.from_values(sum_grid, rpv),
        r_minus=SampledDensity1D.from_values(diff_grid, rmv),
        s_plus=SampledDensity1D.from_values(sum_grid, spv),
        s_minus=SampledDensity1D.from_values(diff_grid, smv),
    )


def cat_marginal_set(params: CatParams, grid: Grid1D, theta: float = 0.0) -> MarginalSet:
    """Marginal set of the dephased cat, assembled term by term.

    Every joint of the cat is a sum of three product terms (two displaced
    Gaussians and one coherence term), so each global marginal is a sum of
    three 1D convolutions; this reproduces `global_marginals` of the gridded
    joints exactly while staying one-dimensional.  The s basis uses the
    coherent rotation nu -> -i nu.
    """
    norm = params.normalization()
    weights = (norm, norm, -2.0 * (1.0 - params.p) * norm)
    pairs = {}
    for label, extra in (("r", 0.0), ("s", math.pi / 2)):
        mu = params.nu * np.exp(-1j * (theta + extra))
        gp, gm, cross = cat_mode_components(mu, grid)
        pairs[label] = [(gp, gp), (gm, gm), (cross, cross)]
    ms = _convolution_marginals(grid, pairs["r"], pairs["s"], weights)
    ms.metadata["state"] = f"cat(nu={params.nu}, p={params.p}, theta={theta})"
    return ms


def gaussian_product_marginal_set(params: GaussianProductParams,
                                  grid: Grid1D) -> MarginalSet:
    """Marginal set of a (possibly mixed) Gaussian product state.

    Subsystem marginals are centered Gaussians with the stated variances and
    the global +- marginals are their convolutions; valid for vacuum,
    squeezed and thermal products alike since all are fully characterized by
    their quadrature variances here.
    """
    x = grid.points()

    def gauss(v):
        return np.exp(-x * x / (2.0 * v)) / math.sqrt(2.0 * math.pi * v)

    r_terms = [(gauss(params.var_x1), gauss(params.var_x2))]
    s_terms = [(gauss(params.var_p1), gauss(params.var_p2))]
    ms = _convolution_marginals(grid, r_terms, s_terms, (1.0,))
    # distinct modes: overwrite the duplicated subsystem marginals
    ms = MarginalSet(
        r1=SampledDensity1D.from_values(grid, gauss(params.var_x1)),
        r2=SampledDensity1D.from_values(grid, gauss(params.var_x2)),
        s1=SampledDensity1D.from_values(grid, gauss(params.var_p1)),
        s2=SampledDensity1D.from_values(grid, gauss(params.var_p2)),
        r_plus=ms.r_plus, r_minus=ms.r_minus,
        s_plus=ms.s_plus, s_minus=ms.s_minus,
    )
    ms.metadata["state"] = "gaussian-product"
    return ms
