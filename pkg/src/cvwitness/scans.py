"""Parameter sweeps, detection-boundary search, and sample ingestion.

Scans evaluate criteria over 2D parameter grids and return `RegionMap`
objects that serialize to CSV (one row per cell, row-major) and JSON
(same content nested by criterion).  Cells are independent; with
``workers > 1`` rows are distributed over a process pool and re-emitted in
fixed order, so repeated scans with identical configuration produce
byte-identical output.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .marginals import DiscreteDistribution, MarginalSet, cat_marginal_set, variance
from .numerics import Grid1D, SampledDensity1D
from .states import CatParams, HermiteGaussParams, NoonParams, build_hermite_gauss
from .witnesses import (
    DETECTION_TOL,
    EvalConfig,
    StrongRenyiExponents,
    covariance_for,
    hermite_gauss_thresholds,
    marginal_set_for,
    renyi_strong,
    renyi_weak,
    shannon_weak,
    simon_ppt,
)

__all__ = [
    "ScanConfig",
    "RegionMap",
    "SampleTable",
    "IngestResult",
    "scan_hermite_gauss",
    "scan_noon",
    "scan_cat",
    "find_boundary",
    "hermite_gauss_weak_margin",
    "hermite_gauss_simon_margin",
    "ingest_samples",
    "load_sample_table",
    "sample_from_density",
]

#: Histogram use below this many samples earns a warning on the verdicts.
MIN_SAMPLE_COUNT = 1000


@dataclass(frozen=True)
class ScanConfig:
    """Numerical settings shared by all scans."""

    grid_points: int = 729
    direct_spacing: float = 0.02
    tolerance: float = DETECTION_TOL
    workers: int = 1

    def eval_config(self) -> EvalConfig:
        return EvalConfig(grid_points=self.grid_points,
                          direct_spacing=self.direct_spacing,
                          tolerance=self.tolerance)


@dataclass
class RegionMap:
    """Per-cell criterion results over a 2D parameter grid (row-major)."""

    axis1_name: str
    axis1: np.ndarray
    axis2_name: str
    axis2: np.ndarray
    criteria: list[str]
    cells: list[dict]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.axis1 = np.asarray(self.axis1, dtype=float)
        self.axis2 = np.asarray(self.axis2, dtype=float)
        if np.any(np.diff(self.axis1) <= 0) or np.any(np.diff(self.axis2) <= 0):
            raise ValueError("axis grids must be strictly increasing")
        expected = self.axis1.size * self.axis2.size
        if len(self.cells) != expected:
            raise ValueError(f"expected {expected} cells, got {len(self.cells)}")

    def cell(self, i: int, j: int) -> dict:
        return self.cells[i * self.axis2.size + j]

    def detection_grid(self, criterion: str) -> np.ndarray:
        flags = [bool(c[criterion]["detected"]) for c in self.cells]
        return np.array(flags).reshape(self.axis1.size, self.axis2.size)

    def to_csv(self, path) -> None:
        lines = []
        header = [self.axis1_name, self.axis2_name]
        for crit in self.criteria:
            header += [f"{crit}:margin", f"{crit}:detected", f"{crit}:status"]
        lines.append(",".join(header))
        k = 0
        for a1 in self.axis1:
            for a2 in self.axis2:
                row = [repr(float(a1)), repr(float(a2))]
                cell = self.cells[k]
                k += 1
                for crit in self.criteria:
                    rec = cell[crit]
                    margin = rec.get("margin")
                    row.append("" if margin is None else repr(float(margin)))
                    row.append(str(int(bool(rec["detected"]))))
                    row.append(rec.get("status", "ok"))
                lines.append(",".join(row))
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("\n".join(lines) + "\n")

    def to_json(self, path) -> None:
        by_criterion = {}
        for crit in self.criteria:
            by_criterion[crit] = [
                {"margin": c[crit].get("margin"),
                 "detected": bool(c[crit]["detected"]),
                 "status": c[crit].get("status", "ok")}
                for c in self.cells]
        payload = {
            "axes": {self.axis1_name: self.axis1.tolist(),
                     self.axis2_name: self.axis2.tolist()},
            "order": "row-major",
            "criteria": by_criterion,
            "metadata": self.metadata,
        }
        with open(path, "w", encoding="utf-8", newline="") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _map_rows(fn, args_list, workers: int):
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, args_list))
    return [fn(a) for a in args_list]


# ---------------------------------------------------------------------------
# Hermite-Gauss scan
# ---------------------------------------------------------------------------

def _hg_row(args) -> list[dict]:
    ratio, alphas, cfg = args
    records: list[dict] = []
    try:
        state = HermiteGaussParams(1.0, ratio)
        ms = marginal_set_for(state, cfg.eval_config())
        simon = simon_ppt(covariance_for(state, cfg.eval_config()), cfg.tolerance)
        simon_rec = {"margin": simon.margin, "detected": simon.detected, "status": "ok"}
    except Exception as exc:  # noqa: BLE001 - per-cell failures recorded
        err = {"margin": None, "detected": False, "status": f"error: {exc}"}
        return [{"renyi-weak": dict(err), "renyi-analytic": dict(err),
                 "simon-ppt": dict(err)} for _ in alphas]
    for alpha in alphas:
        cell = {"simon-ppt": simon_rec}
        try:
            verdicts = renyi_weak(ms, alpha, cfg.tolerance)
            cell["renyi-weak"] = {
                "margin": min(v.margin for v in verdicts),
                "detected": any(v.detected for v in verdicts),
                "status": "ok"}
            lower, upper = hermite_gauss_thresholds(alpha)
            analytic_margin = min(ratio - lower, upper - ratio)
            cell["renyi-analytic"] = {
                "margin": analytic_margin,
                "detected": analytic_margin < 0.0,
                "status": "ok"}
        except Exception as exc:  # noqa: BLE001
            err = {"margin": None, "detected": False, "status": f"error: {exc}"}
            cell.setdefault("renyi-weak", dict(err))
            cell.setdefault("renyi-analytic", dict(err))
        records.append(cell)
    return records


def scan_hermite_gauss(alpha_grid, ratio_grid,
                       config: ScanConfig = ScanConfig()) -> RegionMap:
    """Detection regions of the Hermite-Gauss family over (ratio, alpha).

    Each cell records the numeric uncertainty-backed Renyi verdict, the
    closed-form threshold verdict, and the second-order PPT baseline; the
    marginals are built once per ratio (margins are scale invariant, so
    sigma_+ = 1 throughout).
    """
    alphas = [float(a) for a in alpha_grid]
    ratios = [float(r) for r in ratio_grid]
    rows = _map_rows(_hg_row, [(r, tuple(alphas), config) for r in ratios],
                     config.workers)
    cells = [cell for row in rows for cell in row]
    return RegionMap(
        axis1_name="ratio", axis1=np.array(ratios),
        axis2_name="alpha", axis2=np.array(alphas),
        criteria=["renyi-weak", "renyi-analytic", "simon-ppt"],
        cells=cells,
        metadata={"grid_points": config.grid_points, "tolerance": config.tolerance})


# ---------------------------------------------------------------------------
# NOON scan
# ---------------------------------------------------------------------------

def _noon_surface(args) -> list[dict]:
    n, alpha1s, alpha2s, cfg = args
    ms = marginal_set_for(NoonParams(n), cfg.eval_config())
    cells = []
    for a1 in alpha1s:
        for a2 in alpha2s:
            if 1.0 / a1 + 1.0 / a2 < 1.0 - 1e-12:
                cells.append({"renyi-strong": {
                    "margin": None, "detected": False, "status": "fpr"}})
                continue
            try:
                verdicts = renyi_strong(
                    ms, StrongRenyiExponents.from_alphas(a1, a2), True,
                    cfg.tolerance)
                cells.append({"renyi-strong": {
                    "margin": min(v.margin for v in verdicts),
                    "detected": any(v.detected for v in verdicts),
                    "status": "ok"}})
            except Exception as exc:  # noqa: BLE001
                cells.append({"renyi-strong": {
                    "margin": None, "detected": False, "status": f"error: {exc}"}})
    return cells


def scan_noon(n_list, alpha1_grid, alpha2_grid,
              config: ScanConfig = ScanConfig()) -> dict[int, RegionMap]:
    """Detection surface of the additivity-based Renyi criterion per NOON N.

    Exponent cells with 1/alpha1 + 1/alpha2 < 1 leave the allowed domain of
    the combined exponent and are labeled 'fpr' (forbidden parameter
    region), distinct from evaluation errors.  Both PPT pairings are
    scanned; detection reports their union.
    """
    alpha1s = [float(a) for a in alpha1_grid]
    alpha2s = [float(a) for a in alpha2_grid]
    ns = [int(n) for n in n_list]
    surfaces = _map_rows(_noon_surface,
                         [(n, tuple(alpha1s), tuple(alpha2s), config) for n in ns],
                         config.workers)
    out = {}
    for n, cells in zip(ns, surfaces):
        out[n] = RegionMap(
            axis1_name="alpha1", axis1=np.array(alpha1s),
            axis2_name="alpha2", axis2=np.array(alpha2s),
            criteria=["renyi-strong"], cells=cells,
            metadata={"n_photons": n, "grid_points": config.grid_points,
                      "tolerance": config.tolerance})
    return out


# ---------------------------------------------------------------------------
# cat scan
# ---------------------------------------------------------------------------

def _cat_row(args) -> list[dict]:
    nu, ps, alphas, cfg = args
    cells = []
    for p in ps:
        cell = {}
        try:
            ms = marginal_set_for(CatParams(nu, p), cfg.eval_config())
        except Exception as exc:  # noqa: BLE001
            err = {"margin": None, "detected": False, "status": f"error: {exc}"}
            cell["shannon-weak"] = dict(err)
            for alpha in alphas:
                cell[f"renyi-weak[{alpha:g}]"] = dict(err)
            cells.append(cell)
            continue
        sw = shannon_weak(ms, cfg.tolerance)
        cell["shannon-weak"] = {"margin": min(v.margin for v in sw),
                                "detected": any(v.detected for v in sw),
                                "status": "ok"}
        for alpha in alphas:
            try:
                rw = renyi_weak(ms, alpha, cfg.tolerance)
                cell[f"renyi-weak[{alpha:g}]"] = {
                    "margin": min(v.margin for v in rw),
                    "detected": any(v.detected for v in rw),
                    "status": "ok"}
            except Exception as exc:  # noqa: BLE001
                cell[f"renyi-weak[{alpha:g}]"] = {
                    "margin": None, "detected": False, "status": f"error: {exc}"}
        cells.append(cell)
    return cells


def scan_cat(nu_grid, p_grid, alpha_list,
             config: ScanConfig = ScanConfig()) -> RegionMap:
    """Shannon and Renyi detection regions of the dephased cat over (nu, p).

    Real nu only (the reproduction scans use a real amplitude axis); each
    cell records the Shannon verdict and one Renyi verdict per requested
    alpha, each minimized over the four pairing/assignment combinations.
    """
    nus = [float(v) for v in nu_grid]
    ps = [float(p) for p in p_grid]
    alphas = [float(a) for a in alpha_list]
    rows = _map_rows(_cat_row, [(nu, tuple(ps), tuple(alphas), config) for nu in nus],
                     config.workers)
    criteria = ["shannon-weak"] + [f"renyi-weak[{a:g}]" for a in alphas]
    return RegionMap(
        axis1_name="nu", axis1=np.array(nus),
        axis2_name="p", axis2=np.array(ps),
        criteria=criteria,
        cells=[cell for row in rows for cell in row],
        metadata={"direct_spacing": config.direct_spacing,
                  "tolerance": config.tolerance})


# ---------------------------------------------------------------------------
# boundary search
# ---------------------------------------------------------------------------

def find_boundary(margin_fn, lo: float, hi: float, xtol: float = 1e-4,
                  max_iter: int = 200) -> float | None:
    """Bisect a margin's sign change on [lo, hi] to |interval| < xtol.

    Returns the crossing location, or None when the margin has the same sign
    at both ends (explicit no-boundary result).
    """
    if not hi > lo:
        raise ValueError("need hi > lo")
    f_lo = margin_fn(lo)
    f_hi = margin_fn(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if (f_lo > 0) == (f_hi > 0):
        return None
    for _ in range(max_iter):
        if hi - lo < xtol:
            break
        mid = 0.5 * (lo + hi)
        f_mid = margin_fn(mid)
        if f_mid == 0.0:
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def hermite_gauss_weak_margin(alpha: float, side: str,
                              config: ScanConfig = ScanConfig()):
    """Margin of the Renyi criterion combination whose zero is the
    closed-form threshold: the lower boundary tracks the (R-, S+) pairing
    with alpha on S, the upper the (R+, S-) pairing with alpha on R.

    Returns a callable ratio -> margin for `find_boundary`.
    """
    if side not in ("lower", "upper"):
        raise ValueError("side must be 'lower' or 'upper'")
    pairing, alpha_on = ("R-S+", "S") if side == "lower" else ("R+S-", "R")

    def margin(ratio: float) -> float:
        ms = marginal_set_for(HermiteGaussParams(1.0, ratio), config.eval_config())
        verdicts = renyi_weak(ms, alpha, config.tolerance)
        for v in verdicts:
            if v.pairing == pairing and v.exponents["alpha_on"] == alpha_on:
                return v.margin
        raise RuntimeError("combination not found")

    return margin


def hermite_gauss_simon_margin(config: ScanConfig = ScanConfig()):
    """ratio -> (smallest PT symplectic eigenvalue - 1/2) for the family."""

    def margin(ratio: float) -> float:
        cm = covariance_for(HermiteGaussParams(1.0, ratio), config.eval_config())
        return simon_ppt(cm, config.tolerance).margin

    return margin


# ---------------------------------------------------------------------------
# sample ingestion
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SampleTable:
    """Joint measurement records: one (q1, q2) pair per row."""

    data: np.ndarray
    labels: tuple = ("q1", "q2")

    def __post_init__(self):
        d = np.asarray(self.data, dtype=float)
        if d.ndim != 2 or d.shape[1] != 2:
            raise ValueError("sample table must have shape (count, 2)")
        if d.shape[0] == 0:
            raise ValueError("sample table is empty")
        if not np.all(np.isfinite(d)):
            raise ValueError("sample table contains non-finite entries")
        object.__setattr__(self, "data", d)

    @property
    def count(self) -> int:
        return int(self.data.shape[0])


def load_sample_table(path) -> SampleTable:
    """Parse a delimited sample file: header row 'q1,q2', one float pair per
    line.  Malformed rows are reported with their line numbers."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline()
        labels = tuple(s.strip() for s in header.strip().split(","))
        if len(labels) != 2:
            raise ValueError(f"{path}: line 1: expected two column labels, "
                             f"got {header.strip()!r}")
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise ValueError(f"{path}: line {lineno}: expected two values, "
                                 f"got {line!r}")
            try:
                rows.append((float(parts[0]), float(parts[1])))
            except ValueError:
                raise ValueError(
                    f"{path}: line {lineno}: non-numeric entry in {line!r}") from None
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return SampleTable(np.array(rows), labels)


@dataclass(frozen=True)
class IngestResult:
    r_plus: DiscreteDistribution
    r_minus: DiscreteDistribution
    s_plus: DiscreteDistribution
    s_minus: DiscreteDistribution
    r_count: int = 0
    s_count: int = 0
    warnings: tuple = ()

    def pair(self, pairing: str):
        if pairing == "R+S-":
            return self.r_plus, self.s_minus
        if pairing == "R-S+":
            return self.r_minus, self.s_plus
        raise ValueError(f"unknown pairing {pairing!r}")

    def margin_noise(self, pairing: str) -> float:
        """Delta-method standard error of the plug-in entropy sum.

        Histogram entropies fluctuate at the sqrt(Var[ln p]/N) scale, far
        above the default detection tolerance for any realistic sample
        count, so sampled-data verdicts should use a tolerance of a few
        times this value to keep saturating separable states inconclusive.
        """
        d_r, d_s = self.pair(pairing)

        def var_ln(dist):
            p = dist.probabilities[dist.probabilities > 0]
            log_p = np.log(p)
            return float((p * log_p * log_p).sum() - ((p * log_p).sum()) ** 2)

        return math.sqrt(var_ln(d_r) / self.r_count + var_ln(d_s) / self.s_count)


def _histogram(values: np.ndarray, width: float, offset: float) -> DiscreteDistribution:
    k = np.floor((values - offset) / width).astype(int)
    k_min = int(k.min())
    counts = np.bincount(k - k_min)
    return DiscreteDistribution.from_weights(width, offset + k_min * width, counts)


def ingest_samples(r_table: SampleTable, s_table: SampleTable,
                   delta: float, cap_delta: float,
                   offset: float = 0.0) -> IngestResult:
    """Histogram the global sum/difference variables of joint samples.

    Computes r_+- = r1 +- r2 per row of ``r_table`` (and s_+- likewise) and
    bins them with widths delta and Delta on bins [offset + k w,
    offset + (k+1) w).  Small tables are accepted but flagged so downstream
    verdicts can carry the warning.
    """
    if delta <= 0 or cap_delta <= 0:
        raise ValueError("resolutions must be positive")
    warnings_: list[str] = []
    for name, table in (("r", r_table), ("s", s_table)):
        if table.count < MIN_SAMPLE_COUNT:
            warnings_.append(
                f"{name} table has {table.count} samples "
                f"(< {MIN_SAMPLE_COUNT}); histogram entropies will be noisy")
    r1, r2 = r_table.data[:, 0], r_table.data[:, 1]
    s1, s2 = s_table.data[:, 0], s_table.data[:, 1]
    return IngestResult(
        r_plus=_histogram(r1 + r2, delta, offset),
        r_minus=_histogram(r1 - r2, delta, offset),
        s_plus=_histogram(s1 + s2, cap_delta, offset),
        s_minus=_histogram(s1 - s2, cap_delta, offset),
        r_count=r_table.count,
        s_count=s_table.count,
        warnings=tuple(warnings_))


def sample_from_density(d: SampledDensity1D, count: int,
                        rng: np.random.Generator) -> np.ndarray:
    """Inverse-CDF samples from a gridded density (deterministic given rng)."""
    if count < 1:
        raise ValueError("count must be positive")
    v = d.values
    h = d.grid.spacing
    cdf = np.concatenate(([0.0], np.cumsum(0.5 * (v[1:] + v[:-1]) * h)))
    cdf /= cdf[-1]
    u = rng.uniform(0.0, 1.0, size=count)
    return np.interp(u, cdf, d.grid.points())
