"""Command-line interface: criterion evaluation, region scans, ingestion.

Every run resolves its configuration (defaults, then config file, then
environment, then flags), writes the fully resolved configuration as an
INI file next to the results, and can be re-run bit-identically from that
file.  Exit codes: 0 success (regardless of detection outcome), 2 for
configuration or input-file errors, 3 for numeric failures.
"""

from __future__ import annotations

import argparse
import configparser
import dataclasses
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from .states import (
    CatParams,
    GaussianProductParams,
    HermiteGaussParams,
    NoonParams,
    QuadratureAngles,
)
from .witnesses import (
    ALL_CRITERIA,
    DEFAULT_ALPHAS,
    DETECTION_TOL,
    EvalConfig,
    conjugate_beta,
    evaluate_all,
    renyi_weak_discrete,
    tsallis_witness,
)
from .scans import (
    ScanConfig,
    ingest_samples,
    load_sample_table,
    scan_cat,
    scan_hermite_gauss,
    scan_noon,
)

__all__ = ["main", "RunConfig"]

ENV_OUTPUT_DIR = "CVWITNESS_OUTPUT_DIR"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


@dataclass
class RunConfig:
    """Flat, fully serializable run description."""

    # run
    command: str = ""
    seed: int = 12345
    workers: int = 1
    tolerance: float = DETECTION_TOL
    grid_points: int = 0
    direct_spacing: float = 0.01
    output_dir: str = "."
    figure: bool = True
    # state
    family: str = ""
    sigma_plus: float = 1.0
    sigma_minus: float = 1.0
    n_photons: int = 1
    nu_real: float = 1.0
    nu_imag: float = 0.0
    p: float = 0.0
    r1: float = 0.0
    r2: float = 0.0
    nbar1: float = 0.0
    nbar2: float = 0.0
    theta1: float = 0.0
    theta2: float = 0.0
    # criteria
    criteria: tuple = ()
    alphas: tuple = DEFAULT_ALPHAS
    alpha1: float = 2.0
    alpha2: float = 2.0
    delta: float = 0.0
    cap_delta: float = 0.0
    # scan
    scan_kind: str = ""
    alpha_min: float = 0.501
    alpha_max: float = 4.0
    alpha_steps: int = 9
    ratio_min: float = 0.4
    ratio_max: float = 2.5
    ratio_steps: int = 22
    nu_min: float = 0.06
    nu_max: float = 3.0
    nu_steps: int = 50
    p_min: float = 0.0
    p_max: float = 1.0
    p_steps: int = 50
    n_list: tuple = (1, 2, 3, 4, 5, 6)
    alpha1_min: float = 1.05
    alpha1_max: float = 4.0
    alpha1_steps: int = 30
    alpha2_min: float = 1.05
    alpha2_max: float = 4.0
    alpha2_steps: int = 30
    scan_grid_points: int = 729
    scan_spacing: float = 0.02
    # ingest
    r_file: str = ""
    s_file: str = ""

    _SECTIONS = {
        "run": ("command", "seed", "workers", "tolerance", "grid_points",
                "direct_spacing", "output_dir", "figure"),
        "state": ("family", "sigma_plus", "sigma_minus", "n_photons",
                  "nu_real", "nu_imag", "p", "r1", "r2", "nbar1", "nbar2",
                  "theta1", "theta2"),
        "criteria": ("criteria", "alphas", "alpha1", "alpha2", "delta",
                     "cap_delta"),
        "scan": ("scan_kind", "alpha_min", "alpha_max", "alpha_steps",
                 "ratio_min", "ratio_max", "ratio_steps", "nu_min", "nu_max",
                 "nu_steps", "p_min", "p_max", "p_steps", "n_list",
                 "alpha1_min", "alpha1_max", "alpha1_steps", "alpha2_min",
                 "alpha2_max", "alpha2_steps", "scan_grid_points",
                 "scan_spacing"),
        "ingest": ("r_file", "s_file"),
    }

    def _encode(self, value) -> str:
        if isinstance(value, bool):
            return "true" if value else "false"
        if isinstance(value, float):
            return repr(value)
        if isinstance(value, tuple):
            return ",".join(self._encode(v) for v in value)
        return str(value)

    def to_ini(self, path) -> None:
        parser = configparser.ConfigParser()
        for section, names in self._SECTIONS.items():
            parser[section] = {n: self._encode(getattr(self, n)) for n in names}
        with open(path, "w", encoding="utf-8", newline="") as fh:
            parser.write(fh)

    @classmethod
    def from_ini(cls, path) -> "RunConfig":
        parser = configparser.ConfigParser()
        if not parser.read(path, encoding="utf-8"):
            raise ValueError(f"cannot read config file {path}")
        defaults = cls()
        kwargs = {}
        for section, names in cls._SECTIONS.items():
            if section not in parser:
                continue
            for name in names:
                if name not in parser[section]:
                    continue
                raw = parser[section][name]
                kwargs[name] = _decode_field(name, raw, getattr(defaults, name))
        return cls(**kwargs)


def _decode_field(name: str, raw: str, default):
    raw = raw.strip()
    if isinstance(default, bool):
        if raw.lower() not in ("true", "false"):
            raise ValueError(f"config field {name}: expected true/false, got {raw!r}")
        return raw.lower() == "true"
    if isinstance(default, int):
        return int(raw)
    if isinstance(default, float):
        return float(raw)
    if isinstance(default, tuple):
        if not raw:
            return ()
        parts = [s.strip() for s in raw.split(",")]
        if name in ("criteria",):
            return tuple(parts)
        if name == "n_list":
            return tuple(int(s) for s in parts)
        return tuple(float(s) for s in parts)
    return raw


def _parse_n_list(text: str) -> tuple:
    """'1..6' | '3' | '1,2,5' -> tuple of ints."""
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", maxsplit=1)
        return tuple(range(int(lo), int(hi) + 1))
    return tuple(int(s) for s in text.split(","))


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cvwitness",
        description="Entropic entanglement criteria for two-mode "
                    "continuous-variable states.")
    sub = parser.add_subparsers(dest="command")

    def common(p):
        p.add_argument("--config", help="INI file with a previously resolved run")
        p.add_argument("--output-dir", dest="output_dir")
        p.add_argument("--tolerance", type=float)
        p.add_argument("--grid-points", dest="grid_points", type=int)
        p.add_argument("--workers", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--no-figure", dest="no_figure", action="store_true")

    p_eval = sub.add_parser("eval", help="evaluate criteria on one state")
    common(p_eval)
    p_eval.add_argument("--state", dest="family",
                        choices=["vacuum", "squeezed", "thermal",
                                 "hermite-gauss", "noon", "cat"])
    p_eval.add_argument("--sigma-plus", dest="sigma_plus", type=float)
    p_eval.add_argument("--sigma-minus", dest="sigma_minus", type=float)
    p_eval.add_argument("--n", dest="n_photons", type=int)
    p_eval.add_argument("--nu", dest="nu_real", type=float)
    p_eval.add_argument("--nu-imag", dest="nu_imag", type=float)
    p_eval.add_argument("--p", dest="p", type=float)
    p_eval.add_argument("--r1", type=float)
    p_eval.add_argument("--r2", type=float)
    p_eval.add_argument("--nbar1", type=float)
    p_eval.add_argument("--nbar2", type=float)
    p_eval.add_argument("--theta1", type=float)
    p_eval.add_argument("--theta2", type=float)
    p_eval.add_argument("--criterion", dest="criteria", action="append")
    p_eval.add_argument("--all-criteria", dest="all_criteria", action="store_true")
    p_eval.add_argument("--alpha", dest="alphas", action="append", type=float)
    p_eval.add_argument("--alpha1", type=float)
    p_eval.add_argument("--alpha2", type=float)
    p_eval.add_argument("--delta", type=float)
    p_eval.add_argument("--Delta", dest="cap_delta", type=float)

    p_scan = sub.add_parser("scan", help="sweep a state family")
    common(p_scan)
    p_scan.add_argument("scan_kind", nargs="?",
                        choices=["hermite-gauss", "noon", "cat"])
    p_scan.add_argument("--alpha", dest="alphas", action="append", type=float)
    p_scan.add_argument("--alpha-min", dest="alpha_min", type=float)
    p_scan.add_argument("--alpha-max", dest="alpha_max", type=float)
    p_scan.add_argument("--alpha-steps", dest="alpha_steps", type=int)
    p_scan.add_argument("--ratio-min", dest="ratio_min", type=float)
    p_scan.add_argument("--ratio-max", dest="ratio_max", type=float)
    p_scan.add_argument("--ratio-steps", dest="ratio_steps", type=int)
    p_scan.add_argument("--nu-min", dest="nu_min", type=float)
    p_scan.add_argument("--nu-max", dest="nu_max", type=float)
    p_scan.add_argument("--nu-steps", dest="nu_steps", type=int)
    p_scan.add_argument("--p-min", dest="p_min", type=float)
    p_scan.add_argument("--p-max", dest="p_max", type=float)
    p_scan.add_argument("--p-steps", dest="p_steps", type=int)
    p_scan.add_argument("--n", dest="n_list", type=_parse_n_list)
    p_scan.add_argument("--alpha1-min", dest="alpha1_min", type=float)
    p_scan.add_argument("--alpha1-max", dest="alpha1_max", type=float)
    p_scan.add_argument("--alpha1-steps", dest="alpha1_steps", type=int)
    p_scan.add_argument("--alpha2-min", dest="alpha2_min", type=float)
    p_scan.add_argument("--alpha2-max", dest="alpha2_max", type=float)
    p_scan.add_argument("--alpha2-steps", dest="alpha2_steps", type=int)
    p_scan.add_argument("--scan-grid-points", dest="scan_grid_points", type=int)
    p_scan.add_argument("--scan-spacing", dest="scan_spacing", type=float)

    p_ing = sub.add_parser("ingest", help="discrete criteria on sample files")
    common(p_ing)
    p_ing.add_argument("--r-file", dest="r_file")
    p_ing.add_argument("--s-file", dest="s_file")
    p_ing.add_argument("--delta", type=float)
    p_ing.add_argument("--Delta", dest="cap_delta", type=float)
    p_ing.add_argument("--alpha", dest="alphas", action="append", type=float)
    p_ing.add_argument("--tsallis", dest="with_tsallis", action="store_true")

    return parser


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig.from_ini(args.config) if getattr(args, "config", None) else RunConfig()
    env_dir = os.environ.get(ENV_OUTPUT_DIR)
    if env_dir and args.output_dir is None:
        cfg.output_dir = env_dir
    overrides = {}
    for f in dataclasses.fields(RunConfig):
        if not hasattr(args, f.name):
            continue
        value = getattr(args, f.name)
        if value is None:
            continue
        if f.name in ("criteria", "alphas", "n_list") and not isinstance(value, tuple):
            value = tuple(value)
        overrides[f.name] = value
    for name, value in overrides.items():
        setattr(cfg, name, value)
    if getattr(args, "no_figure", False):
        cfg.figure = False
    if getattr(args, "all_criteria", False):
        cfg.criteria = ALL_CRITERIA
    if args.command:
        cfg.command = args.command
    return cfg


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float):
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        if math.isnan(obj):
            return "nan"
        return obj
    if isinstance(obj, (np.floating, np.integer)):
        return _jsonable(float(obj))
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _verdicts_payload(verdicts):
    return [_jsonable({
        "criterion": v.criterion,
        "pairing": v.pairing,
        "exponents": v.exponents,
        "lhs": v.lhs,
        "rhs": v.rhs,
        "margin": v.margin,
        "detected": v.detected,
        "metadata": v.metadata,
    }) for v in verdicts]


def _summarize(verdicts, failures, stream=None) -> None:
    stream = stream or sys.stdout
    by_crit: dict[str, list] = {}
    for v in verdicts:
        by_crit.setdefault(v.criterion, []).append(v)
    for crit in sorted(by_crit):
        group = by_crit[crit]
        margin = min(v.margin for v in group)
        detected = any(v.detected for v in group)
        print(f"{crit}: margin={margin:+.6f} detected={'yes' if detected else 'no'} "
              f"({len(group)} verdicts)", file=stream)
    for crit, message in failures:
        print(f"{crit}: error: {message}", file=sys.stderr)


def _state_from_config(cfg: RunConfig):
    family = cfg.family
    if family == "vacuum":
        return GaussianProductParams.vacuum()
    if family == "squeezed":
        return GaussianProductParams.squeezed(cfg.r1, cfg.r2)
    if family == "thermal":
        return GaussianProductParams.thermal(cfg.nbar1, cfg.nbar2)
    if family == "hermite-gauss":
        return HermiteGaussParams(cfg.sigma_plus, cfg.sigma_minus)
    if family == "noon":
        return NoonParams(cfg.n_photons)
    if family == "cat":
        return CatParams(complex(cfg.nu_real, cfg.nu_imag), cfg.p)
    raise ValueError(f"--state is required (got {family!r})")


def _eval_config(cfg: RunConfig) -> EvalConfig:
    resolutions = ()
    if cfg.delta > 0:
        resolutions = ((cfg.delta, cfg.cap_delta or cfg.delta),)
    criteria = cfg.criteria or tuple(
        c for c in ALL_CRITERIA if c not in ("renyi-weak-discrete", "tsallis"))
    return EvalConfig(
        criteria=criteria,
        alphas=cfg.alphas,
        strong_alphas=((cfg.alpha1, cfg.alpha2),),
        resolutions=resolutions,
        angles=QuadratureAngles(cfg.theta1, cfg.theta2),
        grid_points=cfg.grid_points,
        direct_spacing=cfg.direct_spacing,
        tolerance=cfg.tolerance)


def _cmd_eval(cfg: RunConfig) -> int:
    state = _state_from_config(cfg)
    report = evaluate_all(state, _eval_config(cfg))
    out_dir = cfg.output_dir
    os.makedirs(out_dir, exist_ok=True)
    payload = {
        "state": report.state,
        "verdicts": _verdicts_payload(report.verdicts),
        "failures": [{"criterion": c, "message": m} for c, m in report.failures],
    }
    with open(os.path.join(out_dir, "eval_report.json"), "w",
              encoding="utf-8", newline="") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    cfg.to_ini(os.path.join(out_dir, "eval_config.ini"))
    print(f"state: {report.state}")
    _summarize(report.verdicts, report.failures)
    return EXIT_OK


def _scan_config(cfg: RunConfig) -> ScanConfig:
    return ScanConfig(grid_points=cfg.scan_grid_points,
                      direct_spacing=cfg.scan_spacing,
                      tolerance=cfg.tolerance,
                      workers=cfg.workers)


def _write_region(rm, stem: str, cfg: RunConfig) -> None:
    rm.to_csv(stem + ".csv")
    rm.to_json(stem + ".json")
    if cfg.figure:
        from .figures import render_region_map
        render_region_map(rm, stem + ".png")


def _cmd_scan(cfg: RunConfig) -> int:
    out_dir = cfg.output_dir
    os.makedirs(out_dir, exist_ok=True)
    scan_cfg = _scan_config(cfg)
    kind = cfg.scan_kind
    if kind == "hermite-gauss":
        alphas = np.linspace(cfg.alpha_min, cfg.alpha_max, cfg.alpha_steps)
        ratios = np.linspace(cfg.ratio_min, cfg.ratio_max, cfg.ratio_steps)
        rm = scan_hermite_gauss(alphas, ratios, scan_cfg)
        _write_region(rm, os.path.join(out_dir, "scan_hermite-gauss"), cfg)
        detected = int(rm.detection_grid("renyi-weak").sum())
        print(f"hermite-gauss scan: {rm.axis1.size}x{rm.axis2.size} cells, "
              f"renyi-weak detects {detected}")
    elif kind == "cat":
        nus = np.linspace(cfg.nu_min, cfg.nu_max, cfg.nu_steps)
        ps = np.linspace(cfg.p_min, cfg.p_max, cfg.p_steps)
        rm = scan_cat(nus, ps, cfg.alphas, scan_cfg)
        _write_region(rm, os.path.join(out_dir, "scan_cat"), cfg)
        for crit in rm.criteria:
            print(f"cat scan {crit}: detects {int(rm.detection_grid(crit).sum())} "
                  f"of {len(rm.cells)} cells")
    elif kind == "noon":
        alpha1s = np.linspace(cfg.alpha1_min, cfg.alpha1_max, cfg.alpha1_steps)
        alpha2s = np.linspace(cfg.alpha2_min, cfg.alpha2_max, cfg.alpha2_steps)
        maps = scan_noon(cfg.n_list, alpha1s, alpha2s, scan_cfg)
        for n, rm in maps.items():
            _write_region(rm, os.path.join(out_dir, f"scan_noon_N{n}"), cfg)
            print(f"noon N={n}: renyi-strong detects "
                  f"{int(rm.detection_grid('renyi-strong').sum())} cells")
    else:
        raise ValueError(f"scan kind is required (got {kind!r})")
    cfg.to_ini(os.path.join(out_dir, f"scan_{kind}_config.ini"))
    return EXIT_OK


def _cmd_ingest(cfg: RunConfig, with_tsallis: bool) -> int:
    if not cfg.r_file or not cfg.s_file:
        raise ValueError("--r-file and --s-file are required")
    if cfg.delta <= 0:
        raise ValueError("--delta is required and must be positive")
    r_table = load_sample_table(cfg.r_file)
    s_table = load_sample_table(cfg.s_file)
    cap_delta = cfg.cap_delta or cfg.delta
    result = ingest_samples(r_table, s_table, cfg.delta, cap_delta)
    verdicts = []
    for pairing in ("R+S-", "R-S+"):
        d_r, d_s = result.pair(pairing)
        # histogram entropies fluctuate at the plug-in noise scale, so the
        # detection tolerance is floored at three standard errors
        tol = max(cfg.tolerance, 3.0 * result.margin_noise(pairing))
        for alpha in cfg.alphas:
            batch = [renyi_weak_discrete(d_r, d_s, alpha, pairing, tol)]
            if with_tsallis and abs(alpha - 1.0) > 1e-6:
                batch.append(tsallis_witness(d_r, d_s, alpha,
                                             conjugate_beta(alpha), pairing, tol))
            verdicts.extend(dataclasses.replace(
                v, metadata={**v.metadata, "sampling_tolerance": tol})
                for v in batch)
    if result.warnings:
        verdicts = [dataclasses.replace(
            v, metadata={**v.metadata, "sample_warnings": list(result.warnings)})
            for v in verdicts]
    out_dir = cfg.output_dir
    os.makedirs(out_dir, exist_ok=True)
    payload = {
        "samples": {"r_count": r_table.count, "s_count": s_table.count,
                    "delta": cfg.delta, "Delta": cap_delta},
        "verdicts": _verdicts_payload(verdicts),
        "warnings": list(result.warnings),
    }
    with open(os.path.join(out_dir, "ingest_report.json"), "w",
              encoding="utf-8", newline="") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    cfg.to_ini(os.path.join(out_dir, "ingest_config.ini"))
    _summarize(verdicts, [])
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_help()
        return EXIT_CONFIG
    try:
        cfg = _resolve_config(args)
    except (ValueError, OSError, configparser.Error) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if cfg.command == "eval":
            return _cmd_eval(cfg)
        if cfg.command == "scan":
            return _cmd_scan(cfg)
        if cfg.command == "ingest":
            return _cmd_ingest(cfg, getattr(args, "with_tsallis", False))
        print(f"error: unknown command {cfg.command!r}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ArithmeticError, np.linalg.LinAlgError, RuntimeError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    raise SystemExit(main())
