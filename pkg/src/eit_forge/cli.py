"""Batch front-end: config-driven spectrum/scan/optimize/roots runs.

Config files are flat ``key=value`` text (one per line, ``#`` comments).
Outputs are CSV files with deterministic formatting: 9 significant digits
in scientific notation, ``.`` decimal separator, LF line endings; files
are written to a temp path and renamed into place.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import core
from .analysis import eit_contrast, transmission_spectrum
from .broadening import (HoleSpec, VelocityDistribution, apply_hole,
                         gaussian_distribution, load_distribution)
from .core import FieldConfig, LevelScheme, cesium_scheme, susceptibility_map
from .optimizer import optimize_holes, scan_hole_center

EXIT_OK = 0
EXIT_MISSING_FILE = 1
EXIT_INVALID_CONFIG = 2
EXIT_NUMERICAL = 3


class ConfigError(Exception):
    """Invalid configuration value or key (exit code 2)."""


@dataclass
class RunConfig:
    mode: str = "spectrum"
    gamma_mhz: float = core.CESIUM_GAMMA_MHZ
    gamma_sg_mhz: float = core.CESIUM_GAMMA_SG_MHZ
    ground_splitting_mhz: float = core.CESIUM_GROUND_SPLITTING_MHZ
    levels: list = field(default_factory=list)  # (offset, probe, control)
    omega_mhz: float = core.CESIUM_OMEGA_MHZ
    control_detuning_mhz: float = 0.0
    dist_hwhm_mhz: float = 160.0
    dist_half_range_mhz: float = 480.0
    dist_n_nodes: int = 1601
    dist_file: str | None = None
    holes: list = field(default_factory=list)   # HoleSpec list
    hole_depth: float = 0.8
    hole_hwhm_mhz: float = 10.0
    hole_profile: str = "gaussian"
    grid_min_mhz: float = -15.0
    grid_max_mhz: float = 15.0
    grid_n_points: int = 500
    optical_depth: float = 5.0
    window_min_mhz: float = -10.0
    window_max_mhz: float = 10.0
    scan_min_mhz: float = 0.0
    scan_max_mhz: float = 150.0
    scan_step_mhz: float = 5.0
    n_holes: int = 1
    bounds_min_mhz: float = 0.0
    bounds_max_mhz: float = 150.0
    optimize_shape: bool = False
    root_d: float = core.CESIUM_CONTROL_WEIGHTS[0]
    root_d_prime: float = core.CESIUM_CONTROL_WEIGHTS[1]
    root_omega_ee_mhz: float = core.CESIUM_OFFSETS_MHZ[1]
    out_prefix: str = "eit_forge"
    threads: int = 1

    def scheme(self) -> LevelScheme:
        if self.levels:
            excited = tuple(core.ExcitedLevel(*tr) for tr in self.levels)
            return LevelScheme(excited_levels=excited, gamma=self.gamma_mhz,
                               gamma_sg=self.gamma_sg_mhz,
                               ground_splitting=self.ground_splitting_mhz)
        return cesium_scheme(gamma=self.gamma_mhz,
                             gamma_sg=self.gamma_sg_mhz)

    def field_config(self) -> FieldConfig:
        return FieldConfig(omega=self.omega_mhz,
                           control_detuning=self.control_detuning_mhz)

    def distribution(self) -> VelocityDistribution:
        if self.dist_file is not None:
            dist = load_distribution(self.dist_file)
        else:
            dist = gaussian_distribution(self.dist_hwhm_mhz,
                                         self.dist_half_range_mhz,
                                         self.dist_n_nodes)
        for hole in self.holes:
            dist = apply_hole(dist, hole)
        return dist

    def grid(self) -> np.ndarray:
        return np.linspace(self.grid_min_mhz, self.grid_max_mhz,
                           self.grid_n_points)

    def window(self) -> tuple[float, float]:
        return (self.window_min_mhz, self.window_max_mhz)


_MODES = ("spectrum", "scan", "optimize", "roots", "velocity-map")


def _parse_levels(value: str) -> list:
    levels = []
    for item in value.split(";"):
        item = item.strip()
        if not item:
            continue
        parts = item.split(":")
        if len(parts) != 3:
            raise ConfigError(
                f"levels: expected offset:probe:control triples, got {item!r}")
        try:
            levels.append(tuple(float(p) for p in parts))
        except ValueError:
            raise ConfigError(f"levels: non-numeric entry {item!r}") from None
    if not levels:
        raise ConfigError("levels: empty")
    return levels


def _parse_holes(value: str, cfg: RunConfig) -> list:
    holes = []
    for item in value.split(";"):
        item = item.strip()
        if not item:
            continue
        parts = item.split(":")
        if len(parts) not in (3, 4):
            raise ConfigError(
                f"holes: expected center:depth:hwhm[:profile], got {item!r}")
        try:
            center, depth, hwhm = (float(p) for p in parts[:3])
        except ValueError:
            raise ConfigError(f"holes: non-numeric entry {item!r}") from None
        profile = parts[3] if len(parts) == 4 else cfg.hole_profile
        try:
            holes.append(HoleSpec(center, depth, hwhm, profile))
        except ValueError as exc:
            raise ConfigError(f"holes: {exc}") from None
    return holes


def _set_float(cfg, key, attr, raw, lo=None, hi=None):
    try:
        value = float(raw)
    except ValueError:
        raise ConfigError(f"{key}: not a number: {raw!r}") from None
    if lo is not None and not (lo <= value):
        raise ConfigError(f"{key}: must be >= {lo}, got {raw}")
    if hi is not None and not (value <= hi):
        raise ConfigError(f"{key}: must be <= {hi}, got {raw}")
    setattr(cfg, attr, value)


def _set_int(cfg, key, attr, raw, lo=None, hi=None):
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{key}: not an integer: {raw!r}") from None
    if lo is not None and value < lo:
        raise ConfigError(f"{key}: must be >= {lo}, got {raw}")
    if hi is not None and value > hi:
        raise ConfigError(f"{key}: must be <= {hi}, got {raw}")
    setattr(cfg, attr, value)


def parse_config(path) -> RunConfig:
    """Parse and validate a key=value config; cesium defaults fill gaps."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    cfg = RunConfig()
    hole_specs_raw = None
    for lineno, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value: {line!r}")
        key, _, raw = line.partition("=")
        key, raw = key.strip(), raw.strip()
        if key == "mode":
            if raw not in _MODES:
                raise ConfigError(f"mode: unknown mode {raw!r}, "
                                  f"expected one of {', '.join(_MODES)}")
            cfg.mode = raw
        elif key == "levels":
            cfg.levels = _parse_levels(raw)
        elif key == "holes":
            hole_specs_raw = raw
        elif key == "gamma_mhz":
            _set_float(cfg, key, "gamma_mhz", raw, lo=1e-12)
        elif key == "gamma_sg_mhz":
            _set_float(cfg, key, "gamma_sg_mhz", raw, lo=0.0)
        elif key == "ground_splitting_mhz":
            _set_float(cfg, key, "ground_splitting_mhz", raw, lo=0.0)
        elif key == "omega_mhz":
            _set_float(cfg, key, "omega_mhz", raw, lo=0.0)
        elif key == "control_detuning_mhz":
            _set_float(cfg, key, "control_detuning_mhz", raw)
        elif key == "dist_hwhm_mhz":
            _set_float(cfg, key, "dist_hwhm_mhz", raw, lo=1e-12)
        elif key == "dist_half_range_mhz":
            _set_float(cfg, key, "dist_half_range_mhz", raw, lo=1e-12)
        elif key == "dist_n_nodes":
            _set_int(cfg, key, "dist_n_nodes", raw, lo=3)
        elif key == "dist_file":
            cfg.dist_file = raw
        elif key in ("depth", "hole_depth"):
            _set_float(cfg, key, "hole_depth", raw, lo=0.0, hi=1.0)
        elif key == "hole_hwhm_mhz":
            _set_float(cfg, key, "hole_hwhm_mhz", raw, lo=1e-12)
        elif key == "hole_profile":
            if raw not in ("gaussian", "lorentzian"):
                raise ConfigError(f"hole_profile: unknown profile {raw!r}")
            cfg.hole_profile = raw
        elif key == "grid_min_mhz":
            _set_float(cfg, key, "grid_min_mhz", raw)
        elif key == "grid_max_mhz":
            _set_float(cfg, key, "grid_max_mhz", raw)
        elif key == "grid_n_points":
            _set_int(cfg, key, "grid_n_points", raw, lo=2)
        elif key == "optical_depth":
            _set_float(cfg, key, "optical_depth", raw, lo=0.0)
        elif key == "window_min_mhz":
            _set_float(cfg, key, "window_min_mhz", raw)
        elif key == "window_max_mhz":
            _set_float(cfg, key, "window_max_mhz", raw)
        elif key == "scan_min_mhz":
            _set_float(cfg, key, "scan_min_mhz", raw)
        elif key == "scan_max_mhz":
            _set_float(cfg, key, "scan_max_mhz", raw)
        elif key == "scan_step_mhz":
            _set_float(cfg, key, "scan_step_mhz", raw, lo=1e-12)
        elif key == "n_holes":
            _set_int(cfg, key, "n_holes", raw, lo=1, hi=4)
        elif key == "bounds_min_mhz":
            _set_float(cfg, key, "bounds_min_mhz", raw)
        elif key == "bounds_max_mhz":
            _set_float(cfg, key, "bounds_max_mhz", raw)
        elif key == "optimize_shape":
            if raw not in ("true", "false"):
                raise ConfigError(f"optimize_shape: expected true or false, "
                                  f"got {raw!r}")
            cfg.optimize_shape = raw == "true"
        elif key == "root_d":
            _set_float(cfg, key, "root_d", raw)
        elif key == "root_d_prime":
            _set_float(cfg, key, "root_d_prime", raw)
        elif key == "root_omega_ee_mhz":
            _set_float(cfg, key, "root_omega_ee_mhz", raw, lo=1e-12)
        elif key == "out_prefix":
            cfg.out_prefix = raw
        elif key == "threads":
            _set_int(cfg, key, "threads", raw, lo=1)
        else:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
    if hole_specs_raw is not None:
        cfg.holes = _parse_holes(hole_specs_raw, cfg)
    if cfg.grid_max_mhz <= cfg.grid_min_mhz:
        raise ConfigError("grid_max_mhz: must exceed grid_min_mhz")
    if cfg.window_max_mhz <= cfg.window_min_mhz:
        raise ConfigError("window_max_mhz: must exceed window_min_mhz")
    if cfg.dist_file is not None and not os.path.exists(cfg.dist_file):
        raise FileNotFoundError(cfg.dist_file)
    try:
        cfg.scheme()
    except ValueError as exc:
        raise ConfigError(f"levels: {exc}") from None
    return cfg


def _fmt(x: float) -> str:
    return f"{x:.8e}"


def _write_atomic(path: str, lines: list) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    os.replace(tmp, path)


def _chi_table(scheme, fields, grid, deltas, threads: int) -> np.ndarray:
    """Single-atom susceptibility table, optionally chunked across threads."""
    if threads <= 1 or len(grid) < 2 * threads:
        return susceptibility_map(scheme, fields, grid, deltas)
    chunks = np.array_split(np.arange(len(grid)), threads)
    out = np.empty((len(grid), len(deltas)), dtype=complex)
    with ThreadPoolExecutor(max_workers=threads) as ex:
        futures = [(idx, ex.submit(susceptibility_map, scheme, fields,
                                   grid[idx], deltas))
                   for idx in chunks if idx.size]
        for idx, fut in futures:
            out[idx] = fut.result()
    return out


def _run_spectrum(cfg: RunConfig) -> None:
    scheme, fields = cfg.scheme(), cfg.field_config()
    dist = cfg.distribution()
    grid = cfg.grid()
    table = _chi_table(scheme, fields, grid, dist.deltas, cfg.threads)
    spec = transmission_spectrum(scheme, fields, dist, grid,
                                 cfg.optical_depth, chi_table=table)
    rows = ["delta_2ph_mhz,re_chi,im_chi,transmission"]
    for x, chi, t in zip(spec.grid, spec.chi, spec.transmission):
        rows.append(f"{_fmt(x)},{_fmt(chi.real)},{_fmt(chi.imag)},{_fmt(t)}")
    _write_atomic(f"{cfg.out_prefix}_spectrum.csv", rows)
    report = eit_contrast(spec, cfg.window())
    _write_atomic(f"{cfg.out_prefix}_report.txt", [
        f"t_max = {_fmt(report.t_max)}",
        f"t_min = {_fmt(report.t_min)}",
        f"contrast = {_fmt(report.contrast)}",
        f"peak_location_mhz = {_fmt(report.peak_location)}",
        f"window_mhz = {_fmt(report.window[0])},{_fmt(report.window[1])}",
    ])


def _run_scan(cfg: RunConfig) -> None:
    scheme, fields = cfg.scheme(), cfg.field_config()
    dist = cfg.distribution()
    grid = cfg.grid()
    centers = np.arange(cfg.scan_min_mhz,
                        cfg.scan_max_mhz + 0.5 * cfg.scan_step_mhz,
                        cfg.scan_step_mhz)
    table = _chi_table(scheme, fields, grid, dist.deltas, cfg.threads)
    template = HoleSpec(0.0, cfg.hole_depth, cfg.hole_hwhm_mhz,
                        cfg.hole_profile)
    result = scan_hole_center(scheme, fields, dist, template, centers, grid,
                              cfg.optical_depth, cfg.window(),
                              chi_table=table)
    rows = ["hole_center_mhz,contrast"]
    rows += [f"{_fmt(c)},{_fmt(v)}" for c, v in result.samples]
    _write_atomic(f"{cfg.out_prefix}_scan.csv", rows)
    _write_atomic(f"{cfg.out_prefix}_report.txt", [
        f"best_center_mhz = {_fmt(result.best_center)}",
        f"best_contrast = {_fmt(result.best_contrast)}",
    ])


def _run_optimize(cfg: RunConfig) -> None:
    scheme, fields = cfg.scheme(), cfg.field_config()
    dist = cfg.distribution()
    grid = cfg.grid()
    table = _chi_table(scheme, fields, grid, dist.deltas, cfg.threads)
    template = HoleSpec(0.0, cfg.hole_depth, cfg.hole_hwhm_mhz,
                        cfg.hole_profile)
    result = optimize_holes(scheme, fields, dist, cfg.n_holes,
                            (cfg.bounds_min_mhz, cfg.bounds_max_mhz),
                            template, grid, cfg.optical_depth, cfg.window(),
                            optimize_shape=cfg.optimize_shape,
                            chi_table=table)
    rows = ["center_mhz,depth,hwhm_mhz,profile"]
    rows += [f"{_fmt(h.center)},{_fmt(h.depth)},{_fmt(h.hwhm)},{h.profile}"
             for h in result.holes]
    _write_atomic(f"{cfg.out_prefix}_holes.csv", rows)
    _write_atomic(f"{cfg.out_prefix}_report.txt", [
        f"contrast = {_fmt(result.contrast)}",
        f"converged = {str(result.converged).lower()}",
        f"n_evaluations = {result.n_evaluations}",
    ])


def _run_roots(cfg: RunConfig) -> None:
    from .analysis import detrimental_velocity_roots
    roots = detrimental_velocity_roots(cfg.root_d, cfg.root_d_prime,
                                       cfg.root_omega_ee_mhz)
    ordered = sorted(roots.roots)
    print("root1_mhz,root2_mhz,principal_mhz")
    print(f"{_fmt(ordered[0])},{_fmt(ordered[1])},{_fmt(roots.principal)}")


def _run_velocity_map(cfg: RunConfig) -> None:
    scheme, fields = cfg.scheme(), cfg.field_config()
    dist = cfg.distribution()
    grid = cfg.grid()
    table = _chi_table(scheme, fields, grid, dist.deltas, cfg.threads)
    rows = ["delta_doppler_mhz,delta_2ph_mhz,im_chi"]
    for j, dd in enumerate(dist.deltas):
        for i, d2 in enumerate(grid):
            rows.append(f"{_fmt(dd)},{_fmt(d2)},{_fmt(table[i, j].imag)}")
    _write_atomic(f"{cfg.out_prefix}_map.csv", rows)


def run(cfg: RunConfig) -> int:
    """Execute the configured mode; returns a process exit code."""
    dispatch = {
        "spectrum": _run_spectrum,
        "scan": _run_scan,
        "optimize": _run_optimize,
        "roots": _run_roots,
        "velocity-map": _run_velocity_map,
    }
    try:
        dispatch[cfg.mode](cfg)
    except FileNotFoundError as exc:
        print(f"error: missing file: {exc}", file=sys.stderr)
        return EXIT_MISSING_FILE
    except (ValueError, RuntimeError, np.linalg.LinAlgError) as exc:
        print(f"error: {cfg.mode} failed: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="eit-forge",
        description="EIT spectra of Doppler-broadened multilevel media")
    parser.add_argument("config", help="path to key=value run configuration")
    parser.add_argument("--out-prefix", default=None,
                        help="override the output file prefix")
    parser.add_argument("--threads", type=int, default=None,
                        help="worker threads for grid evaluation "
                             "(default: EIT_FORGE_THREADS or 1)")
    args = parser.parse_args(argv)
    try:
        cfg = parse_config(args.config)
    except FileNotFoundError as exc:
        print(f"error: missing file: {exc}", file=sys.stderr)
        return EXIT_MISSING_FILE
    except ConfigError as exc:
        print(f"error: invalid config: {exc}", file=sys.stderr)
        return EXIT_INVALID_CONFIG
    if args.out_prefix is not None:
        cfg.out_prefix = args.out_prefix
    if args.threads is not None:
        cfg.threads = args.threads
    elif "EIT_FORGE_THREADS" in os.environ:
        try:
            cfg.threads = max(1, int(os.environ["EIT_FORGE_THREADS"]))
        except ValueError:
            print("error: invalid config: EIT_FORGE_THREADS must be an "
                  "integer", file=sys.stderr)
            return EXIT_INVALID_CONFIG
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
