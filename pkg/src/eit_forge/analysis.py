"""Transmission spectra, EIT contrast, peak finding and detrimental roots.

The contrast figure of merit is C = (t_max - t_min) / (1 - t_min), with
t_max the transmission at the EIT peak inside an analysis window and t_min
the lowest transmission between the peak and the window edges, taken on
the more strongly absorbing side.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .broadening import VelocityDistribution, ensemble_chi
from .core import FieldConfig, LevelScheme, susceptibility_map


@dataclass(frozen=True)
class Spectrum:
    """Ensemble susceptibility and Beer-Lambert transmission on a grid."""

    grid: np.ndarray            # two-photon detunings, MHz, ascending
    chi: np.ndarray             # complex ensemble susceptibility
    transmission: np.ndarray    # exp(-OD * Im chi)
    optical_depth: float


@dataclass(frozen=True)
class ContrastReport:
    t_max: float
    t_min: float
    contrast: float
    peak_location: float
    window: tuple[float, float]


@dataclass(frozen=True)
class DetrimentalRoots:
    """Doppler detunings whose Raman resonance hits the zero-velocity window."""

    roots: tuple[float, float]
    principal: float


def transmission_spectrum(scheme: LevelScheme, fields: FieldConfig,
                          dist: VelocityDistribution, grid,
                          optical_depth: float,
                          chi_table: np.ndarray | None = None) -> Spectrum:
    """Ensemble spectrum over a two-photon detuning grid."""
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("empty detuning grid")
    if optical_depth < 0:
        raise ValueError("optical_depth must be >= 0")
    chi = ensemble_chi(scheme, fields, dist, grid, chi_table=chi_table)
    transmission = np.exp(-optical_depth * chi.imag)
    return Spectrum(grid, chi, transmission, optical_depth)


def _quadratic_refine(x: np.ndarray, y: np.ndarray, i: int) -> float:
    """Vertex of the parabola through points i-1, i, i+1 (x uniform-ish)."""
    if i == 0 or i == len(x) - 1:
        return float(x[i])
    denom = y[i - 1] - 2.0 * y[i] + y[i + 1]
    if denom == 0:
        return float(x[i])
    shift = 0.5 * (y[i - 1] - y[i + 1]) / denom
    shift = np.clip(shift, -1.0, 1.0)
    return float(x[i] + shift * (x[i + 1] - x[i]))


def eit_contrast(spec: Spectrum, window: tuple[float, float]) -> ContrastReport:
    """Contrast C = (t_max - t_min)/(1 - t_min) inside the window."""
    lo, hi = window
    idx = np.where((spec.grid >= lo) & (spec.grid <= hi))[0]
    if idx.size == 0 or lo < spec.grid[0] or hi > spec.grid[-1]:
        raise ValueError("window out of range")
    if idx.size < 5:
        raise ValueError("window contains fewer than 5 grid points")
    t = spec.transmission
    ipk = idx[np.argmax(t[idx])]
    t_max = float(t[ipk])
    left_min = float(np.min(t[idx[0]:ipk + 1]))
    right_min = float(np.min(t[ipk:idx[-1] + 1]))
    t_min = min(left_min, right_min)
    contrast = 0.0 if t_min >= 1.0 else (t_max - t_min) / (1.0 - t_min)
    peak = _quadratic_refine(spec.grid, t, ipk) \
        if idx[0] < ipk < idx[-1] else float(spec.grid[ipk])
    return ContrastReport(t_max, t_min, contrast, peak, (lo, hi))


def find_raman_peak(scheme: LevelScheme, fields: FieldConfig,
                    delta_doppler: float,
                    search: tuple[float, float]) -> float:
    """Locate the absorption maximum of the single-atom spectrum.

    Dense grid search over the interval, twice zoomed, then 3-point
    quadratic refinement.  Raises if the maximum sits on the interval
    boundary.
    """
    lo, hi = search
    if hi <= lo:
        raise ValueError("empty search interval")
    n = 1501
    for stage in range(3):
        grid = np.linspace(lo, hi, n)
        absorb = susceptibility_map(scheme, fields, grid,
                                    np.array([delta_doppler])).imag[:, 0]
        i = int(np.argmax(absorb))
        if stage == 0 and (i == 0 or i == n - 1):
            raise ValueError("peak not bracketed")
        step = grid[1] - grid[0]
        center = grid[i]
        lo, hi = center - 2 * step, center + 2 * step
    return _quadratic_refine(grid, absorb, i)


def transparency_center(scheme: LevelScheme, fields: FieldConfig,
                        search: tuple[float, float] = (-15.0, 5.0)) -> float:
    """Location of the zero-velocity transparency minimum (EIT window center).

    For a pure Lambda scheme this is 0; extra excited levels light-shift it.
    """
    lo, hi = search
    n = 2001
    for _ in range(3):
        grid = np.linspace(lo, hi, n)
        absorb = susceptibility_map(scheme, fields, grid,
                                    np.array([0.0])).imag[:, 0]
        i = int(np.argmin(absorb))
        step = grid[1] - grid[0]
        lo, hi = grid[i] - 2 * step, grid[i] + 2 * step
    return _quadratic_refine(grid, -absorb, i)


def detrimental_velocity_roots(d: float, d_prime: float,
                               omega_ee: float) -> DetrimentalRoots:
    """Doppler detunings where the Stark-shifted Raman resonance crosses the
    (shifted) zero-velocity transparency window.

    Balancing the two-level Stark shifts against the window shift reduces
    to the quadratic r*x^2 + w*x - w^2 = 0 with r = (d'/d)^2 and
    w = omega_ee; only the weight ratio enters.  The principal root is the
    one between the two control resonances, i.e. in (0, omega_ee).
    """
    if d == 0 or d_prime == 0:
        raise ValueError("dipole weights must be nonzero")
    if omega_ee <= 0:
        raise ValueError("omega_ee must be > 0")
    r = (d_prime / d) ** 2
    disc = np.sqrt(1.0 + 4.0 * r)
    # cancellation-free pairing: large-magnitude root directly, the other
    # from the product x1*x2 = -omega^2/r
    big = omega_ee * (-1.0 - disc) / (2.0 * r)
    roots = [2.0 * omega_ee / (1.0 + disc), big]
    # polish with Newton on the rational form; the quadratic root is exact
    # to rounding but the rational residual is badly conditioned at small r
    for _ in range(3):
        for i, x in enumerate(roots):
            f = 1.0 / x + r / (x - omega_ee) + r / omega_ee
            df = -1.0 / x ** 2 - r / (x - omega_ee) ** 2
            roots[i] = x - f / df
    roots = tuple(roots)
    for x in roots:
        if abs(x) < 1e-12 * omega_ee or abs(x - omega_ee) < 1e-12 * omega_ee:
            raise ValueError("degenerate root")
        lhs = 1.0 / x + r / (x - omega_ee)
        rhs = -r / omega_ee
        # residual relative to the largest term of the equation
        scale = max(abs(1.0 / x), abs(r / (x - omega_ee)), abs(rhs))
        if abs(lhs - rhs) > 1e-9 * scale:
            raise ValueError("degenerate root")
    principal = [x for x in roots if 0.0 < x < omega_ee]
    if len(principal) != 1:
        raise ValueError("degenerate root")
    return DetrimentalRoots(roots, principal[0])


def _peak_index(spec: Spectrum, window: tuple[float, float] | None,
                at: float | None) -> int:
    if at is not None:
        return int(np.argmin(np.abs(spec.grid - at)))
    if window is None:
        idx = np.arange(len(spec.grid))
    else:
        idx = np.where((spec.grid >= window[0]) & (spec.grid <= window[1]))[0]
        if idx.size == 0:
            raise ValueError("window out of range")
    return int(idx[np.argmax(spec.transmission[idx])])


def dispersion_slope(spec: Spectrum, window: tuple[float, float] | None = None,
                     at: float | None = None) -> float:
    """d(Re chi)/d(delta_2ph) by central difference at the EIT peak.

    The peak is the transmission maximum inside the window; `at` overrides
    the peak search with an explicit evaluation point (nearest grid node).
    """
    i = _peak_index(spec, window, at)
    if i == 0 or i == len(spec.grid) - 1:
        raise ValueError("cannot differentiate at boundary")
    h = spec.grid[i + 1] - spec.grid[i - 1]
    return float((spec.chi.real[i + 1] - spec.chi.real[i - 1]) / h)


def group_delay_factor(spec_a: Spectrum, spec_b: Spectrum,
                       window: tuple[float, float] | None = None,
                       at_a: float | None = None,
                       at_b: float | None = None) -> float:
    """Ratio of dispersion slopes (b over a) at the spectra's EIT peaks.

    Proxy for the group-index enhancement of spectrum b relative to a.
    """
    if spec_a.grid.shape != spec_b.grid.shape or \
            not np.array_equal(spec_a.grid, spec_b.grid):
        raise ValueError("spectra must share the detuning grid")
    slope_a = dispersion_slope(spec_a, window, at_a)
    slope_b = dispersion_slope(spec_b, window, at_b)
    return slope_b / slope_a
