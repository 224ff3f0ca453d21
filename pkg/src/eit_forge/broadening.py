"""Velocity distributions over Doppler detuning and ensemble averaging.

Distributions live on a uniform grid in Doppler-detuning space (MHz);
depump holes multiply the weights pointwise, and the ensemble
susceptibility is a norm-weighted trapezoidal average of the single-atom
response.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .core import FieldConfig, LevelScheme, susceptibility_map

DEFAULT_HWHM_MHZ = 160.0
DEFAULT_HALF_RANGE_MHZ = 480.0
DEFAULT_N_NODES = 1601

_HWHM_TO_SIGMA = 1.0 / np.sqrt(2.0 * np.log(2.0))


@dataclass(frozen=True)
class VelocityDistribution:
    """Non-negative sampled weight over Doppler detuning, uniform grid."""

    deltas: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        deltas = np.asarray(self.deltas, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "deltas", deltas)
        object.__setattr__(self, "weights", weights)
        if deltas.ndim != 1 or deltas.shape != weights.shape:
            raise ValueError("deltas and weights must be 1-d and equal length")
        if len(deltas) < 1:
            raise ValueError("grid too coarse")
        if len(deltas) > 1:
            steps = np.diff(deltas)
            if np.any(steps <= 0):
                raise ValueError("grid must be strictly increasing")
            if np.max(np.abs(steps - steps[0])) > 1e-6 * abs(steps[0]):
                raise ValueError("grid not uniform")
        if np.any(weights < 0):
            raise ValueError("negative weight")

    @property
    def norm(self) -> float:
        if len(self.deltas) == 1:
            return 0.0
        return float(np.trapezoid(self.weights, self.deltas))

    @property
    def step(self) -> float:
        if len(self.deltas) == 1:
            return 0.0
        return float(self.deltas[1] - self.deltas[0])


@dataclass(frozen=True)
class HoleSpec:
    """Parametric depump hole: fractional removal around a Doppler detuning."""

    center: float
    depth: float = 0.8
    hwhm: float = 10.0
    profile: str = "gaussian"

    def __post_init__(self):
        if not 0.0 <= self.depth <= 1.0:
            raise ValueError("hole depth must be in [0, 1]")
        if self.hwhm <= 0:
            raise ValueError("hole hwhm must be > 0")
        if self.profile not in ("gaussian", "lorentzian"):
            raise ValueError(f"unknown hole profile {self.profile!r}")

    def shape(self, delta: np.ndarray) -> np.ndarray:
        """Unit-peak profile with value 1/2 at one HWHM from center."""
        u = (np.asarray(delta, dtype=float) - self.center) / self.hwhm
        if self.profile == "gaussian":
            return np.exp(-np.log(2.0) * u ** 2)
        return 1.0 / (1.0 + u ** 2)


def gaussian_distribution(hwhm: float = DEFAULT_HWHM_MHZ,
                          half_range: float = DEFAULT_HALF_RANGE_MHZ,
                          n_nodes: int = DEFAULT_N_NODES) -> VelocityDistribution:
    """Unit-norm Gaussian of the given half width at half maximum."""
    if n_nodes < 3:
        raise ValueError("grid too coarse")
    if hwhm <= 0 or half_range <= 0:
        raise ValueError("hwhm and half_range must be > 0")
    sigma = hwhm * _HWHM_TO_SIGMA
    deltas = np.linspace(-half_range, half_range, n_nodes)
    weights = np.exp(-deltas ** 2 / (2.0 * sigma ** 2))
    weights /= np.trapezoid(weights, deltas)
    return VelocityDistribution(deltas, weights)


def apply_hole(dist: VelocityDistribution, hole: HoleSpec) -> VelocityDistribution:
    """Multiply the weights by (1 - depth * profile); holes compose."""
    if not dist.deltas[0] <= hole.center <= dist.deltas[-1]:
        raise ValueError("hole outside distribution support")
    weights = dist.weights * (1.0 - hole.depth * hole.shape(dist.deltas))
    return replace(dist, weights=weights)


def load_distribution(path) -> VelocityDistribution:
    """Read a (delta_doppler_mhz, weight) CSV with one header line.

    The grid must be uniform and ascending and the weights non-negative.
    The distribution is not renormalized.
    """
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    deltas, weights = [], []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise ValueError(f"parse error at line {lineno}")
        try:
            x, w = float(parts[0]), float(parts[1])
        except ValueError:
            raise ValueError(f"parse error at line {lineno}") from None
        if w < 0:
            raise ValueError(f"negative weight at line {lineno}")
        deltas.append(x)
        weights.append(w)
    if not deltas:
        raise ValueError("parse error at line 2")
    deltas = np.array(deltas)
    if len(deltas) > 1:
        steps = np.diff(deltas)
        if np.any(steps <= 0) or np.max(np.abs(steps - steps[0])) > 1e-6 * abs(steps[0]):
            raise ValueError("grid not uniform")
    return VelocityDistribution(deltas, np.array(weights))


def ensemble_chi(scheme: LevelScheme, fields: FieldConfig,
                 dist: VelocityDistribution, delta_2ph: np.ndarray,
                 chi_table: np.ndarray | None = None) -> np.ndarray:
    """Norm-weighted velocity average of the susceptibility on a detuning grid.

    chi_table, if given, must be susceptibility_map(scheme, fields,
    delta_2ph, dist.deltas); passing it lets callers reuse one table across
    many reshaped distributions.

    A delta-like distribution (zero trapezoidal norm but positive total
    weight) falls back to the plain weighted mean, so a single-node
    distribution reproduces the single-atom response.
    """
    if chi_table is None:
        chi_table = susceptibility_map(scheme, fields, delta_2ph, dist.deltas)
    norm = dist.norm
    if norm > 0:
        return np.trapezoid(dist.weights[None, :] * chi_table,
                            dist.deltas, axis=1) / norm
    wsum = float(np.sum(dist.weights))
    if wsum <= 0:
        raise ValueError("distribution has non-positive norm")
    return chi_table @ dist.weights / wsum


def ensemble_susceptibility(scheme: LevelScheme, fields: FieldConfig,
                            dist: VelocityDistribution,
                            delta_2ph: float) -> complex:
    """Ensemble susceptibility at a single two-photon detuning."""
    return complex(ensemble_chi(scheme, fields, dist,
                                np.array([delta_2ph]))[0])
