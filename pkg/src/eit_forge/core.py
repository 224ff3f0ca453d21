"""Single-atom weak-probe response of a multilevel Lambda-type medium.

Two ground states |g>, |s> are coupled to K excited levels by a weak probe
(g -> e_k) and a strong control field (s -> e_k).  The weak-probe steady
state reduces to a small complex linear system for the K optical coherences
and the ground-state coherence; a full master-equation solver with both
fields at finite strength is kept alongside as a validation oracle.

All public frequencies are linear MHz; the equations convert to angular
units (2*pi*MHz) internally, in one place.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * np.pi

# Cesium D2 defaults (paraffin cell, F=3 ground manifold).
# Probe sigma-: |F=3,m=3> -> |F',m=2>, control sigma+: |F=3,m=1> -> |F',m=2>.
# Relative dipole amplitudes from Clebsch-Gordan algebra (I=7/2, J=1/2 -> J'=3/2),
# normalized to the F'=2 reference transition of each field:
#   F'      probe amplitude        control amplitude
#   2       5*sqrt(2)/14 -> 1      sqrt(30)/42  -> 1
#   3       sqrt(6)/8    -> 0.6062 -sqrt(10)/8  -> -3.0311
#   4       sqrt(30)/56  -> 0.1936 15*sqrt(2)/56 -> 2.9047
CESIUM_OFFSETS_MHZ = (0.0, 151.0, 352.0)
CESIUM_PROBE_WEIGHTS = (1.0, 0.6062177826491071, 0.19364916731037085)
CESIUM_CONTROL_WEIGHTS = (1.0, -3.0310889132455352, 2.9047375096555625)

CESIUM_GAMMA_MHZ = 5.2
CESIUM_GAMMA_SG_MHZ = 0.077 * CESIUM_GAMMA_MHZ
CESIUM_GROUND_SPLITTING_MHZ = 1.25
CESIUM_OMEGA_MHZ = 2.3 * CESIUM_GAMMA_MHZ


class DegenerateSystemError(ValueError):
    """The steady-state coherence system is singular."""


class OracleConvergenceError(RuntimeError):
    """The master-equation oracle failed to produce a steady state."""


@dataclass(frozen=True)
class ExcitedLevel:
    """One effective excited level: energy offset above the reference level
    and relative dipole amplitudes for the probe and control transitions."""

    offset: float
    probe_weight: float
    control_weight: float


@dataclass(frozen=True)
class LevelScheme:
    """Ground pair plus excited levels, with decay rates in linear MHz."""

    excited_levels: tuple[ExcitedLevel, ...]
    gamma: float = CESIUM_GAMMA_MHZ
    gamma_sg: float = CESIUM_GAMMA_SG_MHZ
    ground_splitting: float = CESIUM_GROUND_SPLITTING_MHZ

    def __post_init__(self):
        if not self.excited_levels:
            raise ValueError("scheme needs at least one excited level")
        offs = [lv.offset for lv in self.excited_levels]
        if offs[0] != 0.0:
            raise ValueError("reference level must have offset 0")
        if any(b <= a for a, b in zip(offs, offs[1:])):
            raise ValueError("level offsets must be strictly increasing")
        if self.gamma <= 0:
            raise ValueError("gamma must be > 0")
        if self.gamma_sg < 0:
            raise ValueError("gamma_sg must be >= 0")
        if all(lv.probe_weight == 0 for lv in self.excited_levels):
            raise ValueError("no level couples to the probe")
        if all(lv.control_weight == 0 for lv in self.excited_levels):
            raise ValueError("no level couples to the control")

    @property
    def offsets(self) -> np.ndarray:
        return np.array([lv.offset for lv in self.excited_levels])

    @property
    def probe_weights(self) -> np.ndarray:
        return np.array([lv.probe_weight for lv in self.excited_levels])

    @property
    def control_weights(self) -> np.ndarray:
        return np.array([lv.control_weight for lv in self.excited_levels])


@dataclass(frozen=True)
class FieldConfig:
    """Control Rabi frequency (on the reference transition) and detuning."""

    omega: float = CESIUM_OMEGA_MHZ
    control_detuning: float = 0.0

    def __post_init__(self):
        if self.omega < 0:
            raise ValueError("omega must be >= 0")


@dataclass(frozen=True)
class DetuningPoint:
    """Two-photon detuning and common Doppler detuning, linear MHz."""

    delta_2ph: float
    delta_doppler: float = 0.0


def cesium_scheme(n_levels: int = 3, *, gamma: float = CESIUM_GAMMA_MHZ,
                  gamma_sg: float = CESIUM_GAMMA_SG_MHZ) -> LevelScheme:
    """Default cesium scheme with 1 (pure Lambda), 2 or 3 excited levels."""
    if not 1 <= n_levels <= 3:
        raise ValueError("n_levels must be 1, 2 or 3")
    levels = tuple(
        ExcitedLevel(CESIUM_OFFSETS_MHZ[k], CESIUM_PROBE_WEIGHTS[k],
                     CESIUM_CONTROL_WEIGHTS[k])
        for k in range(n_levels)
    )
    return LevelScheme(levels, gamma=gamma, gamma_sg=gamma_sg)


def _rates(scheme: LevelScheme, fields: FieldConfig):
    """Angular-frequency ingredients shared by the solvers."""
    g_ge = TWO_PI * scheme.gamma / 2.0
    g_sg = TWO_PI * scheme.gamma_sg
    omega_k = TWO_PI * fields.omega * scheme.control_weights
    return g_ge, g_sg, omega_k


def steady_state_coherences(scheme: LevelScheme, fields: FieldConfig,
                            pt: DetuningPoint) -> np.ndarray:
    """Solve the linearized steady state at one detuning point.

    Returns the complex vector (sigma_1 .. sigma_K, sigma_sg): the K
    optical coherences for unit probe amplitude, then the ground
    coherence.  The system solved is, per level k,

        [gamma_ge - i*Dp_k] sigma_k - i*(Omega_k/2) sigma_sg = i*d_k/2
        [gamma_sg - i*D2]  sigma_sg - i*sum_k (Omega_k/2) sigma_k = 0

    with all rates and detunings angular and Dp_k the probe detuning seen
    by the moving atom on the g -> e_k transition.
    """
    g_ge, g_sg, omega_k = _rates(scheme, fields)
    d = scheme.probe_weights
    k = len(d)
    dp = TWO_PI * (pt.delta_2ph + fields.control_detuning + pt.delta_doppler
                   - scheme.offsets)
    d2 = TWO_PI * pt.delta_2ph

    mat = np.zeros((k + 1, k + 1), dtype=complex)
    rhs = np.zeros(k + 1, dtype=complex)
    for j in range(k):
        mat[j, j] = g_ge - 1j * dp[j]
        mat[j, k] = -1j * omega_k[j] / 2.0
        mat[k, j] = -1j * omega_k[j] / 2.0
        rhs[j] = 1j * d[j] / 2.0
    mat[k, k] = g_sg - 1j * d2
    try:
        sol = np.linalg.solve(mat, rhs)
    except np.linalg.LinAlgError as exc:
        raise DegenerateSystemError("degenerate coherence system") from exc
    if not np.all(np.isfinite(sol)):
        raise DegenerateSystemError("degenerate coherence system")
    return sol


def single_atom_susceptibility(scheme: LevelScheme, fields: FieldConfig,
                               pt: DetuningPoint) -> complex:
    """Normalized weak-probe susceptibility at one detuning point.

    chi = 2*gamma_ge * sum_k d_k sigma_k, so a single resonant two-level
    transition with unit probe weight and no control gives Im chi = 1.
    """
    g_ge = TWO_PI * scheme.gamma / 2.0
    sol = steady_state_coherences(scheme, fields, pt)
    return complex(2.0 * g_ge * np.dot(scheme.probe_weights, sol[:-1]))


def susceptibility_map(scheme: LevelScheme, fields: FieldConfig,
                       delta_2ph: np.ndarray,
                       delta_doppler: np.ndarray) -> np.ndarray:
    """Vectorized susceptibility over a (two-photon x Doppler) grid.

    Evaluates the same linear system as steady_state_coherences through its
    exact Schur-complement elimination; returns a complex array of shape
    (len(delta_2ph), len(delta_doppler)).
    """
    d2 = np.atleast_1d(np.asarray(delta_2ph, dtype=float))
    dd = np.atleast_1d(np.asarray(delta_doppler, dtype=float))
    g_ge, g_sg, omega_k = _rates(scheme, fields)
    d = scheme.probe_weights

    dp = d2[:, None, None] + fields.control_detuning + dd[None, :, None] \
        - scheme.offsets[None, None, :]
    a = g_ge - 1j * TWO_PI * dp                      # (n2, nd, K)
    b = g_sg - 1j * TWO_PI * d2[:, None]             # (n2, 1)
    denom = b + np.sum((omega_k ** 2 / 4.0) / a, axis=-1)
    sigma_sg = -np.sum((omega_k * d / 4.0) / a, axis=-1) / denom
    sigma = (1j * d / 2.0 + 1j * (omega_k / 2.0) * sigma_sg[..., None]) / a
    return 2.0 * g_ge * np.sum(d * sigma, axis=-1)


def _lindblad_superoperator(h: np.ndarray, collapse: list[np.ndarray]) -> np.ndarray:
    """Liouvillian matrix acting on column-stacked density matrices."""
    n = h.shape[0]
    eye = np.eye(n)
    lv = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    for c in collapse:
        cdc = c.conj().T @ c
        lv += np.kron(c.conj(), c)
        lv -= 0.5 * (np.kron(eye, cdc) + np.kron(cdc.T, eye))
    return lv


def brute_force_steady_state(scheme: LevelScheme, fields: FieldConfig,
                             pt: DetuningPoint, probe_rabi: float) -> np.ndarray:
    """Steady state of the full master equation, both fields at finite strength.

    Basis order is (g, s, e_1 .. e_K).  Excited decay gamma branches into
    |g> and |s> proportionally to the squared dipole weights; ground
    decoherence enters as pure dephasing of |s>.  Used as the validation
    oracle for the linearized solve: to first order in the probe,
    rho[e_k, g] = 2*pi*probe_rabi * sigma_k.
    """
    if probe_rabi < 0:
        raise ValueError("probe_rabi must be >= 0")
    k = len(scheme.excited_levels)
    n = k + 2
    g_ge, g_sg, omega_k = _rates(scheme, fields)
    gamma = TWO_PI * scheme.gamma
    omega_p = TWO_PI * probe_rabi
    d = scheme.probe_weights
    c = scheme.control_weights

    dp = TWO_PI * (pt.delta_2ph + fields.control_detuning + pt.delta_doppler
                   - scheme.offsets)
    d2 = TWO_PI * pt.delta_2ph

    h = np.zeros((n, n), dtype=complex)
    h[1, 1] = -d2
    for j in range(k):
        e = 2 + j
        h[e, e] = -dp[j]
        h[e, 0] = h[0, e] = -omega_p * d[j] / 2.0
        h[e, 1] = h[1, e] = -omega_k[j] / 2.0

    collapse = []
    for j in range(k):
        e = 2 + j
        wsum = d[j] ** 2 + c[j] ** 2
        bg = d[j] ** 2 / wsum if wsum > 0 else 0.5
        proj_g = np.zeros((n, n)); proj_g[0, e] = 1.0
        proj_s = np.zeros((n, n)); proj_s[1, e] = 1.0
        collapse.append(np.sqrt(gamma * bg) * proj_g)
        collapse.append(np.sqrt(gamma * (1.0 - bg)) * proj_s)
    if scheme.gamma_sg > 0:
        deph = np.zeros((n, n)); deph[1, 1] = 1.0
        collapse.append(np.sqrt(2.0 * g_sg) * deph)

    lv = _lindblad_superoperator(h, collapse)
    trace_row = np.eye(n, dtype=complex).reshape(-1)
    a = np.vstack([lv, trace_row])
    rhs = np.zeros(n * n + 1, dtype=complex)
    rhs[-1] = 1.0
    sol, *_ = np.linalg.lstsq(a, rhs, rcond=None)
    residual = np.linalg.norm(lv @ sol)
    if residual > 1e-8:
        raise OracleConvergenceError(
            f"oracle did not converge (residual norm {residual:.3e})")

    rho = sol.reshape(n, n, order="F")
    rho = 0.5 * (rho + rho.conj().T)
    if np.linalg.eigvalsh(rho).min() < -1e-9:
        raise OracleConvergenceError("oracle did not converge (negative state)")
    return rho
