"""EIT spectra of Doppler-broadened multilevel media.

Weak-probe susceptibility of Lambda-type and multilevel atoms, velocity
averaging with parametric hole burning, contrast analysis and hole
optimization, plus a config-driven batch CLI.
"""

from .analysis import (ContrastReport, DetrimentalRoots, Spectrum,
                       detrimental_velocity_roots, dispersion_slope,
                       eit_contrast, find_raman_peak, group_delay_factor,
                       transmission_spectrum, transparency_center)
from .broadening import (DEFAULT_HALF_RANGE_MHZ, DEFAULT_HWHM_MHZ,
                         DEFAULT_N_NODES, HoleSpec, VelocityDistribution,
                         apply_hole, ensemble_chi, ensemble_susceptibility,
                         gaussian_distribution, load_distribution)
from .core import (CESIUM_CONTROL_WEIGHTS, CESIUM_GAMMA_MHZ,
                   CESIUM_GAMMA_SG_MHZ, CESIUM_GROUND_SPLITTING_MHZ,
                   CESIUM_OFFSETS_MHZ, CESIUM_OMEGA_MHZ,
                   CESIUM_PROBE_WEIGHTS, DegenerateSystemError, DetuningPoint,
                   ExcitedLevel, FieldConfig, LevelScheme,
                   OracleConvergenceError, brute_force_steady_state,
                   cesium_scheme, single_atom_susceptibility,
                   steady_state_coherences, susceptibility_map)
from .optimizer import (OptimizeResult, ScanResult, optimize_holes,
                        scan_hole_center)

__all__ = [
    "CESIUM_CONTROL_WEIGHTS", "CESIUM_GAMMA_MHZ", "CESIUM_GAMMA_SG_MHZ",
    "CESIUM_GROUND_SPLITTING_MHZ", "CESIUM_OFFSETS_MHZ", "CESIUM_OMEGA_MHZ",
    "CESIUM_PROBE_WEIGHTS", "ContrastReport", "DEFAULT_HALF_RANGE_MHZ",
    "DEFAULT_HWHM_MHZ", "DEFAULT_N_NODES", "DegenerateSystemError",
    "DetrimentalRoots", "DetuningPoint", "ExcitedLevel", "FieldConfig",
    "HoleSpec", "LevelScheme", "OptimizeResult", "OracleConvergenceError",
    "ScanResult", "Spectrum", "VelocityDistribution", "apply_hole",
    "brute_force_steady_state", "cesium_scheme",
    "detrimental_velocity_roots", "dispersion_slope", "eit_contrast",
    "ensemble_chi", "ensemble_susceptibility", "find_raman_peak",
    "gaussian_distribution", "group_delay_factor", "load_distribution",
    "optimize_holes", "scan_hole_center", "single_atom_susceptibility",
    "steady_state_coherences", "susceptibility_map",
    "transmission_spectrum", "transparency_center",
]

__version__ = "0.1.0"
