"""Measurement model for two-photon absorption in a liquid-core fiber.

Forward prediction of two-photon excited fluorescence under laser and
photon-pair excitation, inversion to cross-sections and bounds, and the
camera-frame analysis pipeline that turns raw frame series into rates.
"""

__version__ = "0.1.0"

from .c2pa import (DetectionChain, FluorophoreSpec, conc_normalized_curve,
                   detection_efficiency, emission_integral, forward_c2pef,
                   invert_sigma_c)
from .e2pa import (PairSource, forward_e2pef, klyshko_efficiency, pair_rate,
                   sigma_e_probabilistic, sigma_e_upper_bound,
                   spatial_mode_count, upper_bound_ratio)
from .errors import ConfigError, DataError, FiberTpaError, FitError
from .fiber import (FiberSpec, collection_efficiency, mode_fwhm_from_area,
                    v_number)
from .frames import (AllanCurve, CameraConfig, FrameSeries, PowerDrift,
                     RateSeries, allan_curve, analyze_series, fit_power_law,
                     frame_to_rate, normalize_series, overlapping_allan_deviation,
                     read_series, reject_cic, synthesize_series, write_series)
from .jsa import (EntanglementTimeModel, JointSpectrum, entanglement_time_at,
                  entanglement_time_profile, fit_te_model, gaussian_jsi,
                  gaussian_te_analytic)
from .materials import FUSED_SILICA, TOLUENE, MaterialDispersion, refractive_index
from .propagation import (AttenuationModel, DecayFit, SourceSpec,
                          efficiency_components, fit_exponential_decay,
                          peak_flux, photon_rate, power_at,
                          propagation_profile, pulse_duration)
from .config import RunConfig, load_config
from .uncertainty import Budget, Measured, budget_report, propagate

__all__ = [
    "AllanCurve", "AttenuationModel", "Budget", "CameraConfig", "ConfigError",
    "DataError", "DecayFit", "DetectionChain", "EntanglementTimeModel",
    "FiberSpec", "FiberTpaError", "FitError", "FluorophoreSpec", "FrameSeries",
    "FUSED_SILICA", "JointSpectrum", "MaterialDispersion", "Measured",
    "PairSource", "PowerDrift", "RateSeries", "RunConfig", "SourceSpec",
    "TOLUENE", "allan_curve", "analyze_series", "budget_report",
    "collection_efficiency", "conc_normalized_curve", "detection_efficiency",
    "efficiency_components", "emission_integral", "entanglement_time_at",
    "entanglement_time_profile", "fit_exponential_decay", "fit_power_law",
    "fit_te_model", "forward_c2pef", "forward_e2pef", "frame_to_rate",
    "gaussian_jsi", "gaussian_te_analytic", "invert_sigma_c",
    "klyshko_efficiency", "load_config", "mode_fwhm_from_area",
    "normalize_series", "overlapping_allan_deviation", "pair_rate",
    "peak_flux", "photon_rate", "power_at", "propagate",
    "propagation_profile", "pulse_duration", "read_series",
    "refractive_index", "reject_cic", "sigma_e_probabilistic",
    "sigma_e_upper_bound", "spatial_mode_count", "synthesize_series",
    "upper_bound_ratio", "v_number", "write_series",
]
