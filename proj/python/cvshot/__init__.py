"""Pulse-level simulator and analysis toolkit for the randomized-attenuation
CVQKD shot-noise countermeasure: honest GG02 pulse generation, attack
injectors (intercept-resend, wavelength injection, detector saturation), the
dual linear-regression gate, and the conservative collective key rate."""

from ._core import (
    AttenuationSchedule,
    CvshotError,
    SystemParams,
    apply_saturation,
    build_geometric_schedule,
    build_uniform_schedule,
    calibrate_wavelength_masking,
    collective_key_rate,
    conservative_xi_bob,
    estimator_sigma,
    fit_affine,
    gate_block,
    max_hidden_slope,
    modulation_for_snr,
    project_signal_noise,
    refer_excess_noise_to_alice,
    scenarios,
    simulate_group_stats,
    transmission_from_length,
)

__all__ = [
    "AttenuationSchedule",
    "CvshotError",
    "SystemParams",
    "apply_saturation",
    "build_geometric_schedule",
    "build_uniform_schedule",
    "calibrate_wavelength_masking",
    "collective_key_rate",
    "conservative_xi_bob",
    "estimator_sigma",
    "fit_affine",
    "gate_block",
    "max_hidden_slope",
    "modulation_for_snr",
    "project_signal_noise",
    "refer_excess_noise_to_alice",
    "scenarios",
    "simulate_group_stats",
    "transmission_from_length",
]
