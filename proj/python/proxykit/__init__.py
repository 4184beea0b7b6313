"""Colour-enhanced proxies for gaze-selected objects."""

from ._proxykit import (
    CalibrationSession,
    ProxykitError,
    aggregate,
    ciede2000,
    default_params,
    gaze_metrics,
    generate_proxy,
    identity_params,
    lab_to_srgb,
    palette_distances,
    quantize,
    run_pipeline,
    srgb_to_lab,
)

__all__ = [
    "CalibrationSession",
    "ProxykitError",
    "aggregate",
    "ciede2000",
    "default_params",
    "gaze_metrics",
    "generate_proxy",
    "identity_params",
    "lab_to_srgb",
    "palette_distances",
    "quantize",
    "run_pipeline",
    "srgb_to_lab",
]
