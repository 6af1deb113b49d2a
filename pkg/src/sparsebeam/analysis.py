"""Beam-pattern evaluation and scalar quality metrics.

A beam pattern is the squared magnitude response |w^H a(theta)|^2 on a
dense angular grid, normalized so its peak sits at 0 dB. Gains are
clamped at -200 dB so that exact nulls serialize to a finite floor.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .arrays import ArrayGeometry, Scenario, steering_matrix, steering_vector
from .errors import DomainError
from .solvers import BeamformerWeights

__all__ = [
    "DB_FLOOR",
    "BeamPattern",
    "SidelobeLevel",
    "beam_pattern",
    "null_depth",
    "sidelobe_level",
    "pointing_error",
    "output_sinr",
]

DB_FLOOR = -200.0


def _to_db(raw: np.ndarray, reference: float) -> np.ndarray:
    with np.errstate(divide="ignore"):
        db = 10.0 * np.log10(raw / reference)
    return np.maximum(db, DB_FLOOR)


class BeamPattern(NamedTuple):
    """Normalized power response sampled on a uniform angle grid."""

    angles_deg: np.ndarray
    gain_db: np.ndarray
    raw_gain: np.ndarray

    @property
    def peak_angle_deg(self) -> float:
        return float(self.angles_deg[int(np.argmax(self.raw_gain))])


class SidelobeLevel(NamedTuple):
    level_db: float
    no_sidelobes: bool


def beam_pattern(weights, geometry: ArrayGeometry, resolution_deg: float = 0.1) -> BeamPattern:
    """Evaluate |w^H a(theta)|^2 over [-90, 90] at the given resolution.

    ``weights`` may be a raw complex vector or a BeamformerWeights
    wrapper. The grid includes both endpoints; gain_db peaks at exactly
    0 dB.
    """
    if isinstance(weights, BeamformerWeights):
        weights = weights.w
    w = np.asarray(weights, dtype=complex)
    if w.ndim != 1 or w.size != geometry.num_elements:
        raise DomainError("weight vector length must match the array size")
    if not np.any(w):
        raise DomainError("weight vector must be nonzero")
    if not 0 < resolution_deg <= 1.0:
        raise DomainError(f"resolution_deg must lie in (0, 1], got {resolution_deg}")
    count = int(round(180.0 / resolution_deg)) + 1
    angles = np.linspace(-90.0, 90.0, count)
    response = w.conj() @ steering_matrix(geometry, angles)
    raw = np.abs(response) ** 2
    peak = float(raw.max())
    if peak <= 0:
        raise DomainError("beam pattern is identically zero")
    return BeamPattern(angles, _to_db(raw, peak), raw)


def _window_indices(pattern: BeamPattern, theta_deg: float, window_deg: float) -> np.ndarray:
    mask = np.abs(pattern.angles_deg - theta_deg) <= window_deg + 1e-12
    if not np.any(mask):
        raise DomainError(
            f"window [{theta_deg - window_deg}, {theta_deg + window_deg}] deg "
            "contains no grid points"
        )
    return mask


def null_depth(pattern: BeamPattern, theta_deg: float, window_deg: float = 1.0) -> float:
    """Deepest normalized gain (dB) within +/- window_deg of a direction.

    More negative is deeper. A window falling entirely outside the
    pattern grid raises DomainError.
    """
    if window_deg < 0:
        raise DomainError(f"window_deg must be nonnegative, got {window_deg}")
    mask = _window_indices(pattern, theta_deg, window_deg)
    return float(pattern.gain_db[mask].min())


def sidelobe_level(pattern: BeamPattern, mainlobe_center_deg: float) -> SidelobeLevel:
    """Highest gain (dB) outside the mainlobe around the given center.

    The mainlobe is located as the nearest local maximum within 2 deg of
    mainlobe_center_deg (DomainError if none exists), then extended to
    the first local minimum on each side. Patterns that are monotone
    away from the mainlobe out to the grid edge have no sidelobes; the
    flagged boundary gain is returned in that case.
    """
    gains = pattern.gain_db
    n = gains.size
    near = np.abs(pattern.angles_deg - mainlobe_center_deg) <= 2.0 + 1e-12
    candidates = [
        i
        for i in np.nonzero(near)[0]
        if (i == 0 or gains[i] >= gains[i - 1]) and (i == n - 1 or gains[i] >= gains[i + 1])
    ]
    if not candidates:
        raise DomainError(
            f"no local maximum within 2 deg of {mainlobe_center_deg} deg; "
            "not a mainlobe center"
        )
    peak = min(
        candidates, key=lambda i: abs(float(pattern.angles_deg[i]) - mainlobe_center_deg)
    )
    left = peak
    while left > 0 and gains[left - 1] <= gains[left]:
        left -= 1
    right = peak
    while right < n - 1 and gains[right + 1] <= gains[right]:
        right += 1
    outside = np.concatenate([gains[:left], gains[right + 1 :]])
    if outside.size == 0:
        edge = float(min(gains[0], gains[-1]))
        return SidelobeLevel(edge, True)
    return SidelobeLevel(float(outside.max()), False)


def pointing_error(pattern: BeamPattern, true_doa_deg: float) -> float:
    """Signed offset (deg) from the true direction to the pattern peak.

    Among grid points tied for the maximum gain, the one closest to the
    true direction wins, so a symmetric two-sided tie reports the
    smaller-magnitude error.
    """
    raw = pattern.raw_gain
    ties = np.nonzero(raw == raw.max())[0]
    errors = pattern.angles_deg[ties] - true_doa_deg
    return float(errors[np.argmin(np.abs(errors))])


def output_sinr(weights, scenario: Scenario, geometry: ArrayGeometry) -> float:
    """Output signal-to-interference-plus-noise ratio in dB.

    Uses the scenario's analytic powers: SOI power through the weights
    over interference powers plus white noise times ||w||^2. Clamped at
    -200 dB; a weight vector orthogonal to all interference and noise
    cannot occur (noise_power > 0), so the ratio is always finite.
    """
    if isinstance(weights, BeamformerWeights):
        weights = weights.w
    w = np.asarray(weights, dtype=complex)
    if w.ndim != 1 or w.size != geometry.num_elements:
        raise DomainError("weight vector length must match the array size")
    noise = scenario.noise_power
    soi_power = noise * 10.0 ** (scenario.soi_snr_db / 10.0)
    a0 = steering_vector(geometry, scenario.soi_doa_deg)
    signal = soi_power * abs(w.conj() @ a0) ** 2
    denom = noise * float(np.linalg.norm(w) ** 2)
    for doa, inr_db in scenario.interferers:
        ai = steering_vector(geometry, doa)
        denom += noise * 10.0 ** (inr_db / 10.0) * abs(w.conj() @ ai) ** 2
    if signal <= 0:
        return DB_FLOOR
    return max(10.0 * float(np.log10(signal / denom)), DB_FLOOR)
