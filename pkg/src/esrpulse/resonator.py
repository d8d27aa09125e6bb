"""Stripline resonator as a single-pole band-pass on the baseband drive.

The baseband transfer function is

    H(f) = 1 / (1 + 2i * (f + carrier_offset) / bandwidth_fwhm)

realized as the exact zero-order-hold discretization of the matching
first-order ODE, so a constant input settles to exactly ``H(0)`` times
itself and ``|H|`` never exceeds one on the sample grid.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import signal
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import DomainError, check_finite, check_positive
from .pulses import DT, SampledWaveform

# Filter output below this fraction of the peak is set to exactly zero so
# that free-evolution stretches stay free for the simulator.
NUMERICAL_FLOOR = 1e-15


@dataclass(frozen=True)
class ResonatorModel:
    center_freq: float = 17.06  # GHz
    bandwidth_fwhm: float = 255.0  # MHz
    q_factor: float = 66.0
    efficiency: float = 57.6  # MHz / sqrt(W)

    def __post_init__(self):
        check_positive("center_freq", self.center_freq)
        check_positive("bandwidth_fwhm", self.bandwidth_fwhm)
        check_positive("q_factor", self.q_factor)
        check_positive("efficiency", self.efficiency, allow_zero=True)
        implied = self.center_freq * 1e3 / self.bandwidth_fwhm
        if abs(implied - self.q_factor) > 0.05 * self.q_factor:
            warnings.warn(f"Q factor {self.q_factor} disagrees with center/bandwidth = "
                          f"{implied:.1f} by more than 5%", RuntimeWarning, stacklevel=3)


def transfer(model: ResonatorModel, freq, carrier_offset: float = 0.0):
    """Continuous-time ``H(f)`` at baseband frequency ``freq`` (MHz)."""
    f = np.asarray(freq, dtype=float)
    return 1.0 / (1.0 + 2j * (f + carrier_offset) / model.bandwidth_fwhm)


def _coefficients(model: ResonatorModel, carrier_offset: float, dt: float):
    pole = math.pi * model.bandwidth_fwhm + 2j * math.pi * carrier_offset  # rad/us
    a = np.exp(-pole * dt * 1e-3)
    b = (math.pi * model.bandwidth_fwhm / pole) * (1 - a)
    return np.array([b]), np.array([1.0, -a])


def apply_filter(model: ResonatorModel, w: SampledWaveform | np.ndarray,
                 carrier_offset: float = 0.0, dt: float = DT):
    """Causal single-pole filtering of a baseband waveform.

    Accepts a :class:`SampledWaveform` (returns one with the same grid and
    markers) or a complex array along its last axis (uses ``dt``).  Output
    sample ``k`` is the filter state at the end of input sample ``k``.
    """
    check_finite("carrier_offset", carrier_offset)
    if abs(carrier_offset) >= model.bandwidth_fwhm:
        raise DomainError("carrier offset must lie inside the resonator bandwidth")
    if isinstance(w, SampledWaveform):
        samples, step = np.asarray(w.samples, dtype=complex), w.dt
    else:
        samples, step = np.asarray(w, dtype=complex), dt
    if not np.all(np.isfinite(samples)):
        raise DomainError("waveform contains non-finite samples")
    b, a = _coefficients(model, carrier_offset, step)
    out = signal.lfilter(b, a, samples, axis=-1)
    peak = np.max(np.abs(out)) if out.size else 0.0
    out[np.abs(out) < NUMERICAL_FLOOR * peak] = 0.0
    return w.with_samples(out) if isinstance(w, SampledWaveform) else out


def power_to_rabi(model: ResonatorModel, power: float) -> float:
    """Rabi frequency (MHz) produced by ``power`` watts entering the resonator."""
    check_finite("power", power)
    if power < 0:
        raise DomainError(f"power must be >= 0, got {power!r}")
    return model.efficiency * math.sqrt(power)


class ResonatorFilter(TransformerMixin, BaseEstimator):
    """Scikit-learn transformer wrapping :func:`apply_filter`.

    ``transform`` takes a :class:`SampledWaveform`, a complex 1-D array or a
    2-D array of waveforms (one per row).  ``enabled=False`` passes input
    through unchanged, which is the default experimental setting.
    """

    def __init__(self, center_freq=17.06, bandwidth_fwhm=255.0, q_factor=66.0, efficiency=57.6,
                 carrier_offset=0.0, dt=DT, enabled=True):
        self.center_freq = center_freq
        self.bandwidth_fwhm = bandwidth_fwhm
        self.q_factor = q_factor
        self.efficiency = efficiency
        self.carrier_offset = carrier_offset
        self.dt = dt
        self.enabled = enabled

    def fit(self, X=None, y=None):
        self.model_ = ResonatorModel(self.center_freq, self.bandwidth_fwhm, self.q_factor,
                                     self.efficiency)
        if abs(self.carrier_offset) >= self.bandwidth_fwhm:
            raise DomainError("carrier offset must lie inside the resonator bandwidth")
        return self

    def transform(self, X):
        check_is_fitted(self, "model_")
        if not self.enabled:
            return X
        return apply_filter(self.model_, X, self.carrier_offset, self.dt)

    def gain(self, freq):
        """``|H(f)|`` of the fitted model."""
        check_is_fitted(self, "model_")
        return np.abs(transfer(self.model_, freq, self.carrier_offset))
