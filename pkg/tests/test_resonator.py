import math

import numpy as np
import pytest
from scipy.linalg import expm

from esrpulse._validation import DomainError
from esrpulse.pulses import SampledWaveform, compile_sequence, rect_pulse
from esrpulse.resonator import (ResonatorFilter, ResonatorModel, apply_filter, power_to_rabi,
                                transfer)

MODEL = ResonatorModel()


def test_passband_covers_comb():
    g = np.abs(transfer(MODEL, [-20.0, 20.0]))
    np.testing.assert_allclose(g, 1 / math.sqrt(1 + (40 / 255) ** 2))
    assert np.all(g >= 0.98)
    assert abs(transfer(MODEL, 127.5)) == pytest.approx(1 / math.sqrt(2))


def test_power_to_rabi():
    assert power_to_rabi(MODEL, 1.0) == 57.6
    assert power_to_rabi(MODEL, 0.25) == pytest.approx(28.8)
    with pytest.raises(DomainError):
        power_to_rabi(MODEL, -1.0)


@pytest.mark.parametrize("offset", [0.0, 30.0])
def test_filter_matches_augmented_exponential(offset, rng):
    x = rng.normal(size=200) + 1j * rng.normal(size=200)
    dt = 0.1
    p = math.pi * 255.0 + 2j * math.pi * offset
    step = expm(np.array([[-p, math.pi * 255.0], [0, 0]]) * dt * 1e-3)
    y, expected = 0j, []
    for xk in x:
        y = step[0, 0] * y + step[0, 1] * xk
        expected.append(y)
    np.testing.assert_allclose(apply_filter(MODEL, x, offset, dt), expected, atol=1e-12)


def test_dc_gain_and_tone_response():
    n = 20000
    dc = apply_filter(MODEL, np.ones(n), carrier_offset=40.0)
    assert dc[-1] == pytest.approx(transfer(MODEL, 0.0, 40.0), abs=1e-12)
    t = np.arange(n) * 0.1e-3
    tone = np.exp(2j * np.pi * 20.0 * t)
    out = apply_filter(MODEL, tone)
    # steady state, half-sample hold delay removed
    ratio = out[-1] / tone[-1] * np.exp(-1j * np.pi * 20.0 * 0.1e-3)
    assert ratio == pytest.approx(transfer(MODEL, 20.0), abs=1e-4)


def test_filter_preserves_markers_and_floors_tail():
    w = compile_sequence([rect_pulse(math.pi, 0, 38.46)])
    w = SampledWaveform(np.concatenate([w.samples, np.zeros(5000)]), echo_index=4000,
                        half_window=10)
    out = apply_filter(MODEL, w)
    assert (out.echo_index, out.half_window) == (4000, 10)
    assert np.all(out.samples[-100:] == 0)
    assert np.max(np.abs(out.samples)) <= np.max(np.abs(w.samples)) * (1 + 1e-12)


def test_validation():
    with pytest.raises(DomainError):
        apply_filter(MODEL, np.ones(3), carrier_offset=300.0)
    with pytest.raises(DomainError):
        apply_filter(MODEL, np.array([1.0, np.nan]))
    with pytest.warns(RuntimeWarning):
        ResonatorModel(q_factor=30.0)


def test_transformer_api():
    f = ResonatorFilter().fit()
    x = np.ones(10, dtype=complex)
    np.testing.assert_allclose(f.transform(x), apply_filter(MODEL, x))
    off = ResonatorFilter(enabled=False).fit()
    assert off.transform(x) is x
    assert f.gain(0.0) == pytest.approx(1.0)
    assert ResonatorFilter(bandwidth_fwhm=100.0).get_params()["bandwidth_fwhm"] == 100.0


def test_linear_and_time_invariant(rng):
    w1 = rng.normal(size=300) + 1j * rng.normal(size=300)
    w2 = rng.normal(size=300) + 1j * rng.normal(size=300)
    a, b = 0.7 - 0.2j, -1.3
    lhs = apply_filter(MODEL, a * w1 + b * w2, 20.0)
    rhs = a * apply_filter(MODEL, w1, 20.0) + b * apply_filter(MODEL, w2, 20.0)
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)
    k = 17
    shifted = apply_filter(MODEL, np.concatenate([np.zeros(k), w1]))
    np.testing.assert_allclose(shifted[k:], apply_filter(MODEL, w1), atol=1e-12)


def test_passband_monotone():
    f = np.linspace(0, 500, 201)
    g = np.abs(transfer(MODEL, f - 25.0, carrier_offset=25.0))
    assert np.all(np.diff(g) < 0)


def test_energy_never_amplified(rng):
    for _ in range(5):
        w = rng.normal(size=1000) + 1j * rng.normal(size=1000)
        out = apply_filter(MODEL, w, rng.uniform(-100, 100))
        assert np.sqrt(np.mean(np.abs(out) ** 2)) <= np.sqrt(np.mean(np.abs(w) ** 2))
