import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.linalg import expm

from esrpulse import su2
from esrpulse._validation import ConfigError, DomainError
from esrpulse.composite import (Bb1Angles, bb1, bb1_echo_sequence, build_named,
                                comb_echo_sequence, echo_sequence, ideal_bb1_unitary,
                                ideal_unitary, nutation_sequence, plain_echo_sequence,
                                sequence_from_config, split_total_angle)
from esrpulse.pulses import Acquire, CombPulse, Delay, compile_sequence, rect_pulse


def _expm_rotation(theta, phi):
    return expm(-0.5j * theta * (math.cos(phi) * su2.SIGMA_X + math.sin(phi) * su2.SIGMA_Y))


def test_bb1_phases_half_pi():
    a = Bb1Angles.for_angle(math.pi / 2)
    assert a.phi1 / math.pi == pytest.approx(0.5398930, abs=1e-6)
    assert a.phi2 / math.pi == pytest.approx(1.6196790, abs=1e-6)


@pytest.mark.parametrize("theta", [math.pi / 4, math.pi / 2, math.pi, 2 * math.pi, 4 * math.pi])
def test_bb1_is_target_rotation_when_error_free(theta):
    u = ideal_unitary(bb1(theta, 38.46))
    assert su2.gate_infidelity(u, su2.rotation_unitary(theta, 0)) < 1e-12


@given(st.floats(0.05, 4 * math.pi), st.floats(-0.3, 0.3))
def test_ideal_bb1_matches_expm_oracle(theta, sigma):
    a = Bb1Angles.for_angle(theta)
    s = 1 + sigma
    oracle = (_expm_rotation(theta * s, 0) @ _expm_rotation(math.pi * s, a.phi1)
              @ _expm_rotation(2 * math.pi * s, a.phi2) @ _expm_rotation(math.pi * s, a.phi1))
    np.testing.assert_allclose(ideal_bb1_unitary(theta, sigma), oracle, atol=1e-11)


def test_time_domain_bb1_matches_instantaneous_with_amplitude_error():
    from esrpulse.pulses import inject_amplitude_error
    seq = inject_amplitude_error(bb1(math.pi / 2, 38.46), 0.1)
    assert su2.gate_infidelity(ideal_unitary(seq), ideal_bb1_unitary(math.pi / 2, 0.1)) < 1e-13


def _slope(infid):
    sig = np.logspace(-3, -2, 9)
    return np.polyfit(np.log(sig), np.log([infid(s) for s in sig]), 1)[0]


@pytest.mark.parametrize("theta", [math.pi / 2, math.pi])
def test_amplitude_error_scaling(theta):
    target = su2.rotation_unitary(theta, 0)
    plain = _slope(lambda s: su2.gate_infidelity(su2.rotation_unitary(theta * (1 + s), 0), target))
    comp = _slope(lambda s: su2.gate_infidelity(ideal_bb1_unitary(theta, s), target))
    assert plain == pytest.approx(2.0, abs=0.1)
    assert comp == pytest.approx(6.0, abs=0.3)


def test_bb1_leaves_detuning_errors_uncorrected():
    # off resonance both variants degrade at second order
    for seq_fn in (lambda: bb1(math.pi / 2, 38.46),
                   lambda: [c for c in bb1(math.pi / 2, 38.46) if c.label == "target"]):
        from esrpulse.pulses import PulseSequence
        seq = PulseSequence(seq_fn())
        target = su2.rotation_unitary(math.pi / 2, 0)
        slope = _slope(lambda f: su2.gate_infidelity(ideal_unitary(seq, detuning=38.46 * f),
                                                     target))
        assert slope == pytest.approx(2.0, abs=0.2)


def test_bb1_zero_angle_omits_target_and_is_identity():
    seq = bb1(0.0, 38.46)
    assert len(seq) == 3
    assert su2.gate_infidelity(ideal_unitary(seq), su2.IDENTITY) < 1e-12
    with pytest.raises(DomainError):
        bb1(5 * math.pi, 38.46)


def test_bb1_half_pi_waveform_length():
    assert len(compile_sequence(bb1(math.pi / 2, 38.46))) == 585


def test_echo_layout():
    seq = echo_sequence(38.46, 300.0)
    assert [type(e) for e in seq][1::2] == [Delay, Delay]
    assert isinstance(seq[-1], Acquire)
    w = compile_sequence(seq)
    assert w.echo_index == 65 + 3000 + 130 + 3000


def test_error_scopes():
    g = bb1_echo_sequence(38.46, 300.0, 0.2)
    assert all(p.amplitude_scale == 1.2 for p in g.pulses)
    t = bb1_echo_sequence(38.46, 300.0, 0.2, error_scope="target-only")
    assert [p.amplitude_scale for p in t.pulses].count(1.2) == 1
    assert t.pulses[3].amplitude_scale == 1.2
    p = plain_echo_sequence(38.46, 300.0, 0.2, error_scope="target-only")
    assert [q.amplitude_scale for q in p.pulses] == [1.2, 1.0]
    with pytest.raises(DomainError):
        plain_echo_sequence(38.46, 300.0, 0.2, error_scope="some")


def test_single_spin_target_only_echo():
    # on resonance the echo after [pi/2(1+s)] - [pi] is sin((1+s) pi/2)
    for s in (-0.4, -0.1, 0.3):
        seq = plain_echo_sequence(38.46, 300.0, s, error_scope="target-only")
        m = su2.apply_to_bloch(ideal_unitary(seq), [0, 0, 1])
        assert math.hypot(m[0], m[1]) == pytest.approx(math.sin((1 + s) * math.pi / 2), abs=1e-12)


@pytest.mark.parametrize("total,expected", [
    (0.0, (0.0, 0)), (math.pi, (math.pi, 0)), (4 * math.pi, (4 * math.pi, 0)),
    (5 * math.pi, (math.pi, 1)), (8 * math.pi, (4 * math.pi, 1)),
])
def test_split_total_angle(total, expected):
    theta, n = split_total_angle(total)
    assert theta == pytest.approx(expected[0])
    assert n == expected[1]


def test_nutation_rotation_equivalence():
    for use_bb1 in (True, False):
        a = compile_sequence(nutation_sequence(4 * math.pi, 0, 38.46, 300.0, use_bb1))
        b = compile_sequence(nutation_sequence(0.0, 1, 38.46, 300.0, use_bb1))
        np.testing.assert_array_equal(a.samples, b.samples)
    seq = nutation_sequence(math.pi, 1, 38.46, 300.0, False)
    pre = [e for e in seq][:2]
    total = su2.compose([su2.rotation_unitary(e.effective_angle, 0) for e in pre])
    assert su2.gate_infidelity(total, su2.rotation_unitary(5 * math.pi, 0)) < 1e-12


def test_comb_echo_timing():
    seq = comb_echo_sequence([-10.0, 0.0, 10.0], 1.16, 1200.0, fwhm_90=203.0, fwhm_180=401.7)
    assert isinstance(seq[0], CombPulse) and isinstance(seq[2], CombPulse)
    c90 = seq[0].duration / 2
    c180 = seq[0].duration + seq[1].duration + seq[2].duration / 2
    echo = sum(e.duration for e in seq)
    assert c180 - c90 == pytest.approx(1200.0)
    assert echo - c180 == pytest.approx(1200.0)
    with pytest.raises(DomainError):
        comb_echo_sequence([0.0], 1.16, 100.0, fwhm_90=203.0, fwhm_180=401.7)


def test_build_named_and_config():
    for name in ("echo", "bb1-echo", "nutation", "rect", "gaussian", "bb1"):
        assert len(build_named(name, theta=math.pi)) >= 1
    assert len(build_named("comb-echo", rabi=1.16, tau=1200.0, offsets=(0.0, 10.0))) == 5
    with pytest.raises(ConfigError):
        build_named("nope")
    seq = sequence_from_config([
        {"type": "rect", "theta": math.pi / 2, "rabi": 38.46},
        {"type": "delay", "duration": 300},
        {"type": "bb1", "theta": math.pi, "rabi": 38.46, "sigma": 0.1},
        {"type": "gaussian", "theta": math.pi, "rabi": 1.16, "offsets": [0, 10]},
        {"type": "acquire", "half_window": 50},
    ])
    assert len(seq) == 8
    assert seq[2].amplitude_scale == pytest.approx(1.1)
    with pytest.raises(ConfigError):
        sequence_from_config([{"type": "rect", "theta": 1.0}])
    with pytest.raises(ConfigError):
        sequence_from_config([{"type": "rect", "theta": 1.0, "rabi": 1.0, "bogus": 1}])
    with pytest.raises(ConfigError):
        sequence_from_config([{"type": "triangle"}])


@given(st.floats(0, 4 * math.pi))
def test_phase_formula_round_trip(theta):
    assert math.cos(Bb1Angles.for_angle(theta).phi1) * 4 * math.pi == pytest.approx(-theta,
                                                                                   abs=1e-12)


def test_error_free_equivalence_non_trivial_angle():
    theta = 7 * math.pi / 3
    u = ideal_unitary(bb1(theta, 38.46))
    assert su2.gate_infidelity(u, su2.rotation_unitary(theta, 0)) < 1e-10


@pytest.mark.parametrize("theta", [math.pi / 4, math.pi / 2, math.pi, 7 * math.pi / 3])
def test_bb1_offers_no_first_order_detuning_correction(theta):
    from esrpulse.pulses import PulseSequence
    target = su2.rotation_unitary(theta, 0)
    plain = PulseSequence([rect_pulse(theta, 0, 38.46)])
    for x in (1e-3, 1e-2):
        b = su2.gate_infidelity(ideal_unitary(bb1(theta, 38.46), detuning=38.46 * x), target)
        p = su2.gate_infidelity(ideal_unitary(plain, detuning=38.46 * x), target)
        assert b / p == pytest.approx(1.0, abs=2e-3)
