"""Builders for BB1 composite rotations and the echo / nutation programs.

All builders return :class:`~esrpulse.pulses.PulseSequence` objects made of
rectangular pulses, except :func:`comb_echo_sequence`, which uses Gaussian
comb pulses.  Segment labels identify roles: ``"bb1-correction"`` for the
three correcting pulses of a BB1 block, ``"target"`` for the rotation a block
implements, ``"refocus"`` for the refocusing block.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Mapping, Sequence

import numpy as np

from . import su2
from ._validation import ConfigError, DomainError, check_finite, check_positive
from .pulses import (Acquire, CombPulse, Delay, PulseSegment, PulseSequence, comb_superpose,
                     gaussian_pulse, inject_amplitude_error, rect_pulse)

FOUR_PI = 4 * math.pi
ERROR_SCOPES = ("global", "target-only")


@dataclass(frozen=True)
class Bb1Angles:
    theta: float
    phi1: float
    phi2: float

    @classmethod
    def for_angle(cls, theta: float) -> "Bb1Angles":
        check_finite("theta", theta)
        if abs(theta) > FOUR_PI:
            raise DomainError(f"BB1 needs |theta| <= 4*pi, got {theta!r}")
        phi1 = math.acos(-theta / FOUR_PI)
        return cls(theta, phi1, 3 * phi1)


def bb1(theta: float, rabi: float, *, label: str = "target") -> PulseSequence:
    """BB1 block ``[pi]_phi1 - [2pi]_phi2 - [pi]_phi1 - [theta]_0``.

    The three correction pulses run at the same Rabi frequency as the
    target rotation with no gaps.  ``theta = 0`` leaves only the correction
    pulses, which compose to the identity.
    """
    if not 0 <= theta <= FOUR_PI:
        raise DomainError(f"bb1 theta must lie in [0, 4*pi], got {theta!r}")
    ang = Bb1Angles.for_angle(theta)
    corr = "bb1-correction"
    elements = [
        rect_pulse(math.pi, ang.phi1, rabi, label=corr),
        rect_pulse(2 * math.pi, ang.phi2, rabi, label=corr),
        rect_pulse(math.pi, ang.phi1, rabi, label=corr),
    ]
    if theta > 0:
        elements.append(rect_pulse(theta, 0.0, rabi, label=label))
    return PulseSequence(elements)


def _check_tau(tau: float) -> None:
    check_finite("tau", tau)
    if tau <= 0:
        raise DomainError(f"tau must be > 0, got {tau!r}")


def echo_sequence(rabi: float, tau: float, *, half_window: float = 100.0) -> PulseSequence:
    """Plain spin echo ``[pi/2]_0 - tau - [pi]_0 - tau - acquire``."""
    _check_tau(tau)
    return PulseSequence([
        rect_pulse(math.pi / 2, 0.0, rabi, label="target"),
        Delay(tau),
        rect_pulse(math.pi, 0.0, rabi, label="refocus"),
        Delay(tau),
        Acquire(half_window),
    ])


def _apply_scope(seq: PulseSequence, sigma: float, scope: str) -> PulseSequence:
    if scope not in ERROR_SCOPES:
        raise DomainError(f"error scope must be one of {ERROR_SCOPES}, got {scope!r}")
    if sigma == 0:
        return seq
    # target-only scales the first "target"-labelled pulse: the pi/2.
    if scope == "target-only":
        first = next(i for i, e in enumerate(seq) if getattr(e, "label", "") == "target")
        return inject_amplitude_error(seq, sigma, [first])
    return inject_amplitude_error(seq, sigma)


def plain_echo_sequence(rabi: float, tau: float, sigma: float = 0.0, *,
                        error_scope: str = "global",
                        half_window: float = 100.0) -> PulseSequence:
    """Echo with amplitude error ``sigma`` on the pi/2 only or on every pulse."""
    return _apply_scope(echo_sequence(rabi, tau, half_window=half_window), sigma, error_scope)


def bb1_echo_sequence(rabi: float, tau: float, sigma: float = 0.0, *,
                      error_scope: str = "global",
                      half_window: float = 100.0) -> PulseSequence:
    """``BB1([pi/2]_0) - tau - BB1([pi]_0) - tau - acquire`` with error ``sigma``.

    ``error_scope="global"`` scales every pulse by ``1 + sigma`` (the drive
    amplitude is what varies); ``"target-only"`` scales only the final
    ``pi/2`` segment of the first block.
    """
    _check_tau(tau)
    seq = (bb1(math.pi / 2, rabi) + [Delay(tau)] + bb1(math.pi, rabi, label="refocus")
           + [Delay(tau), Acquire(half_window)])
    return _apply_scope(seq, sigma, error_scope)


def split_total_angle(total: float) -> tuple[float, int]:
    """Split a nutation angle into ``(theta, n_pad)`` with ``theta`` in [0, 4pi]."""
    check_finite("angle", total)
    if total < 0:
        raise DomainError(f"nutation angle must be >= 0, got {total!r}")
    if total <= FOUR_PI:
        return total, 0
    n_pad = math.ceil((total - FOUR_PI) / FOUR_PI - 1e-12)
    return max(0.0, total - FOUR_PI * n_pad), n_pad


def nutation_sequence(theta: float, n_pad: int, rabi: float, tau: float, use_bb1: bool = True,
                      *, half_window: float = 100.0) -> PulseSequence:
    """Nutation by ``theta + 4*pi*n_pad`` followed by an echo readout.

    BB1 variant: ``BB1(theta) - BB1(4pi)^n_pad - tau - BB1(pi) - tau``.
    Plain variant: the same with every BB1 block replaced by its bare
    rotation.  A zero ``theta`` block is omitted entirely, so
    ``(4pi, 0)`` and ``(0, 1)`` compile to the same waveform.
    """
    if not 0 <= theta <= FOUR_PI:
        raise DomainError(f"nutation theta must lie in [0, 4*pi], got {theta!r}")
    if n_pad < 0:
        raise DomainError(f"n_pad must be >= 0, got {n_pad!r}")
    _check_tau(tau)
    check_positive("rabi", rabi)

    def block(angle, label):
        if use_bb1:
            return list(bb1(angle, rabi, label=label))
        return [rect_pulse(angle, 0.0, rabi, label=label)]

    elements: list = []
    if theta > 0:
        elements += block(theta, "target")
    for _ in range(n_pad):
        elements += block(FOUR_PI, "pad")
    elements += [Delay(tau), *block(math.pi, "refocus"), Delay(tau), Acquire(half_window)]
    return PulseSequence(elements)


def comb_echo_sequence(offsets: Sequence[float], rabi: float, tau: float, *,
                       fwhm_90: float | None = None, fwhm_180: float | None = None,
                       truncation: float = 3.0, half_window: float = 100.0) -> PulseSequence:
    """Gaussian (comb) echo with pulse centers ``tau`` apart.

    Both the pi/2 and the pi pulse are superposed at every offset.  Unlike
    the rectangular builders, ``tau`` here is measured center to center and
    the marker sits ``tau`` after the refocusing pulse center, which is
    where shaped pulses refocus.
    """
    _check_tau(tau)
    p90 = gaussian_pulse(math.pi / 2, 0.0, rabi, fwhm=fwhm_90, truncation=truncation,
                         label="target")
    p180 = gaussian_pulse(math.pi, 0.0, rabi, fwhm=fwhm_180, truncation=truncation,
                          label="refocus")
    gap = tau - (p90.duration + p180.duration) / 2
    if gap < 0:
        raise DomainError(f"tau={tau} ns is shorter than the overlapping Gaussian pulses")
    return PulseSequence([
        comb_superpose(p90, offsets),
        Delay(gap),
        comb_superpose(p180, offsets),
        Delay(tau - p180.duration / 2),
        Acquire(half_window),
    ])


def ideal_unitary(seq: PulseSequence, detuning: float = 0.0, b1_scale: float = 1.0) -> np.ndarray:
    """Exact propagator of a sequence of rectangular single-tone pulses.

    Delays precess at ``detuning``; :class:`Acquire` markers are ignored.
    Shaped and comb pulses are rejected, use the time-domain simulator.
    """
    from .pulses import Rectangular

    steps = []
    for e in seq:
        if isinstance(e, PulseSegment) and isinstance(e.envelope, Rectangular):
            if e.offset_freq != 0:
                raise DomainError("ideal_unitary handles on-carrier pulses only")
            amp = e.peak_rabi * e.amplitude_scale * b1_scale
            steps.append(su2.field_unitary(amp * math.cos(e.phase), amp * math.sin(e.phase),
                                           detuning, e.duration))
        elif isinstance(e, Delay):
            steps.append(su2.field_unitary(0.0, 0.0, detuning, e.duration))
        elif isinstance(e, Acquire):
            continue
        else:
            raise DomainError(f"ideal_unitary cannot handle {type(e).__name__}")
    return su2.compose(steps) if steps else su2.IDENTITY.copy()


def ideal_bb1_unitary(theta: float, sigma: float = 0.0) -> np.ndarray:
    """Instantaneous-rotation propagator of BB1(theta) with every angle scaled by 1+sigma."""
    ang = Bb1Angles.for_angle(theta)
    s = 1.0 + sigma
    return su2.compose([
        su2.rotation_unitary(math.pi * s, ang.phi1),
        su2.rotation_unitary(2 * math.pi * s, ang.phi2),
        su2.rotation_unitary(math.pi * s, ang.phi1),
        su2.rotation_unitary(theta * s, 0.0),
    ])


# Names usable from configs and the command line.
SEQUENCE_BUILDERS = ("echo", "bb1-echo", "nutation", "comb-echo", "rect", "gaussian", "bb1")


def build_named(name: str, *, theta: float = math.pi / 2, sigma: float = 0.0, tau: float = 300.0,
                rabi: float = 38.46, n_pad: int = 0, use_bb1: bool = True,
                offsets: Sequence[float] = (0.0,), error_scope: str = "global",
                phase: float = 0.0, fwhm: float | None = None, fwhm_90: float | None = None,
                fwhm_180: float | None = None, half_window: float = 100.0) -> PulseSequence:
    """Build one of :data:`SEQUENCE_BUILDERS` from flat numeric parameters."""
    if name == "echo":
        return plain_echo_sequence(rabi, tau, sigma, error_scope=error_scope,
                                   half_window=half_window)
    if name == "bb1-echo":
        return bb1_echo_sequence(rabi, tau, sigma, error_scope=error_scope,
                                 half_window=half_window)
    if name == "nutation":
        seq = nutation_sequence(theta, n_pad, rabi, tau, use_bb1, half_window=half_window)
        return inject_amplitude_error(seq, sigma) if sigma else seq
    if name == "comb-echo":
        return comb_echo_sequence(offsets, rabi, tau, fwhm_90=fwhm_90, fwhm_180=fwhm_180,
                                  half_window=half_window)
    if name == "rect":
        return inject_amplitude_error(PulseSequence([rect_pulse(theta, phase, rabi)]), sigma)
    if name == "gaussian":
        p = gaussian_pulse(theta, phase, rabi, fwhm=fwhm)
        el = comb_superpose(p, offsets) if tuple(offsets) != (0.0,) else p
        return inject_amplitude_error(PulseSequence([el]), sigma)
    if name == "bb1":
        return inject_amplitude_error(bb1(theta, rabi), sigma)
    raise ConfigError(f"unknown sequence {name!r}; choose from {', '.join(SEQUENCE_BUILDERS)}")


_ELEMENT_KEYS = {
    "rect": {"theta", "phase", "rabi", "offset", "sigma", "label"},
    "gaussian": {"theta", "phase", "rabi", "fwhm", "truncation", "offset", "offsets", "sigma",
                 "label"},
    "bb1": {"theta", "rabi", "sigma"},
    "delay": {"duration"},
    "acquire": {"half_window"},
}


def sequence_from_config(items: Sequence[Mapping[str, Any]]) -> PulseSequence:
    """Build a sequence from a list of ``{type: ..., field: value}`` mappings.

    Types: ``rect``, ``gaussian`` (``offsets`` makes it a comb), ``bb1``,
    ``delay``, ``acquire``.  Optional ``sigma`` scales a pulse's amplitude.
    """
    elements: list = []
    for n, raw in enumerate(items):
        item = dict(raw)
        kind = item.pop("type", None)
        if kind not in _ELEMENT_KEYS:
            raise ConfigError(f"sequence item {n}: unknown type {kind!r}")
        unknown = set(item) - _ELEMENT_KEYS[kind]
        if unknown:
            raise ConfigError(f"sequence item {n} ({kind}): unknown keys {sorted(unknown)}")
        try:
            if kind == "delay":
                elements.append(Delay(float(item["duration"])))
            elif kind == "acquire":
                elements.append(Acquire(float(item.get("half_window", 100.0))))
            elif kind == "bb1":
                block = bb1(float(item["theta"]), float(item["rabi"]))
                if item.get("sigma"):
                    block = inject_amplitude_error(block, float(item["sigma"]))
                elements.extend(block)
            else:
                theta, rabi = float(item["theta"]), float(item["rabi"])
                phase = float(item.get("phase", 0.0))
                offset = float(item.get("offset", 0.0))
                label = str(item.get("label", ""))
                if kind == "rect":
                    p: Any = rect_pulse(theta, phase, rabi, offset_freq=offset, label=label)
                else:
                    fwhm = item.get("fwhm")
                    p = gaussian_pulse(theta, phase, rabi,
                                       fwhm=None if fwhm is None else float(fwhm),
                                       truncation=float(item.get("truncation", 3.0)),
                                       offset_freq=offset, label=label)
                    if "offsets" in item:
                        p = comb_superpose(p, [float(f) for f in item["offsets"]])
                if item.get("sigma"):
                    p = p.scaled(1.0 + float(item["sigma"]))
                elements.append(p)
        except KeyError as exc:
            raise ConfigError(f"sequence item {n} ({kind}): missing key {exc}") from None
    return PulseSequence(elements)


__all__ = [
    "Bb1Angles", "CombPulse", "bb1", "bb1_echo_sequence", "build_named", "comb_echo_sequence",
    "echo_sequence", "ideal_bb1_unitary", "ideal_unitary", "nutation_sequence",
    "plain_echo_sequence", "sequence_from_config", "split_total_angle",
]
