"""Symbolic pulse programs and their compilation to baseband IQ samples.

Units: time in ns, frequencies (Rabi, offsets) in MHz, angles in rad.  A
compiled sample ``I + iQ`` is the instantaneous drive expressed as a Rabi
frequency: ``I`` drives rotations about +x and ``Q`` about +y.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable, Iterator, Sequence, Union

import numpy as np

from ._validation import DomainError, check_finite, check_positive

DT = 0.1  # ns, AWG sample period
TWO_PI = 2 * math.pi
_GAUSS_K = 4 * math.log(2)  # exp(-_GAUSS_K * t**2 / fwhm**2)
# Area of a unit-peak Gaussian divided by its FWHM: sqrt(pi / (4 ln 2)).
GAUSSIAN_AREA_PER_FWHM = math.sqrt(math.pi / _GAUSS_K)


@dataclass(frozen=True)
class Rectangular:
    duration: float

    def __post_init__(self):
        check_positive("duration", self.duration)

    @property
    def area(self) -> float:
        return self.duration

    def shape(self, n: int, dt: float) -> np.ndarray:
        return np.ones(n)


@dataclass(frozen=True)
class Gaussian:
    """Unit-peak Gaussian, truncated symmetrically to ``truncation_length``.

    The truncated envelope is rescaled so its area equals that of the full
    Gaussian; ``area`` always reports the untruncated value.
    """

    fwhm: float
    truncation_length: float

    def __post_init__(self):
        check_positive("fwhm", self.fwhm)
        if not self.truncation_length >= 2 * self.fwhm:
            raise DomainError("Gaussian truncation_length must be >= 2 * fwhm")

    @property
    def duration(self) -> float:
        return self.truncation_length

    @property
    def area(self) -> float:
        return self.fwhm * GAUSSIAN_AREA_PER_FWHM

    def shape(self, n: int, dt: float) -> np.ndarray:
        t = (np.arange(n) + 0.5) * dt - 0.5 * n * dt
        return np.exp(-_GAUSS_K * t**2 / self.fwhm**2)


Envelope = Union[Rectangular, Gaussian]


@dataclass(frozen=True)
class PulseSegment:
    """One shaped pulse ``[theta]_phase`` at a single drive offset."""

    envelope: Envelope
    peak_rabi: float
    phase: float = 0.0
    offset_freq: float = 0.0
    amplitude_scale: float = 1.0
    label: str = ""

    def __post_init__(self):
        check_finite("pulse parameters", self.peak_rabi, self.phase, self.offset_freq,
                     self.amplitude_scale)
        check_positive("peak_rabi", self.peak_rabi, allow_zero=True)
        check_positive("amplitude_scale", self.amplitude_scale, allow_zero=True)

    @property
    def duration(self) -> float:
        return self.envelope.duration

    @property
    def nominal_angle(self) -> float:
        return TWO_PI * self.peak_rabi * self.envelope.area * 1e-3

    @property
    def effective_angle(self) -> float:
        return self.nominal_angle * self.amplitude_scale

    @property
    def offsets(self) -> tuple[float, ...]:
        return (self.offset_freq,)

    def scaled(self, factor: float) -> "PulseSegment":
        return replace(self, amplitude_scale=self.amplitude_scale * factor)


@dataclass(frozen=True)
class CombPulse:
    """A base pulse superposed at several drive offsets, compiled jointly.

    Each tone reuses the base envelope, peak Rabi frequency and phase; the
    base segment's own ``offset_freq`` is ignored.
    """

    base: PulseSegment
    tone_offsets: tuple[float, ...]

    @property
    def duration(self) -> float:
        return self.base.duration

    @property
    def offsets(self) -> tuple[float, ...]:
        return self.tone_offsets

    @property
    def label(self) -> str:
        return self.base.label

    @property
    def amplitude_scale(self) -> float:
        return self.base.amplitude_scale

    @property
    def nominal_angle(self) -> float:
        return self.base.nominal_angle

    def scaled(self, factor: float) -> "CombPulse":
        return replace(self, base=self.base.scaled(factor))


@dataclass(frozen=True)
class Delay:
    duration: float

    def __post_init__(self):
        check_positive("delay", self.duration, allow_zero=True)


@dataclass(frozen=True)
class Acquire:
    """Marks the echo center; samples are recorded over +-``half_window``."""

    half_window: float = 100.0

    def __post_init__(self):
        check_positive("half_window", self.half_window, allow_zero=True)

    duration = 0.0


Pulse = Union[PulseSegment, CombPulse]
Element = Union[PulseSegment, CombPulse, Delay, Acquire]


@dataclass(frozen=True)
class PulseSequence:
    """Elements in time order."""

    elements: tuple[Element, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))

    def __iter__(self) -> Iterator[Element]:
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __getitem__(self, i):
        return self.elements[i]

    def __add__(self, other: "PulseSequence | Iterable[Element]") -> "PulseSequence":
        return PulseSequence(self.elements + tuple(other))

    @property
    def duration(self) -> float:
        return sum(e.duration for e in self.elements)

    @property
    def pulses(self) -> list[Pulse]:
        return [e for e in self.elements if isinstance(e, (PulseSegment, CombPulse))]

    @property
    def acquisition(self) -> Acquire | None:
        for e in self.elements:
            if isinstance(e, Acquire):
                return e
        return None


@dataclass(frozen=True)
class SampledWaveform:
    """Compiled IQ drive (MHz) on a uniform grid.

    ``echo_index`` is the sample-boundary index of the acquisition marker
    (echo center) and ``half_window`` the recording half-width in samples;
    both are ``None`` when the sequence has no marker.
    """

    samples: np.ndarray
    dt: float = DT
    echo_index: int | None = None
    half_window: int | None = None

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self.samples)) * self.dt

    @property
    def duration(self) -> float:
        return len(self.samples) * self.dt

    def with_samples(self, samples: np.ndarray) -> "SampledWaveform":
        return replace(self, samples=np.asarray(samples, dtype=complex))


def rect_pulse(theta: float, phi: float, rabi: float, *, offset_freq: float = 0.0,
               label: str = "") -> PulseSegment:
    """Rectangular ``[theta]_phi`` at constant Rabi frequency ``rabi``.

    >>> round(rect_pulse(math.pi, 0.0, 38.46).duration, 2)
    13.0
    """
    check_finite("theta/phi/rabi", theta, phi, rabi)
    if rabi <= 0:
        raise DomainError(f"rabi must be > 0, got {rabi!r}")
    if theta < 0:
        raise DomainError(f"theta must be >= 0, got {theta!r}")
    duration = theta / (TWO_PI * rabi) * 1e3
    if duration == 0:
        raise DomainError("zero-angle pulse has no duration")
    return PulseSegment(Rectangular(duration), rabi, phi, offset_freq, label=label)


def equal_area_fwhm(theta: float, rabi: float) -> float:
    """FWHM of the unit-peak Gaussian matching a rectangular pulse's area."""
    return theta / (TWO_PI * rabi) * 1e3 / GAUSSIAN_AREA_PER_FWHM


def gaussian_pulse(theta: float, phi: float, rabi: float, *, fwhm: float | None = None,
                   truncation: float = 3.0, offset_freq: float = 0.0,
                   label: str = "") -> PulseSegment:
    """Gaussian ``[theta]_phi`` with the same area as the rectangular pulse.

    The peak always equals ``rabi``.  With ``fwhm=None`` the FWHM follows
    from equal area; an explicit ``fwhm`` (a calibrated value) is used as
    given, and the rotation angle is whatever that area implies.  The pulse
    is truncated at ``truncation * fwhm``.
    """
    check_finite("theta/phi/rabi", theta, phi, rabi)
    if rabi <= 0:
        raise DomainError(f"rabi must be > 0, got {rabi!r}")
    if theta <= 0:
        raise DomainError(f"theta must be > 0, got {theta!r}")
    if fwhm is None:
        fwhm = equal_area_fwhm(theta, rabi)
    check_positive("fwhm", fwhm)
    return PulseSegment(Gaussian(fwhm, truncation * fwhm), rabi, phi, offset_freq, label=label)


def comb_superpose(base: PulseSegment, offsets: Sequence[float]) -> CombPulse:
    """Superpose copies of ``base`` at each drive offset (MHz)."""
    offsets = tuple(float(f) for f in offsets)
    if not offsets:
        raise DomainError("comb needs at least one offset")
    check_finite("offsets", *offsets)
    if len(set(offsets)) != len(offsets):
        raise DomainError(f"comb offsets must be distinct, got {offsets}")
    return CombPulse(base, offsets)


Selector = Union[None, str, Iterable[int], Callable[[int, Element], bool]]


def _selected(selector: Selector, seq: PulseSequence) -> set[int]:
    pulse_idx = [i for i, e in enumerate(seq) if isinstance(e, (PulseSegment, CombPulse))]
    if selector is None or selector == "all":
        return set(pulse_idx)
    if isinstance(selector, str):
        return {i for i in pulse_idx if seq[i].label == selector}
    if callable(selector):
        return {i for i in pulse_idx if selector(i, seq[i])}
    chosen = set(int(i) for i in selector)
    bad = chosen - set(pulse_idx)
    if bad:
        raise DomainError(f"selector indices {sorted(bad)} are not pulses")
    return chosen


def inject_amplitude_error(seq: PulseSequence, sigma: float,
                           selector: Selector = None) -> PulseSequence:
    """Scale the amplitude of selected pulses by ``1 + sigma``.

    ``selector`` may be ``None``/``"all"`` (every pulse), a segment label,
    an iterable of element indices, or a predicate ``f(index, element)``.
    Durations are left unchanged.
    """
    check_finite("sigma", sigma)
    if sigma <= -1:
        raise DomainError(f"sigma must be > -1, got {sigma!r}")
    chosen = _selected(selector, seq)
    factor = 1.0 + sigma
    return PulseSequence(e.scaled(factor) if i in chosen else e for i, e in enumerate(seq))


def _n_samples(duration: float, dt: float) -> int:
    return max(1, int(round(duration / dt)))


def _pulse_samples(pulse: Pulse, start: int, dt: float) -> np.ndarray:
    seg = pulse.base if isinstance(pulse, CombPulse) else pulse
    n = _n_samples(seg.duration, dt)
    shape = seg.envelope.shape(n, dt)
    # Rescale so the sampled area reproduces the nominal angle exactly.
    shape = shape * (seg.envelope.area / (dt * shape.sum()))
    amp = seg.peak_rabi * seg.amplitude_scale * shape
    t = (start + np.arange(n) + 0.5) * dt * 1e-3  # us, absolute
    carrier = np.zeros(n, dtype=complex)
    for f in pulse.offsets:
        if f == 0.0:
            carrier += np.exp(1j * seg.phase)
        else:
            carrier += np.exp(1j * (TWO_PI * f * t + seg.phase))
    return amp * carrier


def compile_sequence(seq: PulseSequence | Iterable[Element], dt: float = DT) -> SampledWaveform:
    """Concatenate pulses and delays on the ``dt`` grid.

    Each element occupies ``round(duration / dt)`` samples (at least one for
    a pulse); pulse amplitudes are rescaled so the sampled area equals the
    nominal area.  Tone phases run continuously in absolute time from the
    start of the sequence.  An :class:`Acquire` marker appends
    ``half_window`` of zero drive so the full window can be recorded.
    """
    if not isinstance(seq, PulseSequence):
        seq = PulseSequence(tuple(seq))
    if len(seq) == 0:
        raise DomainError("cannot compile an empty sequence")
    check_positive("dt", dt)
    chunks: list[np.ndarray] = []
    pos = 0
    echo_index = half = None
    for e in seq:
        if isinstance(e, (PulseSegment, CombPulse)):
            s = _pulse_samples(e, pos, dt)
        elif isinstance(e, Delay):
            s = np.zeros(int(round(e.duration / dt)), dtype=complex)
        elif isinstance(e, Acquire):
            if echo_index is not None:
                raise DomainError("sequence has more than one acquisition marker")
            echo_index = pos
            half = int(round(e.half_window / dt))
            continue
        else:
            raise DomainError(f"unknown sequence element {e!r}")
        chunks.append(s)
        pos += len(s)
    if echo_index is not None:
        tail = echo_index + half - pos
        if tail > 0:
            chunks.append(np.zeros(tail, dtype=complex))
    samples = np.concatenate(chunks) if chunks else np.zeros(0, dtype=complex)
    return SampledWaveform(samples, dt, echo_index, half)


def write_waveform(w: SampledWaveform, path: str | Path) -> Path:
    """Write ``time_ns  I_MHz  Q_MHz`` tab-separated lines, 6 significant digits."""
    path = Path(path)
    lines = [f"{k * w.dt:.6g}\t{s.real:.6g}\t{s.imag:.6g}\n" for k, s in enumerate(w.samples)]
    path.write_text("".join(lines))
    return path


def read_waveform(path: str | Path) -> SampledWaveform:
    data = np.loadtxt(path, ndmin=2)
    if data.shape[1] != 3:
        raise DomainError("waveform file must have three columns")
    dt = float(data[1, 0] - data[0, 0]) if len(data) > 1 else DT
    return SampledWaveform(data[:, 1] + 1j * data[:, 2], round(dt, 9))
