"""Rotating-frame Bloch simulation of an inhomogeneously broadened ensemble.

Each packet obeys

    dm/dt = 2*pi * (b1_scale*I(t), b1_scale*Q(t), detuning) x m  - relaxation

with transverse decay at ``1/t2`` and recovery of ``mz`` towards +1 at
``1/t1``.  Over every sample the drive is constant, so a step is an exact
rotation sandwiched between two exact half-step relaxations.  Runs of zero
drive are advanced in one closed-form step, which equals the product of
the per-sample steps because z-precession and relaxation commute.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Iterator, Sequence, Union

import numba
import numpy as np
from scipy import stats

from ._validation import DomainError, check_positive
from .composite import nutation_sequence, split_total_angle
from .pulses import DT, PulseSequence, SampledWaveform, compile_sequence

MIN_PACKETS = 11
RAD_PER_NS = 2 * math.pi * 1e-3  # MHz * ns -> cycles


@dataclass(frozen=True)
class GaussianLine:
    fwhm: float

    def __post_init__(self):
        check_positive("fwhm", self.fwhm)

    @property
    def span(self) -> float:
        return 3 * self.fwhm

    def pdf(self, x: np.ndarray) -> np.ndarray:
        return stats.norm.pdf(x, scale=self.fwhm / (2 * math.sqrt(2 * math.log(2))))

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.normal(0.0, self.fwhm / (2 * math.sqrt(2 * math.log(2))), n)


@dataclass(frozen=True)
class LorentzianLine:
    fwhm: float

    def __post_init__(self):
        check_positive("fwhm", self.fwhm)

    @property
    def span(self) -> float:
        return 8 * self.fwhm

    def pdf(self, x: np.ndarray) -> np.ndarray:
        return stats.cauchy.pdf(x, scale=self.fwhm / 2)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        # Truncated to the same +-8 FWHM span as the quadrature grid.
        out = stats.cauchy.rvs(scale=self.fwhm / 2, size=4 * n + 16, random_state=rng)
        return out[np.abs(out) <= self.span][:n]


@dataclass(frozen=True)
class TabulatedLine:
    detunings: tuple[float, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "detunings", tuple(float(d) for d in self.detunings))
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if not self.detunings or len(self.detunings) != len(self.weights):
            raise DomainError("tabulated lineshape needs matching, nonempty detunings/weights")
        if min(self.weights) < 0 or sum(self.weights) <= 0:
            raise DomainError("tabulated weights must be >= 0 with a positive sum")


@dataclass(frozen=True)
class DeltaB1:
    """Every packet sees the nominal drive."""


@dataclass(frozen=True)
class GaussianB1:
    relative_sd: float
    n_points: int = 21

    def __post_init__(self):
        check_positive("relative_sd", self.relative_sd, allow_zero=True)
        if self.n_points < 1:
            raise DomainError("n_points must be >= 1")


Lineshape = Union[GaussianLine, LorentzianLine, TabulatedLine]
B1Distribution = Union[DeltaB1, GaussianB1]


@dataclass(frozen=True)
class EnsembleSpec:
    lineshape: Lineshape = GaussianLine(9.35)
    n_packets: int = 2001
    b1_distribution: B1Distribution = DeltaB1()
    t1: float = 1e6
    t2: float = 200.0
    sampling: str = "quadrature"
    seed: int = 0
    driven_relaxation: bool = True

    def __post_init__(self):
        if self.n_packets < 1:
            raise DomainError("n_packets must be >= 1")
        check_positive("t1", self.t1)
        check_positive("t2", self.t2)
        if 2 * self.t1 < self.t2:
            raise DomainError("relaxation requires 2*t1 >= t2")
        if self.sampling not in ("quadrature", "random"):
            raise DomainError(f"sampling must be 'quadrature' or 'random', got {self.sampling!r}")


@dataclass(frozen=True)
class SpinPacket:
    detuning: float
    b1_scale: float = 1.0
    weight: float = 1.0
    t1: float = math.inf
    t2: float = math.inf

    def __post_init__(self):
        if self.weight < 0:
            raise DomainError("packet weight must be >= 0")
        check_positive("t1", self.t1)
        check_positive("t2", self.t2)
        if 2 * self.t1 < self.t2:
            raise DomainError("relaxation requires 2*t1 >= t2")


def _normalized(w: np.ndarray) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    return w / w.sum()


@dataclass(frozen=True)
class Ensemble:
    """Packets stored column-wise; iterating yields :class:`SpinPacket`."""

    detuning: np.ndarray
    b1_scale: np.ndarray
    weight: np.ndarray
    t1: np.ndarray
    t2: np.ndarray
    driven_relaxation: bool = True

    @classmethod
    def from_packets(cls, packets: Sequence[SpinPacket]) -> "Ensemble":
        packets = list(packets)
        if not packets:
            raise DomainError("ensemble needs at least one packet")
        col = lambda name: np.array([getattr(p, name) for p in packets], dtype=float)
        return cls(col("detuning"), col("b1_scale"), _normalized(col("weight")),
                   col("t1"), col("t2"))

    def __len__(self) -> int:
        return len(self.detuning)

    def __iter__(self) -> Iterator[SpinPacket]:
        for i in range(len(self)):
            yield SpinPacket(self.detuning[i], self.b1_scale[i], self.weight[i],
                             self.t1[i], self.t2[i])

    def __getitem__(self, i: int) -> SpinPacket:
        return SpinPacket(self.detuning[i], self.b1_scale[i], self.weight[i],
                          self.t1[i], self.t2[i])

    def shifted(self, offset: float) -> "Ensemble":
        """Uniformly shift every detuning (a field sweep step)."""
        return replace(self, detuning=self.detuning + offset, weight=_normalized(self.weight))


def _grid(span: float, n: int) -> np.ndarray:
    return np.linspace(-span, span, n) if n > 1 else np.zeros(1)


def build_ensemble(spec: EnsembleSpec) -> Ensemble:
    """Discretize ``spec`` into weighted packets.

    Quadrature mode: equally spaced detunings over +-3 FWHM (Gaussian) or
    +-8 FWHM (Lorentzian) with weights proportional to the density; a
    Gaussian B1 spread adds a second grid (tensor product, same rule).
    Random mode draws ``n_packets`` (detuning, B1) pairs with equal weights
    from a generator seeded by ``spec.seed``.
    """
    line = spec.lineshape
    b1 = spec.b1_distribution
    if not isinstance(line, TabulatedLine) and spec.n_packets < MIN_PACKETS:
        warnings.warn(f"{spec.n_packets} packets cannot resolve the line; use >= {MIN_PACKETS}",
                      RuntimeWarning, stacklevel=2)

    if spec.sampling == "random" and not isinstance(line, TabulatedLine):
        rng = np.random.default_rng(spec.seed)
        det = line.sample(rng, spec.n_packets)
        if isinstance(b1, GaussianB1):
            scale = np.clip(1.0 + b1.relative_sd * rng.standard_normal(len(det)), 0.0, None)
        else:
            scale = np.ones(len(det))
        w = np.full(len(det), 1.0 / len(det))
    else:
        if isinstance(line, TabulatedLine):
            det0 = np.array(line.detunings)
            w0 = np.array(line.weights)
        else:
            det0 = _grid(line.span, spec.n_packets)
            w0 = line.pdf(det0) if len(det0) > 1 else np.ones(1)
        if isinstance(b1, GaussianB1) and b1.relative_sd > 0 and b1.n_points > 1:
            b1_line = GaussianLine(2 * math.sqrt(2 * math.log(2)) * b1.relative_sd)
            offs = _grid(b1_line.span, b1.n_points)
            keep = offs > -1.0
            offs = offs[keep]
            bw = b1_line.pdf(offs)
            det = np.repeat(det0, len(offs))
            scale = np.tile(1.0 + offs, len(det0))
            w = np.repeat(w0, len(offs)) * np.tile(bw, len(det0))
        else:
            det, scale, w = det0, np.ones(len(det0)), w0
    n = len(det)
    return Ensemble(det.astype(float), scale.astype(float), _normalized(w),
                    np.full(n, float(spec.t1)), np.full(n, float(spec.t2)),
                    spec.driven_relaxation)


# --------------------------------------------------------------------------
# numba kernels

@numba.njit(cache=True, inline="always")
def _relax(mx, my, mz, e2, e1):
    return mx * e2, my * e2, 1.0 + (mz - 1.0) * e1


@numba.njit(cache=True, inline="always")
def _rotate(mx, my, mz, wx, wy, wz, dt):
    w = math.sqrt(wx * wx + wy * wy + wz * wz)
    if w == 0.0:
        return mx, my, mz
    a = w * dt
    nx, ny, nz = wx / w, wy / w, wz / w
    c = math.cos(a)
    s = math.sin(a)
    dot = (nx * mx + ny * my + nz * mz) * (1.0 - c)
    # Rodrigues: m c + (n x m) s + n (n.m)(1 - c)
    return (mx * c + (ny * mz - nz * my) * s + nx * dot,
            my * c + (nz * mx - nx * mz) * s + ny * dot,
            mz * c + (nx * my - ny * mx) * s + nz * dot)


@numba.njit(cache=True, inline="always")
def _free(mx, my, mz, wz, t, t1, t2):
    a = wz * t
    c = math.cos(a)
    s = math.sin(a)
    e2 = math.exp(-t / t2)
    e1 = math.exp(-t / t1)
    return (mx * c - my * s) * e2, (mx * s + my * c) * e2, 1.0 + (mz - 1.0) * e1


@numba.njit(cache=True, inline="always")
def _driven(mx, my, mz, wx, wy, wz, dt, e2h, e1h):
    mx, my, mz = _relax(mx, my, mz, e2h, e1h)
    mx, my, mz = _rotate(mx, my, mz, wx, wy, wz, dt)
    return _relax(mx, my, mz, e2h, e1h)


@numba.njit(cache=True)
def _trajectory(re, im, dt, det, b1, t1, t2, m0, driven_relax):
    n = len(re)
    out = np.empty((n + 1, 3))
    mx, my, mz = m0[0], m0[1], m0[2]
    out[0, 0], out[0, 1], out[0, 2] = mx, my, mz
    wz = RAD_PER_NS * det
    e2h = math.exp(-0.5 * dt / t2) if driven_relax else 1.0
    e1h = math.exp(-0.5 * dt / t1) if driven_relax else 1.0
    for k in range(n):
        if re[k] == 0.0 and im[k] == 0.0:
            mx, my, mz = _free(mx, my, mz, wz, dt, t1, t2)
        else:
            mx, my, mz = _driven(mx, my, mz, RAD_PER_NS * b1 * re[k], RAD_PER_NS * b1 * im[k],
                                 wz, dt, e2h, e1h)
        out[k + 1, 0], out[k + 1, 1], out[k + 1, 2] = mx, my, mz
    return out


@numba.njit(cache=True, inline="always")
def _cexpm1(a, b):
    # exp(a + ib) - 1 without cancellation
    ea = math.exp(a)
    sb = math.sin(0.5 * b)
    return complex(math.expm1(a) * math.cos(b) - 2.0 * sb * sb, ea * math.sin(b))


@numba.njit(cache=True)
def _advance(mx, my, mz, re, im, zero_end, k, stop, dt, wz, g, t1, t2, e2h, e1h):
    while k < stop:
        if re[k] == 0.0 and im[k] == 0.0:
            nxt = min(zero_end[k], stop)
            mx, my, mz = _free(mx, my, mz, wz, (nxt - k) * dt, t1, t2)
            k = nxt
        else:
            mx, my, mz = _driven(mx, my, mz, g * re[k], g * im[k], wz, dt, e2h, e1h)
            k += 1
    return mx, my, mz


@numba.njit(cache=True)
def _ensemble(re, im, zero_end, dt, det, b1, weight, t1, t2, driven_relax, lo, hi, center,
              want_trace, integral, at_center, final, trace):
    """Evolve every packet from +z in index order.

    Per packet: trapezoid integral of mx + i*my over sample boundaries
    lo..hi, its value at boundary ``center`` and the final state.  When the
    window holds no drive, the window is free precession and both the
    integral and the center value are evaluated in closed form.  The
    weighted trace is accumulated in packet order.
    """
    n = len(re)
    free_window = zero_end[lo] >= hi if lo < n else True
    m_len = hi - lo
    for p in range(len(det)):
        wz = RAD_PER_NS * det[p]
        g = RAD_PER_NS * b1[p]
        if driven_relax:
            e2h = math.exp(-0.5 * dt / t2[p])
            e1h = math.exp(-0.5 * dt / t1[p])
        else:
            e2h = 1.0
            e1h = 1.0
        mx, my, mz = _advance(0.0, 0.0, 1.0, re, im, zero_end, 0, lo, dt, wz, g, t1[p], t2[p],
                              e2h, e1h)
        m0 = mx + 1j * my
        if free_window:
            za = -dt / t2[p]
            zb = wz * dt
            q = complex(math.exp(za) * math.cos(zb), math.exp(za) * math.sin(zb))
            if za == 0.0 and zb == 0.0:
                geo = float(m_len + 1)
            else:
                geo = _cexpm1(za * (m_len + 1), zb * (m_len + 1)) / _cexpm1(za, zb)
            last = m0 * complex(math.exp(za * m_len) * math.cos(zb * m_len),
                                math.exp(za * m_len) * math.sin(zb * m_len))
            integral[p] = (m0 * geo - 0.5 * (m0 + last)) * dt
            c = center - lo
            at_center[p] = m0 * complex(math.exp(za * c) * math.cos(zb * c),
                                        math.exp(za * c) * math.sin(zb * c))
            if want_trace:
                v = m0
                for j in range(m_len + 1):
                    trace[j] += weight[p] * v
                    v = v * q
            mx, my, mz = _free(mx, my, mz, wz, m_len * dt, t1[p], t2[p])
        else:
            acc = 0.0j
            for k in range(lo, hi + 1):
                v = mx + 1j * my
                f = 0.5 if (k == lo or k == hi) else 1.0
                acc += f * v
                if k == center:
                    at_center[p] = v
                if want_trace:
                    trace[k - lo] += weight[p] * v
                if k < hi:
                    mx, my, mz = _advance(mx, my, mz, re, im, zero_end, k, k + 1, dt, wz, g,
                                          t1[p], t2[p], e2h, e1h)
            integral[p] = acc * dt
        mx, my, mz = _advance(mx, my, mz, re, im, zero_end, hi, n, dt, wz, g, t1[p], t2[p],
                              e2h, e1h)
        final[p, 0], final[p, 1], final[p, 2] = mx, my, mz


def _zero_run_ends(samples: np.ndarray) -> np.ndarray:
    """For each index, the first index at or after it holding a nonzero sample."""
    n = len(samples)
    nonzero = samples != 0
    idx = np.where(nonzero, np.arange(n), n)
    return np.minimum.accumulate(idx[::-1])[::-1].astype(np.int64)


def _check_waveform(w: SampledWaveform) -> None:
    if not np.all(np.isfinite(w.samples)):
        raise DomainError("waveform contains non-finite samples")


# --------------------------------------------------------------------------
# public API

def evolve_packet(packet: SpinPacket, waveform: SampledWaveform,
                  initial: Sequence[float] = (0.0, 0.0, 1.0), *,
                  driven_relaxation: bool = True) -> np.ndarray:
    """Bloch-vector trajectory of one packet, shape ``(len(waveform) + 1, 3)``.

    Row ``k`` is the state at time ``k * dt``.  ``driven_relaxation=False``
    suspends relaxation while the drive is on.
    """
    _check_waveform(waveform)
    m0 = np.asarray(initial, dtype=float)
    if m0.shape != (3,) or not np.all(np.isfinite(m0)):
        raise DomainError("initial Bloch vector must be three finite numbers")
    s = np.asarray(waveform.samples, dtype=complex)
    return _trajectory(np.ascontiguousarray(s.real), np.ascontiguousarray(s.imag),
                       float(waveform.dt), float(packet.detuning), float(packet.b1_scale),
                       float(packet.t1), float(packet.t2), m0, bool(driven_relaxation))


AMPLITUDE_MODES = ("magnitude", "in_phase")


@dataclass(frozen=True)
class EchoTrace:
    """Ensemble-averaged transverse magnetization around the echo.

    ``samples[j]`` is ``<mx + i my>`` at ``start_time + j * dt``.  The echo
    amplitude is the window average of that signal: its modulus in
    ``"magnitude"`` mode, its +y projection (the echo axis of x-phase
    pulses) in ``"in_phase"`` mode.
    """

    dt: float
    start_time: float
    samples: np.ndarray
    echo_amplitude: float
    mode: str
    echo_time: float
    ensemble: Ensemble = field(repr=False)
    packet_integral: np.ndarray = field(repr=False)
    packet_echo: np.ndarray = field(repr=False)
    final: np.ndarray = field(repr=False)

    @property
    def times(self) -> np.ndarray:
        return self.start_time + np.arange(len(self.samples)) * self.dt

    @property
    def window_mean(self) -> complex:
        width = (len(self.samples) - 1) * self.dt
        return complex(np.dot(self.ensemble.weight, self.packet_integral) / width)


def _amplitude(mean: complex, mode: str) -> float:
    return abs(mean) if mode == "magnitude" else mean.imag


def _as_ensemble(spec_or_ensemble) -> Ensemble:
    if isinstance(spec_or_ensemble, Ensemble):
        return spec_or_ensemble
    if isinstance(spec_or_ensemble, EnsembleSpec):
        return build_ensemble(spec_or_ensemble)
    if isinstance(spec_or_ensemble, SpinPacket):
        return Ensemble.from_packets([spec_or_ensemble])
    return Ensemble.from_packets(spec_or_ensemble)


def _prepare(seq, dt, resonator, carrier_offset) -> SampledWaveform:
    w = seq if isinstance(seq, SampledWaveform) else compile_sequence(seq, dt)
    if w.echo_index is None:
        raise DomainError("sequence has no acquisition marker")
    if w.half_window == 0:
        raise DomainError("acquisition window is empty")
    if resonator is not None:
        from .resonator import apply_filter
        w = apply_filter(resonator, w, carrier_offset)
    _check_waveform(w)
    return w


def _run(w: SampledWaveform, ens: Ensemble, want_trace: bool):
    s = np.asarray(w.samples, dtype=complex)
    lo = max(0, w.echo_index - w.half_window)
    hi = w.echo_index + w.half_window
    n = len(ens)
    integral = np.zeros(n, dtype=complex)
    at_center = np.zeros(n, dtype=complex)
    final = np.zeros((n, 3))
    trace = np.zeros(hi - lo + 1 if want_trace else 1, dtype=complex)
    _ensemble(np.ascontiguousarray(s.real), np.ascontiguousarray(s.imag), _zero_run_ends(s),
              float(w.dt), ens.detuning, ens.b1_scale, ens.weight, ens.t1, ens.t2,
              ens.driven_relaxation, lo, hi, w.echo_index, want_trace, integral, at_center, final, trace)
    return lo, hi, integral, at_center, final, trace


def simulate_echo(seq: PulseSequence | SampledWaveform, spec, *, dt: float = DT,
                  mode: str = "magnitude", resonator=None,
                  carrier_offset: float = 0.0) -> EchoTrace:
    """Evolve every packet from +z through ``seq`` and record the echo.

    ``spec`` may be an :class:`EnsembleSpec`, a built :class:`Ensemble` or
    a list of :class:`SpinPacket`.  With ``resonator`` the compiled drive is
    passed through :func:`esrpulse.resonator.apply_filter` first.
    """
    if mode not in AMPLITUDE_MODES:
        raise DomainError(f"mode must be one of {AMPLITUDE_MODES}, got {mode!r}")
    w = _prepare(seq, dt, resonator, carrier_offset)
    ens = _as_ensemble(spec)
    lo, hi, integral, at_center, final, trace = _run(w, ens, True)
    width = (hi - lo) * w.dt
    mean = complex(np.dot(ens.weight, integral) / width)
    return EchoTrace(w.dt, lo * w.dt, trace, _amplitude(mean, mode), mode, w.echo_index * w.dt,
                     ens, integral, at_center, final)


def echo_amplitude(seq, spec, *, dt: float = DT, mode: str = "magnitude", resonator=None,
                   carrier_offset: float = 0.0) -> float:
    """Echo amplitude only; skips building the averaged trace."""
    if mode not in AMPLITUDE_MODES:
        raise DomainError(f"mode must be one of {AMPLITUDE_MODES}, got {mode!r}")
    w = _prepare(seq, dt, resonator, carrier_offset)
    ens = _as_ensemble(spec)
    lo, hi, integral, *_ = _run(w, ens, False)
    return _amplitude(complex(np.dot(ens.weight, integral) / ((hi - lo) * w.dt)), mode)


def nutation_curve(angles: Sequence[float], spec, use_bb1: bool, rabi: float, tau: float, *,
                   dt: float = DT, mode: str = "in_phase", resonator=None,
                   half_window: float = 100.0) -> list[tuple[float, float]]:
    """Echo amplitude after nutation by each total angle in ``angles``.

    Angles above 4*pi are padded with 4*pi blocks.  The default
    ``"in_phase"`` mode keeps the sign, so an ideal spin traces ``sin``.
    """
    ens = _as_ensemble(spec)
    out = []
    for a in angles:
        if not 0 <= a <= 5 * math.pi + 1e-9:
            raise DomainError(f"nutation angles must lie in [0, 5*pi], got {a!r}")
        theta, n_pad = split_total_angle(float(a))
        seq = nutation_sequence(theta, n_pad, rabi, tau, use_bb1, half_window=half_window)
        out.append((float(a), echo_amplitude(seq, ens, dt=dt, mode=mode, resonator=resonator)))
    return out


def field_sweep_spectrum(seq, spec, sweep_offsets: Sequence[float], *, dt: float = DT,
                         mode: str = "magnitude", resonator=None) -> list[tuple[float, float]]:
    """Echo amplitude with every packet detuning shifted by each offset (MHz)."""
    offsets = [float(d) for d in sweep_offsets]
    if not all(math.isfinite(d) for d in offsets):
        raise DomainError("sweep offsets must be finite")
    w = _prepare(seq, dt, resonator, 0.0)
    ens = _as_ensemble(spec)
    return [(d, echo_amplitude(w, ens.shifted(d), mode=mode)) for d in offsets]


def excitation_spectrum(trace: EchoTrace, freqs: Sequence[float] | None = None, *,
                        window: str = "hann") -> tuple[np.ndarray, np.ndarray]:
    """Continuous Fourier magnitude of the echo trace at ``freqs`` (MHz).

    ``|integral of win(t) * trace(t) * exp(-2i*pi*f*(t - t_echo)) dt| / T``
    by the trapezoid rule, with ``T`` the window length.  Packets refocused
    by the sequence add coherently at their own detuning, unrefocused
    magnetization averages out, so the result is the excitation profile of
    the sequence weighted by the line.

    Parameters
    ----------
    freqs : array_like, optional
        Defaults to -50..50 MHz in 0.05 MHz steps.
    window : {"hann", "rect"}
        Taper applied before the transform.  The echo is usually still
        sizeable at the window edges, and a hard cut adds sinc sidelobes
        about 2 MHz from every line.
    """
    if window not in ("hann", "rect"):
        raise DomainError(f"window must be 'hann' or 'rect', got {window!r}")
    f = np.arange(-50.0, 50.0 + 1e-9, 0.05) if freqs is None else np.asarray(freqs, float)
    t = (trace.times - trace.echo_time) * 1e-3
    w = np.full(len(t), trace.dt)
    w[0] = w[-1] = 0.5 * trace.dt
    if window == "hann":
        w = w * np.hanning(len(t))
    y = trace.samples * w
    width = (len(t) - 1) * trace.dt
    out = np.empty(len(f))
    for i in range(0, len(f), 128):
        fc = f[i:i + 128]
        out[i:i + 128] = np.abs(np.exp(-2j * np.pi * np.outer(fc, t)) @ y) / width
    return f, out


def trace_spectrum(trace: EchoTrace, pad_to: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Magnitude of the discrete Fourier transform of the echo trace.

    Frequencies are in MHz, sorted ascending.  The trace is zero-padded to
    ``pad_to`` points when given (finer interpolation, same resolution).
    """
    n = len(trace.samples)
    m = max(n, pad_to or n)
    spec = np.fft.fftshift(np.fft.fft(trace.samples, m))
    freqs = np.fft.fftshift(np.fft.fftfreq(m, d=trace.dt * 1e-3))
    return freqs, np.abs(spec) * trace.dt
