"""Reference experiment runs and their CSV outputs.

Every data file starts with a ``#`` header holding the fully resolved
configuration as ``key=<json>`` lines, then a column-name line, then rows.
:func:`load_config` reads such a header back, so a file can be regenerated
from itself.
"""

from __future__ import annotations

import dataclasses
import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np
import yaml

from . import __version__
from ._validation import ConfigError, DomainError
from .composite import (ERROR_SCOPES, bb1_echo_sequence, build_named, comb_echo_sequence,
                        plain_echo_sequence, sequence_from_config)
from .ensemble import (DeltaB1, EnsembleSpec, GaussianB1, GaussianLine, LorentzianLine,
                       build_ensemble, echo_amplitude, excitation_spectrum,
                       field_sweep_spectrum, nutation_curve, simulate_echo)
from .pulses import DT, compile_sequence, write_waveform
from .resonator import ResonatorModel

EXPERIMENTS = ("fig2", "fig3", "fig4", "fig4a", "fig4b", "fig4c", "custom")


@dataclass
class ExperimentConfig:
    """Flat, fully explicit parameter set for one run.

    Use :func:`resolve_config` to obtain the reference defaults for an
    experiment with overrides applied.
    """

    experiment: str = "fig2"
    out: str = ""
    seed: int = 0
    sampling: str = "quadrature"
    dt: float = DT
    # drive
    rabi: float = 38.46
    tau: float = 300.0
    half_window: float = 100.0
    error_scope: str = "global"
    sigma_grid: list = field(default_factory=list)
    angles_pi: list = field(default_factory=list)
    # ensemble
    lineshape: str = "gaussian"
    linewidth: float = 9.35
    packets: int = 2001
    b1_sd: float = 0.0
    b1_points: int = 21
    t1: float = 1e6
    t2: float = 200.0
    driven_relaxation: bool = True
    amplitude_mode: str = "magnitude"
    # comb
    offsets: list = field(default_factory=list)
    fwhm_90: float = 203.0
    fwhm_180: float = 401.7
    sweep_offsets: list = field(default_factory=list)
    sweep_packets: int = 1001
    spectrum_step: float = 0.05
    amplifier_ceiling: float = 40.0
    # resonator
    resonator: bool = False
    resonator_bandwidth: float = 255.0
    resonator_center: float = 17.06
    resonator_q: float = 66.0
    resonator_efficiency: float = 57.6
    carrier_offset: float = 0.0
    # custom runs
    sequence: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


def _grid(start: float, stop: float, step: float) -> list:
    n = int(round((stop - start) / step))
    return [round(start + i * step, 12) for i in range(n + 1)]


_DEFAULTS: dict[str, dict[str, Any]] = {
    "fig2": dict(sigma_grid=_grid(-0.4, 0.4, 0.1)),
    # Relaxation is suspended under drive so the nutation decay reflects
    # pulse-length errors; T2 during the longer BB1 blocks would mask them.
    "fig3": dict(angles_pi=_grid(0.0, 5.0, 0.125), packets=101, b1_sd=0.05, b1_points=19,
                 driven_relaxation=False, amplitude_mode="in_phase"),
    "fig4": dict(rabi=1.16, tau=1200.0, half_window=400.0, linewidth=40.0, t2=1e4,
                 offsets=[-20.0, -10.0, 0.0, 10.0, 20.0], sweep_offsets=_grid(-60.0, 60.0, 2.0)),
    "custom": dict(),
}
for _k in ("fig4a", "fig4b", "fig4c"):
    _DEFAULTS[_k] = _DEFAULTS["fig4"]

_FIELDS = {f.name: f for f in dataclasses.fields(ExperimentConfig)}


def _coerce(name: str, value: Any) -> Any:
    kind = _FIELDS[name].type
    try:
        if kind == "bool":
            if isinstance(value, str):
                if value.lower() in ("on", "true", "yes", "1"):
                    return True
                if value.lower() in ("off", "false", "no", "0"):
                    return False
                raise ValueError(value)
            return bool(value)
        if kind == "int":
            return int(value)
        if kind == "float":
            return float(value)
        if kind == "str":
            return str(value)
        if name == "sequence":
            return [dict(item) for item in value]
        return [float(v) for v in value]
    except (TypeError, ValueError):
        raise ConfigError(f"bad value for {name}: {value!r}") from None


def resolve_config(experiment: str | None = None, overrides: Mapping[str, Any] | None = None
                   ) -> ExperimentConfig:
    """Experiment defaults with ``overrides`` applied and validated."""
    overrides = dict(overrides or {})
    experiment = overrides.pop("experiment", None) if experiment is None else experiment
    experiment = experiment or "fig2"
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {experiment!r}; choose from {EXPERIMENTS}")
    values = dict(_DEFAULTS[experiment])
    for key, val in overrides.items():
        key = key.replace("-", "_")
        if key not in _FIELDS:
            raise ConfigError(f"unknown config key {key!r}")
        if val is not None:
            values[key] = val
    values.pop("experiment", None)
    cfg = ExperimentConfig(experiment=experiment,
                           **{k: _coerce(k, v) for k, v in values.items()})
    _validate(cfg)
    return cfg


def _validate(cfg: ExperimentConfig) -> None:
    if cfg.error_scope not in ERROR_SCOPES:
        raise ConfigError(f"error_scope must be one of {ERROR_SCOPES}")
    if cfg.lineshape not in ("gaussian", "lorentzian"):
        raise ConfigError("lineshape must be 'gaussian' or 'lorentzian'")
    if cfg.amplitude_mode not in ("magnitude", "in_phase"):
        raise ConfigError("amplitude_mode must be 'magnitude' or 'in_phase'")
    if cfg.sampling not in ("quadrature", "random"):
        raise ConfigError("sampling must be 'quadrature' or 'random'")
    if cfg.packets < 1 or cfg.sweep_packets < 1:
        raise ConfigError("packet counts must be >= 1")
    if cfg.experiment == "fig2" and not all(-1 < s <= 1 for s in cfg.sigma_grid):
        raise ConfigError("sigma grid must lie within (-1, 1]")
    if cfg.experiment == "fig3" and not all(0 <= a <= 5 for a in cfg.angles_pi):
        raise ConfigError("nutation angles must lie within [0, 5] pi")
    if cfg.experiment.startswith("fig4") and not cfg.offsets:
        raise ConfigError("comb offsets must be nonempty")
    if cfg.experiment == "custom" and not cfg.sequence:
        raise ConfigError("custom experiment needs a 'sequence' list")


def load_config(path: str | Path) -> dict:
    """Read overrides from YAML/JSON, or from the header of an emitted data file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if text.startswith("# esrpulse"):
        out = {}
        for line in text.splitlines():
            if not line.startswith("#"):
                break
            body = line[1:].strip()
            if "=" in body:
                key, val = body.split("=", 1)
                out[key.strip()] = json.loads(val)
        return out
    try:
        data = yaml.safe_load(text) or {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return data


# --------------------------------------------------------------------------
# model construction

def ensemble_spec(cfg: ExperimentConfig, packets: int | None = None) -> EnsembleSpec:
    line = (GaussianLine if cfg.lineshape == "gaussian" else LorentzianLine)(cfg.linewidth)
    b1 = GaussianB1(cfg.b1_sd, cfg.b1_points) if cfg.b1_sd > 0 else DeltaB1()
    return EnsembleSpec(line, packets or cfg.packets, b1, cfg.t1, cfg.t2, cfg.sampling, cfg.seed,
                        cfg.driven_relaxation)


def resonator_model(cfg: ExperimentConfig) -> ResonatorModel | None:
    if not cfg.resonator:
        return None
    return ResonatorModel(cfg.resonator_center, cfg.resonator_bandwidth, cfg.resonator_q,
                          cfg.resonator_efficiency)


def _sim_kwargs(cfg: ExperimentConfig) -> dict:
    return dict(dt=cfg.dt, resonator=resonator_model(cfg))


# --------------------------------------------------------------------------
# runs

@dataclass
class Table:
    columns: tuple[str, ...]
    rows: list

    def column(self, name: str) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([r[i] for r in self.rows])


def run_fig2(cfg: ExperimentConfig) -> Table:
    """Echo ratio against pi/2 amplitude error for plain and BB1 sequences."""
    ens = build_ensemble(ensemble_spec(cfg))
    kw = _sim_kwargs(cfg)

    def amp(builder, sigma):
        seq = builder(cfg.rabi, cfg.tau, sigma, error_scope=cfg.error_scope,
                      half_window=cfg.half_window)
        return echo_amplitude(seq, ens, mode=cfg.amplitude_mode, carrier_offset=cfg.carrier_offset,
                              **kw)

    ref_plain = amp(plain_echo_sequence, 0.0)
    ref_bb1 = amp(bb1_echo_sequence, 0.0)
    rows = []
    for s in cfg.sigma_grid:
        p = ref_plain if s == 0 else amp(plain_echo_sequence, s)
        b = ref_bb1 if s == 0 else amp(bb1_echo_sequence, s)
        rows.append((s, p / ref_plain, b / ref_bb1, p, b))
    return Table(("sigma", "plain_ratio", "bb1_ratio", "plain_echo", "bb1_echo"), rows)


def run_fig3(cfg: ExperimentConfig) -> Table:
    """Nutation echoes against total rotation angle, plain and BB1."""
    ens = build_ensemble(ensemble_spec(cfg))
    angles = [a * math.pi for a in cfg.angles_pi]
    kw = dict(dt=cfg.dt, mode=cfg.amplitude_mode, resonator=resonator_model(cfg),
              half_window=cfg.half_window)
    plain = nutation_curve(angles, ens, False, cfg.rabi, cfg.tau, **kw)
    bb1 = nutation_curve(angles, ens, True, cfg.rabi, cfg.tau, **kw)
    rows = [(a, a / math.pi, p, b) for a, (_, p), (_, b) in zip(angles, plain, bb1)]
    return Table(("total_angle", "angle_over_pi", "plain_echo", "bb1_echo"), rows)


def nutation_envelope(angles: Sequence[float], echoes: Sequence[float], at: float) -> float:
    """Largest ``|echo|`` over the half period ending at ``at`` (``[at - pi, at]``)."""
    a = np.asarray(angles, dtype=float)
    sel = (a >= at - math.pi - 1e-9) & (a <= at + 1e-9)
    if not sel.any():
        raise DomainError(f"no grid points within [{at - math.pi}, {at}]")
    return float(np.max(np.abs(np.asarray(echoes)[sel])))


def comb_sequence(cfg: ExperimentConfig, offsets: Sequence[float] | None = None):
    return comb_echo_sequence(cfg.offsets if offsets is None else offsets, cfg.rabi, cfg.tau,
                              fwhm_90=cfg.fwhm_90, fwhm_180=cfg.fwhm_180,
                              half_window=cfg.half_window)


def _check_ceiling(cfg: ExperimentConfig, seq) -> None:
    peak = float(np.max(np.abs(compile_sequence(seq, cfg.dt).samples)))
    if peak > cfg.amplifier_ceiling:
        warnings.warn(f"comb peak {peak:.3f} MHz exceeds amplifier ceiling "
                      f"{cfg.amplifier_ceiling} MHz", RuntimeWarning, stacklevel=3)


def run_fig4(cfg: ExperimentConfig, parts: str = "abc") -> dict[str, Table]:
    """Field-swept line (a), comb excitation spectrum (b), comb echo trace (c)."""
    out: dict[str, Table] = {}
    kw = _sim_kwargs(cfg)
    if "a" in parts:
        single = comb_sequence(cfg, [0.0])
        sweep = field_sweep_spectrum(single, build_ensemble(ensemble_spec(cfg, cfg.sweep_packets)),
                                     cfg.sweep_offsets, mode=cfg.amplitude_mode, **kw)
        out["a"] = Table(("offset_mhz", "echo_amplitude"), sweep)
    if "b" in parts or "c" in parts:
        seq = comb_sequence(cfg)
        _check_ceiling(cfg, seq)
        trace = simulate_echo(seq, build_ensemble(ensemble_spec(cfg)), mode=cfg.amplitude_mode,
                              carrier_offset=cfg.carrier_offset, **kw)
        if "b" in parts:
            span = max(abs(f) for f in cfg.offsets) + 10.0
            freqs = np.array(_grid(-span, span, cfg.spectrum_step))
            f, s = excitation_spectrum(trace, freqs)
            out["b"] = Table(("freq_mhz", "spectrum"), list(zip(f.tolist(), s.tolist())))
        if "c" in parts:
            rows = [(t, z.real, z.imag) for t, z in zip(trace.times.tolist(), trace.samples)]
            out["c"] = Table(("time_ns", "re", "im"), rows)
    return out


def run_custom(cfg: ExperimentConfig) -> Table:
    seq = sequence_from_config(cfg.sequence)
    trace = simulate_echo(seq, build_ensemble(ensemble_spec(cfg)), mode=cfg.amplitude_mode,
                          carrier_offset=cfg.carrier_offset, **_sim_kwargs(cfg))
    return Table(("time_ns", "re", "im"),
                 [(t, z.real, z.imag) for t, z in zip(trace.times.tolist(), trace.samples)])


# --------------------------------------------------------------------------
# output

def _fmt(v) -> str:
    return f"{v:.10g}" if isinstance(v, float) else str(v)


def write_table(table: Table, cfg: ExperimentConfig, path: str | Path) -> Path:
    path = Path(path)
    header = [f"# esrpulse {__version__}"]
    header += [f"# {k}={json.dumps(v, sort_keys=True)}" for k, v in sorted(cfg.as_dict().items())
               if k != "out"]
    lines = header + [",".join(table.columns)]
    lines += [",".join(_fmt(float(v)) for v in row) for row in table.rows]
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n")
    return path


def output_paths(cfg: ExperimentConfig) -> dict[str, Path]:
    """Data file(s) an experiment writes, keyed by part ('' for single files)."""
    base = Path(cfg.out or f"{cfg.experiment}.csv")
    if cfg.experiment == "fig4":
        stem = base.with_suffix("") if base.suffix else base / "fig4"
        return {p: stem.parent / f"{stem.name}{p}.csv" for p in "abc"}
    return {"": base}


def run_experiment(cfg: ExperimentConfig) -> list[Path]:
    """Run ``cfg`` and write its data file(s); returns the written paths."""
    paths = output_paths(cfg)
    if cfg.experiment == "fig2":
        tables = {"": run_fig2(cfg)}
    elif cfg.experiment == "fig3":
        tables = {"": run_fig3(cfg)}
    elif cfg.experiment == "fig4":
        tables = run_fig4(cfg)
    elif cfg.experiment.startswith("fig4"):
        tables = {"": run_fig4(cfg, cfg.experiment[-1])[cfg.experiment[-1]]}
    else:
        tables = {"": run_custom(cfg)}
    return [write_table(tables[k], cfg, paths[k]) for k in paths]


def write_plot_stub(data: Path) -> Path:
    """A gnuplot script plotting every data column of ``data`` against the x column."""
    names = next(l for l in data.read_text().splitlines() if not l.startswith("#")).split(",")
    lines = ["set datafile separator ','", "set datafile commentschars '#'", "set key autotitle columnhead",
             f"set xlabel '{names[0]}'",
             "plot " + ", ".join(f"'{data.name}' using 1:{i} with linespoints"
                                 for i in range(2, len(names) + 1))]
    stub = data.with_suffix(".gp")
    stub.write_text("\n".join(lines) + "\n")
    return stub


def export_waveform(seq, path: str | Path, *, dt: float = DT,
                    resonator: ResonatorModel | None = None, carrier_offset: float = 0.0) -> Path:
    """Compile ``seq`` and write it in the tab-separated IQ format."""
    w = compile_sequence(seq, dt)
    if resonator is not None:
        from .resonator import apply_filter
        w = apply_filter(resonator, w, carrier_offset)
    return write_waveform(w, path)
