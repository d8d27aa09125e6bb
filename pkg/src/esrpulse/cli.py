"""Command-line entry point.

    esrpulse run fig2 --out results/fig2.csv
    esrpulse run --experiment fig4 --offsets=-20,-10,0,10,20 --out results/fig4
    esrpulse export --sequence bb1-echo --sigma 0.2 --out bb1.txt
    esrpulse sweep --sequence echo --offsets=-20:20:1 --out sweep.csv

Exit codes: 0 success, 1 configuration error, 2 numeric domain error,
3 I/O error.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys

from ._validation import ConfigError, DomainError
from .composite import SEQUENCE_BUILDERS, build_named, sequence_from_config
from .ensemble import build_ensemble, field_sweep_spectrum
from .experiments import (EXPERIMENTS, Table, ensemble_spec, export_waveform, load_config,
                          resolve_config, resonator_model, run_experiment, write_plot_stub,
                          write_table)

log = logging.getLogger("esrpulse")

EXIT_OK, EXIT_CONFIG, EXIT_DOMAIN, EXIT_IO = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def parse_grid(text: str) -> list[float]:
    """``"a,b,c"`` or inclusive ``"start:stop:step"``."""
    text = text.strip()
    try:
        if ":" in text:
            start, stop, step = (float(x) for x in text.split(":"))
            if step <= 0:
                raise ValueError
            n = int(math.floor((stop - start) / step + 1e-9))
            return [round(start + i * step, 12) for i in range(n + 1)]
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse grid {text!r}") from None


def _on_off(text: str) -> bool:
    if text not in ("on", "off"):
        raise ConfigError("--resonator takes 'on' or 'off'")
    return text == "on"


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="YAML/JSON config or a previously written data file")
    p.add_argument("--out", help="output path")
    p.add_argument("--resonator", type=_on_off, help="on|off: filter the drive")
    p.add_argument("--packets", type=int, help="detuning packets in the ensemble")
    p.add_argument("--seed", type=int)
    p.add_argument("--rabi", type=float, help="Rabi frequency, MHz")
    p.add_argument("--tau", type=float, help="echo delay, ns")
    p.add_argument("--linewidth", type=float, help="line FWHM, MHz")
    p.add_argument("--t2", type=float, help="transverse relaxation, ns")
    p.add_argument("--error-scope", choices=("global", "target-only"))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="esrpulse", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run a reference experiment")
    run.add_argument("experiment_name", nargs="?", choices=EXPERIMENTS)
    run.add_argument("--experiment", choices=EXPERIMENTS)
    run.add_argument("--sigma-grid", type=parse_grid, help="fig2 errors, e.g. -0.4:0.4:0.1")
    run.add_argument("--angle-grid", type=parse_grid, help="fig3 total angles in units of pi")
    run.add_argument("--offsets", type=parse_grid, help="comb offsets, MHz")
    run.add_argument("--b1-sd", type=float, help="relative B1 spread")
    run.add_argument("--plot-script", action="store_true", help="also write a gnuplot stub")
    _common(run)

    exp = sub.add_parser("export", help="write a compiled waveform")
    exp.add_argument("--sequence", choices=SEQUENCE_BUILDERS)
    exp.add_argument("--theta", type=float, help="rotation angle, rad")
    exp.add_argument("--sigma", type=float, default=0.0)
    exp.add_argument("--n-pad", type=int, default=0)
    exp.add_argument("--plain", action="store_true", help="nutation without BB1")
    exp.add_argument("--offsets", type=parse_grid)
    _common(exp)

    sw = sub.add_parser("sweep", help="field-swept echo amplitude of a sequence")
    sw.add_argument("--sequence", choices=SEQUENCE_BUILDERS, default="echo")
    sw.add_argument("--theta", type=float)
    sw.add_argument("--sigma", type=float, default=0.0)
    sw.add_argument("--offsets", type=parse_grid, required=True, help="sweep offsets, MHz")
    _common(sw)
    return parser


def _overrides(args) -> dict:
    over = load_config(args.config) if args.config else {}
    pairs = {
        "out": args.out, "resonator": args.resonator, "packets": args.packets, "seed": args.seed,
        "rabi": args.rabi, "tau": args.tau, "linewidth": args.linewidth, "t2": args.t2,
        "error_scope": args.error_scope,
    }
    over.update({k: v for k, v in pairs.items() if v is not None})
    return over


def _cmd_run(args) -> int:
    over = _overrides(args)
    for key, val in (("sigma_grid", args.sigma_grid), ("angles_pi", args.angle_grid),
                     ("offsets", args.offsets), ("b1_sd", args.b1_sd)):
        if val is not None:
            over[key] = val
    name = args.experiment or args.experiment_name or over.get("experiment")
    if name is None:
        raise ConfigError("no experiment given")
    over.pop("experiment", None)
    cfg = resolve_config(name, over)
    for path in run_experiment(cfg):
        log.info("wrote %s", path)
        print(path)
        if args.plot_script:
            print(write_plot_stub(path))
    return EXIT_OK


def _named_kwargs(args, cfg) -> dict:
    kw = dict(sigma=args.sigma, tau=cfg.tau, rabi=cfg.rabi, error_scope=cfg.error_scope)
    if args.theta is not None:
        kw["theta"] = args.theta
    if getattr(args, "n_pad", None):
        kw["n_pad"] = args.n_pad
    if getattr(args, "plain", False):
        kw["use_bb1"] = False
    if getattr(args, "offsets", None) is not None and args.command == "export":
        kw["offsets"] = args.offsets
    return kw


def _cmd_export(args) -> int:
    over = _overrides(args)
    seq_items = over.pop("sequence", None)
    over.pop("experiment", None)
    cfg = resolve_config("custom" if seq_items else "fig2",
                         dict(over, sequence=seq_items) if seq_items else over)
    if args.sequence:
        seq = build_named(args.sequence, **_named_kwargs(args, cfg))
    elif seq_items:
        seq = sequence_from_config(seq_items)
    else:
        raise ConfigError("export needs --sequence or a config with a 'sequence' list")
    path = export_waveform(seq, cfg.out or "waveform.txt", dt=cfg.dt,
                           resonator=resonator_model(cfg), carrier_offset=cfg.carrier_offset)
    print(path)
    return EXIT_OK


def _cmd_sweep(args) -> int:
    over = _overrides(args)
    over.pop("experiment", None)
    over.pop("sequence", None)
    cfg = resolve_config("fig2", over)
    seq = build_named(args.sequence, **_named_kwargs(args, cfg))
    rows = field_sweep_spectrum(seq, build_ensemble(ensemble_spec(cfg)), args.offsets,
                                dt=cfg.dt, mode=cfg.amplitude_mode, resonator=resonator_model(cfg))
    path = write_table(Table(("offset_mhz", "echo_amplitude"), rows), cfg,
                       cfg.out or "sweep.csv")
    print(path)
    return EXIT_OK


_GRID_FLAGS = ("--sigma-grid", "--angle-grid", "--offsets")


def _attach_grid_values(argv: list[str]) -> list[str]:
    # "--offsets -20,0,20" would otherwise read the value as a flag
    out: list[str] = []
    it = iter(argv)
    for tok in it:
        if tok in _GRID_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    argv = _attach_grid_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = build_parser().parse_args(argv)
    except ConfigError as exc:
        print(f"esrpulse: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    handler = {"run": _cmd_run, "export": _cmd_export, "sweep": _cmd_sweep}[args.command]
    try:
        return handler(args)
    except ConfigError as exc:
        print(f"esrpulse: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DomainError as exc:
        print(f"esrpulse: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"esrpulse: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
