"""Command line entry point: ``scwlink <subcommand> [options]``."""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from .config import ConfigError, LinkConfig, load_config, save_config, with_noise
from .link import levels, receiver_index, sender_index
from .scenarios import (
    PAPER_V_HIGH,
    PAPER_V_LOW,
    SWEEP_PARAMETERS,
    CalibrationError,
    apply_calibration,
    calibrate_to_levels,
    ensure_calibrated,
    gain_report,
    run_oscillogram,
    run_protocol,
    state_levels,
    sweep,
    write_table,
    write_trace,
    write_transcript,
)

log = logging.getLogger("scwlink")


def _write_json(obj: dict, path: Path) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=False) + "\n")
    log.info("wrote %s", path)


def _prepare(args: argparse.Namespace) -> LinkConfig:
    cfg = load_config(args.config)
    cfg = with_noise(cfg, seed=args.seed, disable=args.no_noise)
    log.info("seed %d, noise %s", cfg.detection.noise.seed, "on" if cfg.detection.noise.enabled else "off")
    return cfg


def _calibrated(cfg: LinkConfig, args: argparse.Namespace) -> LinkConfig:
    cfg, cal = ensure_calibrated(cfg, args.v_high, args.v_low)
    if cal is not None:
        log.info("receiver index unset; calibrated to m_B=%.6f, P_bob=%.4e W", cal.m_b, cal.bob_input_power)
    return cfg


def cmd_calibrate(args: argparse.Namespace, cfg: LinkConfig, out: Path) -> int:
    try:
        cal = calibrate_to_levels(cfg, args.v_high, args.v_low)
    except CalibrationError as exc:
        log.error("%s", exc)
        exc.dump_curve(out / "calibration_curve.csv")
        return 1
    calibrated = apply_calibration(cfg, cal)
    report = dataclasses.asdict(cal)
    report["implied_link_loss_db"] = cal.implied_link_loss_db(cfg)
    report["v_quadrature"] = levels(calibrated)[1]
    _write_json(report, out / "calibration.json")
    save_config(calibrated, out / "calibrated_config.yaml")
    return 0


def cmd_oscillogram(args: argparse.Namespace, cfg: LinkConfig, out: Path) -> int:
    cfg = _calibrated(cfg, args)
    phases = [float(p) * math.pi / 2 for p in args.states.split(",")]
    rows = run_oscillogram(
        cfg, phases, args.frames_per_state, args.samples_per_frame, args.cycles, cfg.detection.noise.seed
    )
    write_trace(rows, out / "oscillogram.csv")
    _write_json({"seed": cfg.detection.noise.seed, "state_means_V": state_levels(rows)}, out / "oscillogram.json")
    return 0


def _grid(args: argparse.Namespace) -> list[float]:
    if args.grid:
        return [float(x) for x in args.grid.split(",")]
    return list(np.linspace(args.start, args.stop, args.num))


def cmd_sweep(args: argparse.Namespace, cfg: LinkConfig, out: Path) -> int:
    cfg = _calibrated(cfg, args)
    rows = sweep(cfg, args.parameter, _grid(args), args.frames, cfg.detection.noise.seed)
    write_table(rows, out / f"sweep_{args.parameter}.csv")
    return 0


def cmd_session(args: argparse.Namespace, cfg: LinkConfig, out: Path) -> int:
    cfg = _calibrated(cfg, args)
    report, frames = run_protocol(cfg, args.frames, cfg.detection.noise.seed)
    write_transcript(frames, out / "transcript.csv")
    _write_json(report, out / "session.json")
    return 0


def cmd_gain_report(args: argparse.Namespace, cfg: LinkConfig, out: Path) -> int:
    cfg = _calibrated(cfg, args)
    report = gain_report(cfg)
    report["m_a"] = sender_index(cfg)
    report["m_b"] = receiver_index(cfg)
    _write_json(report, out / "gain_report.json")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None, help="YAML link config (defaults if omitted)")
    common.add_argument("--seed", type=int, default=None, help="noise/choice seed (overrides config)")
    common.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    common.add_argument("--no-noise", action="store_true", help="disable all detector noise")
    common.add_argument("--v-high", type=float, default=PAPER_V_HIGH, help="constructive level target [V]")
    common.add_argument("--v-low", type=float, default=PAPER_V_LOW, help="destructive level target [V]")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="scwlink", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("calibrate", parents=[common], help="fit receiver index and input power to voltage levels")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("oscillogram", parents=[common], help="four-state phase-switching trace")
    p.add_argument("--states", default="0,1,2,3", help="receiver phases in units of pi/2")
    p.add_argument("--frames-per-state", type=int, default=4)
    p.add_argument("--samples-per-frame", type=int, default=8)
    p.add_argument("--cycles", type=int, default=1)
    p.set_defaults(func=cmd_oscillogram)

    p = sub.add_parser("sweep", parents=[common], help="levels, visibility and gain over a parameter grid")
    p.add_argument("--parameter", choices=SWEEP_PARAMETERS, required=True)
    p.add_argument("--grid", default=None, help="comma-separated values")
    p.add_argument("--start", type=float, default=0.0)
    p.add_argument("--stop", type=float, default=math.pi)
    p.add_argument("--num", type=int, default=17)
    p.add_argument("--frames", type=int, default=0, help="protocol frames per point (0 = no QBER)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("session", parents=[common], help="protocol session with sifting and QBER")
    p.add_argument("--frames", type=int, default=10_000)
    p.set_defaults(func=cmd_session)

    p = sub.add_parser("gain-report", parents=[common], help="heterodyne gain in both dB conventions")
    p.set_defaults(func=cmd_gain_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO, format="%(levelname)s %(name)s: %(message)s"
    )
    try:
        cfg = _prepare(args)
        args.out.mkdir(parents=True, exist_ok=True)
        return args.func(args, cfg, args.out)
    except (ConfigError, CalibrationError, ValueError) as exc:
        log.error("%s", exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
