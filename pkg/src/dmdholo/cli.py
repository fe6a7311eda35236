"""Command-line interface: ``dmdholo {mode,holo,simulate,interfere,sequence,report}``.

Exit codes: 0 success, 1 validation/domain error, 2 I/O or usage error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import analysis, io
from .config import JobConfig
from .fieldgen import (ANG, LG, DomainError, GridSpec, Vortex, make_field,
                       normalize_peak, parse_mode, uniform_field)
from .hologram import GratingConfig, synthesize
from .propagate import ApertureSpec, diffraction_efficiency, simulate_reconstruction

log = logging.getLogger("dmdholo")

DEFAULT_RADIUS = 1.5e-3
DEFAULT_WAIST = 0.5e-3


def _global_flags(parser: argparse.ArgumentParser, suppress: bool):
    d = argparse.SUPPRESS if suppress else None
    parser.add_argument("--grid", nargs=3, metavar=("NX", "NY", "PITCH_M"), default=d,
                        help="panel size in mirrors and mirror pitch (default 608 684 7.5e-6)")
    parser.add_argument("--period", type=int, default=d,
                        help="carrier period in mirrors (default 20)")
    parser.add_argument("--out", default=d, help="output directory")
    parser.add_argument("--config", default=d, help="key=value job file")
    parser.add_argument("--plot", action="store_true", default=argparse.SUPPRESS if suppress else False,
                        help="also render PNG figures")
    parser.add_argument("-v", "--verbose", action="store_true",
                        default=argparse.SUPPRESS if suppress else False)


def _mode_flags(p: argparse.ArgumentParser):
    g = p.add_argument_group("mode selection")
    g.add_argument("--spec", help="mode descriptor, e.g. vortex:ell=2,radius=0.001")
    g.add_argument("--vortex", type=int, metavar="ELL")
    g.add_argument("--lg", type=int, nargs=2, metavar=("P", "ELL"))
    g.add_argument("--ang", type=int, nargs=2, metavar=("J", "N"))
    g.add_argument("--radius", type=float, help=f"vortex radius in m (default {DEFAULT_RADIUS})")
    g.add_argument("--waist", type=float, help=f"LG waist in m (default {DEFAULT_WAIST})")
    g.add_argument("--base-vortex-radius", type=float, metavar="R")
    g.add_argument("--base-lg", nargs=2, metavar=("P", "WAIST"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dmdholo", description=__doc__.splitlines()[0])
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)

    p = sub.add_parser("mode", parents=[common], help="write a target field (CF64 + intensity PGM)")
    _mode_flags(p)
    p.add_argument("--name", default="mode")

    p = sub.add_parser("holo", parents=[common], help="synthesize a binary hologram")
    _mode_flags(p)
    p.add_argument("--field", help="CF64 input field (peak-normalized on load)")
    p.add_argument("--uniform", type=float, metavar="A", help="constant field of amplitude A")
    p.add_argument("--phase", type=float, default=0.0, help="phase of --uniform field (rad)")
    p.add_argument("--format", choices=["P4", "P5"], default="P4")
    p.add_argument("--name", default="holo")

    p = sub.add_parser("simulate", parents=[common], help="reconstruct the first order of a hologram")
    p.add_argument("hologram")
    p.add_argument("--target", help="CF64 target for the fidelity metric")
    p.add_argument("--aperture", nargs=3, type=float, metavar=("CX", "CY", "R"),
                   help="aperture centre and radius in cycles/m (default first order)")
    p.add_argument("--name", default="recon")

    p = sub.add_parser("interfere", parents=[common], help="interferogram with a tilted plane wave")
    p.add_argument("field")
    p.add_argument("--tilt", nargs=2, type=float, default=[0.0, 0.0], metavar=("NUX", "NUY"),
                   help="reference tilt in cycles/m")
    p.add_argument("--ref-amplitude", type=float, default=1.0)
    p.add_argument("--name", default="interferogram")

    p = sub.add_parser("sequence", parents=[common], help="frame-sequenced switching timeline")
    p.add_argument("--frames", nargs="+", metavar="MODE", help="mode descriptors, displayed in order")
    p.add_argument("--channels", nargs="+", metavar="MODE", help="detection modes (default: frames)")
    p.add_argument("--frame-rate", type=float)
    p.add_argument("--sample-rate", type=float)
    p.add_argument("--cycles", type=int)
    p.add_argument("--name", default="timeline")

    p = sub.add_parser("report", parents=[common], help="MUB, crosstalk and efficiency tables")
    p.add_argument("--mub", type=int, metavar="N")
    p.add_argument("--crosstalk", action="store_true")
    p.add_argument("--efficiency", action="store_true")
    p.add_argument("--vortex-range", type=int, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--modes", nargs="+", metavar="MODE")
    p.add_argument("--radius", type=float)
    p.add_argument("--base-vortex-radius", type=float, metavar="R")
    p.add_argument("--base-lg", nargs=2, metavar=("P", "WAIST"))
    p.add_argument("--no-plot", action="store_true", help="skip the PNG figures")
    return parser


# ---------------------------------------------------------------------------

def job_from_args(args) -> JobConfig:
    cfg = JobConfig.load(args.config) if getattr(args, "config", None) else JobConfig()
    if getattr(args, "grid", None):
        nx, ny, pitch = args.grid
        try:
            cfg.grid = GridSpec(int(nx), int(ny), float(pitch))
        except ValueError as exc:
            raise DomainError(f"bad --grid: {exc}") from None
    if getattr(args, "period", None) is not None:
        cfg.period_samples = GratingConfig(args.period).period_samples
    if getattr(args, "out", None):
        cfg.out = args.out
    return cfg


def _base_from_args(args):
    if getattr(args, "base_lg", None):
        return LG(int(args.base_lg[0]), 0, float(args.base_lg[1]))
    return Vortex(0, args.base_vortex_radius or args.radius or DEFAULT_RADIUS)


def mode_from_args(args, cfg: JobConfig):
    if args.spec:
        return parse_mode(args.spec)
    if args.vortex is not None:
        return Vortex(args.vortex, args.radius or DEFAULT_RADIUS)
    if args.lg is not None:
        return LG(args.lg[0], args.lg[1], args.waist or DEFAULT_WAIST)
    if args.ang is not None:
        return ANG(args.ang[0], args.ang[1], _base_from_args(args))
    if cfg.modes:
        return cfg.modes[0]
    return None


def _outdir(cfg: JobConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _plot(args) -> bool:
    return bool(getattr(args, "plot", False))


def cmd_mode(args, cfg: JobConfig) -> int:
    mode = mode_from_args(args, cfg)
    if mode is None:
        raise DomainError("no mode given (use --vortex, --lg, --ang or --spec)")
    f = make_field(cfg.grid, mode)
    out = _outdir(cfg)
    io.write_cf64(out / f"{args.name}.cf64", f)
    io.write_p5(out / f"{args.name}_intensity.pgm", io.intensity_image(f.intensity))
    if _plot(args):
        from .plotting import plot_field
        plot_field(f, out / f"{args.name}.png", mode.label)
    print(f"mode {mode.label} -> {out / (args.name + '.cf64')}")
    return 0


def cmd_holo(args, cfg: JobConfig) -> int:
    if args.field:
        f = io.read_cf64(args.field)
        if np.any(f.values != 0):
            f = normalize_peak(f)
        label = args.field
    elif args.uniform is not None:
        if not 0 <= args.uniform <= 1:
            raise DomainError("--uniform amplitude must lie in [0, 1]")
        f = uniform_field(cfg.grid, args.uniform * np.exp(1j * args.phase))
        label = f"uniform {args.uniform:g}"
    else:
        mode = mode_from_args(args, cfg)
        if mode is None:
            raise DomainError("no field given (use --field, --uniform or a mode flag)")
        f = make_field(cfg.grid, mode)
        label = mode.label
    holo = synthesize(f, cfg.grating)
    out = _outdir(cfg)
    path = out / f"{args.name}.pgm"
    io.write_hologram(path, holo, args.format)
    if _plot(args):
        from .plotting import plot_hologram
        plot_hologram(holo, out / f"{args.name}.png", label)
    print(f"hologram ({label}) -> {path}  fill={holo.fill_factor:.6f}")
    return 0


def cmd_simulate(args, cfg: JobConfig) -> int:
    holo = io.read_hologram(args.hologram)
    if args.aperture:
        ap = ApertureSpec((args.aperture[0], args.aperture[1]), args.aperture[2])
    else:
        ap = cfg.aperture or ApertureSpec.first_order(holo.grid, holo.config.period_samples)
    recon = simulate_reconstruction(holo, ap)
    metrics = {"efficiency": diffraction_efficiency(holo, ap)}
    if args.target:
        target = io.read_cf64(args.target)
        metrics["fidelity"] = analysis.fidelity(recon, target)
    out = _outdir(cfg)
    io.write_cf64(out / f"{args.name}.cf64", recon)
    io.write_p5(out / f"{args.name}_intensity.pgm", io.intensity_image(recon.intensity))
    text = "".join(f"{k} = {io.fmt_float(v)}\n" for k, v in metrics.items())
    (out / f"{args.name}_metrics.txt").write_text(text)
    if _plot(args):
        from .plotting import plot_field
        plot_field(recon, out / f"{args.name}.png", f"first order of {Path(args.hologram).name}")
    sys.stdout.write(text)
    return 0


def cmd_interfere(args, cfg: JobConfig) -> int:
    f = io.read_cf64(args.field)
    img = analysis.interferogram(f, tuple(args.tilt), args.ref_amplitude)
    out = _outdir(cfg)
    io.write_p5(out / f"{args.name}.pgm", io.intensity_image(img))
    if _plot(args):
        from .plotting import plot_image
        plot_image(img, f.grid, out / f"{args.name}.png", "interferogram")
    print(f"interferogram -> {out / (args.name + '.pgm')}")
    return 0


def cmd_sequence(args, cfg: JobConfig) -> int:
    if args.frames:
        cfg.modes = [parse_mode(m) for m in args.frames]
    if args.channels:
        cfg.channels = [parse_mode(m) for m in args.channels]
    for attr in ("frame_rate", "sample_rate", "cycles"):
        if getattr(args, attr) is not None:
            setattr(cfg, attr, getattr(args, attr))
    if not cfg.modes:
        raise DomainError("no frames given (use --frames or 'mode =' lines in --config)")
    holos = [synthesize(normalize_peak(make_field(cfg.grid, m)), cfg.grating) for m in cfg.modes]
    frames = analysis.schedule(holos, cfg.frame_rate, cfg.cycles)
    det = cfg.detection_modes()
    channels = analysis.orthonormalize([make_field(cfg.grid, m) for m in det],
                                       method="symmetric")
    samples = analysis.switching_timeline(frames, cfg.sample_rate, channels, cfg.aperture)
    labels = [m.label for m in det]
    out = _outdir(cfg)
    (out / f"{args.name}.csv").write_text(io.timeline_csv(samples, labels))
    if _plot(args):
        from .plotting import plot_timeline
        plot_timeline(samples, labels, out / f"{args.name}.png",
                      analysis.frame_boundaries(frames))
    print(f"{len(samples)} samples x {len(labels)} channels -> {out / (args.name + '.csv')}")
    return 0


def _report_modes(args, cfg: JobConfig) -> list:
    if args.vortex_range:
        lo, hi = args.vortex_range
        return [Vortex(ell, args.radius or DEFAULT_RADIUS) for ell in range(lo, hi + 1)]
    if args.modes:
        return [parse_mode(m) for m in args.modes]
    return list(cfg.modes)


def cmd_report(args, cfg: JobConfig) -> int:
    out = _outdir(cfg)
    wrote = []
    plot = not args.no_plot
    if plot:
        from .plotting import plot_matrix
    if args.mub is not None:
        base = _base_from_args(args)
        M = analysis.mub_matrix(args.mub, base, cfg.grid)
        rows = [base.with_ell(ell).label for ell in range(-args.mub, args.mub + 1)]
        cols = [ANG(j, args.mub, base).label for j in range(2 * args.mub + 1)]
        (out / "mub.csv").write_text(io.matrix_csv(M, rows, cols))
        wrote.append("mub.csv")
        print(f"MUB n_ell={args.mub}: max |M - 1/{2 * args.mub + 1}| = "
              f"{np.abs(M - 1 / (2 * args.mub + 1)).max():.3e}")
        if plot:
            plot_matrix(M, [f"l={e}" for e in range(-args.mub, args.mub + 1)],
                        [f"j={j}" for j in range(2 * args.mub + 1)], out / "mub.png",
                        "OAM vs ANG overlap")
    if args.crosstalk or args.efficiency:
        modes = _report_modes(args, cfg)
        if not modes:
            raise DomainError("empty mode set")
        labels = [m.label for m in modes]
        if args.crosstalk:
            X = analysis.crosstalk_matrix(modes, cfg.grid, cfg.grating, cfg.aperture)
            (out / "crosstalk.csv").write_text(io.matrix_csv(X, labels, labels))
            wrote.append("crosstalk.csv")
            if plot:
                plot_matrix(X, labels, labels, out / "crosstalk.png", "modal crosstalk")
        if args.efficiency:
            effs = np.array([[diffraction_efficiency(
                synthesize(normalize_peak(make_field(cfg.grid, m)), cfg.grating), cfg.aperture)]
                for m in modes])
            (out / "efficiency.csv").write_text(io.matrix_csv(effs, labels, ["efficiency"]))
            wrote.append("efficiency.csv")
            if plot:
                plot_matrix(effs, labels, ["efficiency"], out / "efficiency.png",
                            "first-order efficiency")
    if not wrote:
        raise DomainError("nothing to report (use --mub, --crosstalk or --efficiency)")
    print("wrote " + ", ".join(str(out / w) for w in wrote))
    return 0


COMMANDS = {
    "mode": cmd_mode,
    "holo": cmd_holo,
    "simulate": cmd_simulate,
    "interfere": cmd_interfere,
    "sequence": cmd_sequence,
    "report": cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = job_from_args(args)
        return COMMANDS[args.command](args, cfg)
    except OSError as exc:
        print(f"dmdholo: {exc}", file=sys.stderr)
        return 2
    except (DomainError, ValueError) as exc:
        print(f"dmdholo: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
