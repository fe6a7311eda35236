"""Line-oriented ``key = value`` job configuration.

Grammar (one setting per line, ``#`` starts a comment line)::

    grid = NX NY PITCH_M
    period = N
    aperture = auto | CX CY RADIUS        (cycles per metre)
    out = DIR
    mode = <mode descriptor>              (repeatable, in order)
    channel = <mode descriptor>           (repeatable; defaults to the modes)
    frame_rate = HZ
    sample_rate = HZ
    cycles = N

Mode descriptors are the ``label`` strings of :mod:`dmdholo.fieldgen`, e.g.
``vortex:ell=5,radius=0.0015``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .fieldgen import DEFAULT_GRID, DomainError, GridSpec, ModeSpec, parse_mode
from .hologram import DEFAULT_PERIOD, GratingConfig
from .propagate import ApertureSpec


@dataclass
class JobConfig:
    grid: GridSpec = DEFAULT_GRID
    period_samples: int = DEFAULT_PERIOD
    modes: list = field(default_factory=list)
    channels: list = field(default_factory=list)
    aperture: ApertureSpec | None = None  # None means the default first-order disk
    out: str = "."
    frame_rate: float = 4000.0
    sample_rate: float = 200000.0
    cycles: int = 1

    @property
    def grating(self) -> GratingConfig:
        return GratingConfig(self.period_samples)

    def resolved_aperture(self) -> ApertureSpec:
        return self.aperture or ApertureSpec.first_order(self.grid, self.period_samples)

    def detection_modes(self) -> list:
        return self.channels or _unique(self.modes)

    def to_text(self) -> str:
        g = self.grid
        lines = [f"grid = {g.nx} {g.ny} {g.pitch!r}",
                 f"period = {self.period_samples}"]
        if self.aperture is None:
            lines.append("aperture = auto")
        else:
            (cx, cy), r = self.aperture.center, self.aperture.radius
            lines.append(f"aperture = {float(cx)!r} {float(cy)!r} {float(r)!r}")
        lines.append(f"out = {self.out}")
        lines += [f"mode = {m.label}" for m in self.modes]
        lines += [f"channel = {m.label}" for m in self.channels]
        lines += [f"frame_rate = {float(self.frame_rate)!r}",
                  f"sample_rate = {float(self.sample_rate)!r}",
                  f"cycles = {self.cycles}"]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "JobConfig":
        cfg = cls()
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise DomainError(f"config line {lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            try:
                _apply(cfg, key, value)
            except (ValueError, IndexError) as exc:
                raise DomainError(f"config line {lineno} ({key}): {exc}") from None
        return cfg

    @classmethod
    def load(cls, path) -> "JobConfig":
        return cls.from_text(Path(path).read_text())

    def save(self, path):
        Path(path).write_text(self.to_text())


def _apply(cfg: JobConfig, key: str, value: str):
    if key == "grid":
        nx, ny, pitch = value.split()
        cfg.grid = GridSpec(int(nx), int(ny), float(pitch))
    elif key == "period":
        cfg.period_samples = GratingConfig(int(value)).period_samples
    elif key == "aperture":
        if value == "auto":
            cfg.aperture = None
        else:
            cx, cy, r = (float(v) for v in value.split())
            cfg.aperture = ApertureSpec((cx, cy), r)
    elif key == "out":
        cfg.out = value
    elif key == "mode":
        cfg.modes.append(parse_mode(value))
    elif key == "channel":
        cfg.channels.append(parse_mode(value))
    elif key == "frame_rate":
        cfg.frame_rate = float(value)
    elif key == "sample_rate":
        cfg.sample_rate = float(value)
    elif key == "cycles":
        cfg.cycles = int(value)
    else:
        raise ValueError(f"unknown key {key!r}")


def _unique(modes: list[ModeSpec]) -> list[ModeSpec]:
    seen, out = set(), []
    for m in modes:
        if m not in seen:
            seen.add(m)
            out.append(m)
    return out
