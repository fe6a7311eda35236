"""Target scalar fields on a sampled grid: vortex, Laguerre-Gaussian and ANG modes.

Coordinates follow the FFT-centred convention: sample ``(nx//2, ny//2)`` sits
exactly at the origin, so ``x = (i - nx//2) * pitch``.  Arrays are indexed
``values[j, i]`` (y outer, x inner).
"""
from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass, field
from typing import Union

import numpy as np


class DomainError(ValueError):
    """Raised when an input violates a precondition of an operation."""


@dataclass(frozen=True)
class GridSpec:
    nx: int
    ny: int
    pitch: float

    def __post_init__(self):
        if int(self.nx) != self.nx or int(self.ny) != self.ny:
            raise DomainError("grid sample counts must be integers")
        if self.nx < 2 or self.ny < 2:
            raise DomainError(f"grid needs at least 2x2 samples, got {self.nx}x{self.ny}")
        if not self.pitch > 0:
            raise DomainError(f"pitch must be positive, got {self.pitch}")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.ny, self.nx)

    @property
    def half_extent(self) -> float:
        """Largest radius whose disk stays symmetric inside the grid."""
        return (min(self.nx, self.ny) // 2 - 1) * self.pitch

    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        x = (np.arange(self.nx) - self.nx // 2) * self.pitch
        y = (np.arange(self.ny) - self.ny // 2) * self.pitch
        return x, y

    def coords(self) -> tuple[np.ndarray, np.ndarray]:
        x, y = self.axes()
        return np.meshgrid(x, y)

    def polar(self) -> tuple[np.ndarray, np.ndarray]:
        X, Y = self.coords()
        return np.hypot(X, Y), np.arctan2(Y, X)


# 608 x 684 mirrors at 7.5 um (DLP3000)
DEFAULT_GRID = GridSpec(608, 684, 7.5e-6)


@dataclass
class ComplexField:
    grid: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.complex128)
        if self.values.shape != self.grid.shape:
            raise DomainError(
                f"values shape {self.values.shape} does not match grid {self.grid.shape}")

    @property
    def amplitude(self) -> np.ndarray:
        return np.abs(self.values)

    @property
    def phase(self) -> np.ndarray:
        return np.angle(self.values)

    @property
    def intensity(self) -> np.ndarray:
        return np.abs(self.values) ** 2

    def power(self) -> float:
        return float(np.sum(self.intensity) * self.grid.pitch ** 2)

    def scaled(self, factor) -> "ComplexField":
        return ComplexField(self.grid, self.values * factor)


# ---------------------------------------------------------------------------
# mode descriptors

@dataclass(frozen=True)
class Vortex:
    ell: int
    radius: float

    kind = "vortex"

    def with_ell(self, ell: int) -> "Vortex":
        return Vortex(ell, self.radius)

    @property
    def label(self) -> str:
        return f"vortex:ell={self.ell},radius={self.radius!r}"


@dataclass(frozen=True)
class LG:
    p_r: int
    ell: int
    waist: float

    kind = "lg"

    def __post_init__(self):
        if self.p_r < 0:
            raise DomainError(f"radial index must be >= 0, got {self.p_r}")

    def with_ell(self, ell: int) -> "LG":
        return LG(self.p_r, ell, self.waist)

    @property
    def label(self) -> str:
        return f"lg:p={self.p_r},ell={self.ell},waist={self.waist!r}"


@dataclass(frozen=True)
class ANG:
    j: int
    n_ell: int
    base: Union[Vortex, LG]

    kind = "ang"

    def __post_init__(self):
        if self.n_ell < 0:
            raise DomainError(f"n_ell must be >= 0, got {self.n_ell}")
        if not 0 <= self.j <= 2 * self.n_ell:
            raise DomainError(f"ANG index j={self.j} outside [0, {2 * self.n_ell}]")

    @property
    def label(self) -> str:
        if isinstance(self.base, Vortex):
            return f"ang:j={self.j},n={self.n_ell},base=vortex,radius={self.base.radius!r}"
        return (f"ang:j={self.j},n={self.n_ell},base=lg,p={self.base.p_r},"
                f"waist={self.base.waist!r}")


ModeSpec = Union[Vortex, LG, ANG]

_LABEL_RE = re.compile(r"^(vortex|lg|ang):(.*)$")


def parse_mode(text: str) -> ModeSpec:
    """Inverse of ``ModeSpec.label``, e.g. ``vortex:ell=2,radius=0.001``."""
    m = _LABEL_RE.match(text.strip())
    if not m:
        raise DomainError(f"cannot parse mode descriptor {text!r}")
    kind, body = m.groups()
    try:
        kv = dict(item.split("=", 1) for item in body.split(",") if item)
    except ValueError:
        raise DomainError(f"malformed key=value list in {text!r}") from None
    try:
        if kind == "vortex":
            return Vortex(int(kv["ell"]), float(kv["radius"]))
        if kind == "lg":
            return LG(int(kv["p"]), int(kv["ell"]), float(kv["waist"]))
        if kv["base"] == "vortex":
            base = Vortex(0, float(kv["radius"]))
        elif kv["base"] == "lg":
            base = LG(int(kv["p"]), 0, float(kv["waist"]))
        else:
            raise DomainError(f"unknown ANG base {kv['base']!r}")
        return ANG(int(kv["j"]), int(kv["n"]), base)
    except KeyError as exc:
        raise DomainError(f"mode descriptor {text!r} lacks {exc}") from None


# ---------------------------------------------------------------------------
# field constructors

def vortex_mode(grid: GridSpec, ell: int, radius: float) -> ComplexField:
    """Top-hat disk of radius ``radius`` carrying an ``exp(i*ell*phi)`` phase.

    The sample at the core is set to zero for ``ell != 0`` since the phase is
    undefined there.
    """
    if not radius > 0:
        raise DomainError(f"radius must be positive, got {radius}")
    if radius > grid.half_extent * (1 + 1e-12):
        raise DomainError(
            f"radius {radius:g} m clips the mode (max {grid.half_extent:g} m)")
    r, phi = grid.polar()
    inside = r <= radius
    if ell != 0:
        inside &= r > 0
    values = np.where(inside, np.exp(1j * ell * phi), 0)
    return ComplexField(grid, values)


def genlaguerre(n: int, alpha: float, x):
    """Generalized Laguerre polynomial by the three-term recurrence."""
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev
    cur = 1.0 + alpha - x
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 + alpha - x) * cur - (k + alpha) * prev) / (k + 1)
    return cur


def lg_mode(grid: GridSpec, p_r: int, ell: int, waist: float) -> ComplexField:
    """Waist-plane Laguerre-Gaussian mode, peak-normalized."""
    if not waist > 0:
        raise DomainError(f"waist must be positive, got {waist}")
    if p_r < 0:
        raise DomainError(f"radial index must be >= 0, got {p_r}")
    r, phi = grid.polar()
    u = 2 * r ** 2 / waist ** 2
    envelope = (np.sqrt(u)) ** abs(ell) * genlaguerre(p_r, abs(ell), u) * np.exp(-u / 2)
    values = envelope * np.exp(1j * ell * phi)
    f = normalize_peak(ComplexField(grid, values))
    edge = np.concatenate([f.values[0], f.values[-1], f.values[:, 0], f.values[:, -1]])
    if np.max(np.abs(edge)) >= 1e-6:
        warnings.warn(f"LG waist {waist:g} m too large for grid: edge amplitude "
                      f"{np.max(np.abs(edge)):.2e} >= 1e-6", RuntimeWarning, stacklevel=2)
    return f


def _unit_norm(f: ComplexField) -> ComplexField:
    return f.scaled(1 / math.sqrt(inner_product(f, f).real))


def ang_mode(grid: GridSpec, j: int, n_ell: int, base: Union[Vortex, LG]) -> ComplexField:
    """Discrete-Fourier superposition of the 2*n_ell+1 OAM modes around ell=0.

    Each term is energy-normalized before summation so the set over j is
    orthonormal whenever the OAM terms are; the result is then peak-normalized
    for encoding.
    """
    ANG(j, n_ell, base)  # validates j
    d = 2 * n_ell + 1
    total = np.zeros(grid.shape, dtype=np.complex128)
    for ell in range(-n_ell, n_ell + 1):
        u = _unit_norm(make_field(grid, base.with_ell(ell)))
        total += u.values * np.exp(-2j * np.pi * j * ell / d)
    return normalize_peak(ComplexField(grid, total / math.sqrt(d)))


def make_field(grid: GridSpec, mode: ModeSpec) -> ComplexField:
    if isinstance(mode, Vortex):
        return vortex_mode(grid, mode.ell, mode.radius)
    if isinstance(mode, LG):
        return lg_mode(grid, mode.p_r, mode.ell, mode.waist)
    if isinstance(mode, ANG):
        return ang_mode(grid, mode.j, mode.n_ell, mode.base)
    raise DomainError(f"unknown mode type {type(mode).__name__}")


def uniform_field(grid: GridSpec, value: complex = 1.0) -> ComplexField:
    return ComplexField(grid, np.full(grid.shape, value, dtype=np.complex128))


# ---------------------------------------------------------------------------
# inner products and helpers

def _check_same_grid(f: ComplexField, g: ComplexField):
    if f.grid != g.grid:
        raise DomainError(f"grid mismatch: {f.grid} vs {g.grid}")


def inner_product(f: ComplexField, g: ComplexField) -> complex:
    """Riemann-sum overlap, conjugate-linear in ``f``."""
    _check_same_grid(f, g)
    return complex(np.vdot(f.values, g.values) * f.grid.pitch ** 2)


def norm(f: ComplexField) -> float:
    return math.sqrt(inner_product(f, f).real)


def normalize_peak(f: ComplexField) -> ComplexField:
    peak = np.max(np.abs(f.values))
    if peak == 0:
        raise DomainError("cannot peak-normalize an all-zero field")
    return ComplexField(f.grid, f.values / peak)


def _bilinear(values: np.ndarray, fx: np.ndarray, fy: np.ndarray) -> np.ndarray:
    i0 = np.floor(fx).astype(int)
    j0 = np.floor(fy).astype(int)
    tx = fx - i0
    ty = fy - j0
    return ((1 - tx) * (1 - ty) * values[j0, i0] + tx * (1 - ty) * values[j0, i0 + 1]
            + (1 - tx) * ty * values[j0 + 1, i0] + tx * ty * values[j0 + 1, i0 + 1])


def phase_circulation(f: ComplexField, radius: float, n_points: int | None = None) -> float:
    """Sum of wrapped phase increments around a circle centred on the origin.

    Returns ``2*pi*ell`` for a field with an ``ell``-fold phase winding.
    """
    g = f.grid
    rs = radius / g.pitch
    if not 0 < rs < min(g.nx, g.ny) // 2 - 1:
        raise DomainError(f"loop radius {radius:g} m outside grid")
    if n_points is None:
        n_points = max(64, int(16 * math.pi * rs))
    t = np.arange(n_points) * (2 * np.pi / n_points)
    loop = _bilinear(f.values, g.nx // 2 + rs * np.cos(t), g.ny // 2 + rs * np.sin(t))
    if np.min(np.abs(loop)) < 1e-12:
        raise DomainError("field vanishes on the loop; phase undefined")
    steps = np.angle(np.roll(loop, -1) / loop)
    return float(np.sum(steps))


def radial_profile(f: ComplexField, nbins: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Azimuthally averaged intensity in one-sample-wide radial bins."""
    g = f.grid
    r, _ = g.polar()
    idx = np.rint(r / g.pitch).astype(int)
    if nbins is None:
        nbins = min(g.nx, g.ny) // 2
    keep = idx < nbins
    total = np.bincount(idx[keep], weights=f.intensity[keep], minlength=nbins)
    count = np.bincount(idx[keep], minlength=nbins)
    prof = np.where(count > 0, total / np.maximum(count, 1), 0.0)
    return np.arange(nbins) * g.pitch, prof


def count_rings(f: ComplexField, rel_floor: float = 1e-6) -> int:
    """Number of strict local maxima of the radial intensity profile.

    The central sample counts as a maximum when it exceeds its neighbour.
    Maxima weaker than ``rel_floor`` of the peak are numerical noise and ignored.
    """
    _, prof = radial_profile(f)
    floor = rel_floor * prof.max()
    padded = np.concatenate([[-np.inf], prof, [-np.inf]])
    mid = padded[1:-1]
    peaks = (mid > padded[:-2]) & (mid > padded[2:]) & (mid > floor)
    return int(np.count_nonzero(peaks))
