"""Simulated 4f verification arm: Fourier plane, first-order aperture, demodulation."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fieldgen import ComplexField, DomainError, GridSpec
from .hologram import BinaryHologram, carrier_origin

DEFAULT_PAD = 2


@dataclass
class SpectrumField:
    """Zero-centred unitary spectrum of a (possibly zero-padded) field.

    ``values[v, u]`` sits at frequency ``((u - NX//2) * dfx, (v - NY//2) * dfy)``
    with ``NX, NY`` the padded sizes.  ``origin`` is the index of the source
    grid's first sample inside the padded frame.
    """
    grid: GridSpec
    values: np.ndarray = field(repr=False)
    origin: tuple[int, int] = (0, 0)

    @property
    def padded_shape(self) -> tuple[int, int]:
        return self.values.shape

    @property
    def df(self) -> tuple[float, float]:
        ny, nx = self.values.shape
        return 1 / (nx * self.grid.pitch), 1 / (ny * self.grid.pitch)

    def freq_axes(self) -> tuple[np.ndarray, np.ndarray]:
        ny, nx = self.values.shape
        dfx, dfy = self.df
        return (np.arange(nx) - nx // 2) * dfx, (np.arange(ny) - ny // 2) * dfy

    def nyquist(self) -> tuple[float, float]:
        fx, fy = self.freq_axes()
        return min(-fx[0], fx[-1]), min(-fy[0], fy[-1])

    def power(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2) * self.grid.pitch ** 2)


@dataclass(frozen=True)
class ApertureSpec:
    center: tuple[float, float]
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise DomainError(f"aperture radius must be positive, got {self.radius}")

    @classmethod
    def first_order(cls, grid: GridSpec, period_samples: int, order: int = 1) -> "ApertureSpec":
        """Disk of radius ``1/(2*x0)`` around the ``order``-th carrier harmonic."""
        x0 = period_samples * grid.pitch
        return cls((order / x0, 0.0), 1 / (2 * x0))


def forward_spectrum(f: ComplexField, pad: int = 1) -> SpectrumField:
    """Unitary, zero-centred 2D DFT after embedding ``f`` in a ``pad``-times larger frame."""
    g = f.grid
    if pad < 1 or int(pad) != pad:
        raise DomainError(f"pad factor must be a positive integer, got {pad}")
    NY, NX = pad * g.ny, pad * g.nx
    oy, ox = (NY - g.ny) // 2, (NX - g.nx) // 2
    frame = np.zeros((NY, NX), dtype=np.complex128)
    frame[oy:oy + g.ny, ox:ox + g.nx] = f.values
    spec = np.fft.fftshift(np.fft.fft2(np.fft.ifftshift(frame), norm="ortho"))
    return SpectrumField(g, spec, (oy, ox))


def inverse_spectrum(s: SpectrumField) -> ComplexField:
    """Inverse of ``forward_spectrum``, cropped back to the source grid."""
    frame = np.fft.fftshift(np.fft.ifft2(np.fft.ifftshift(s.values), norm="ortho"))
    g = s.grid
    oy, ox = s.origin
    return ComplexField(g, frame[oy:oy + g.ny, ox:ox + g.nx])


def aperture_mask(s: SpectrumField, ap: ApertureSpec) -> np.ndarray:
    nyq_x, nyq_y = s.nyquist()
    cx, cy = ap.center
    if abs(cx) + ap.radius > nyq_x or abs(cy) + ap.radius > nyq_y:
        raise DomainError("aperture extends beyond the frequency grid")
    fx, fy = s.freq_axes()
    return (fx[None, :] - cx) ** 2 + (fy[:, None] - cy) ** 2 <= ap.radius ** 2


def extract_first_order(s: SpectrumField, ap: ApertureSpec) -> ComplexField:
    """Keep the aperture disk, transform back and remove the carrier tilt.

    The tilt is removed about the carrier origin used by ``synthesize`` so the
    recovered envelope carries the encoded phase without a global offset.
    """
    masked = SpectrumField(s.grid, np.where(aperture_mask(s, ap), s.values, 0), s.origin)
    out = inverse_spectrum(masked)
    X, Y = s.grid.coords()
    x_ref, y_ref = carrier_origin(s.grid)
    X, Y = X - x_ref, Y - y_ref
    cx, cy = ap.center
    return ComplexField(s.grid, out.values * np.exp(-2j * np.pi * (cx * X + cy * Y)))


def _illuminate(h: BinaryHologram) -> ComplexField:
    return ComplexField(h.grid, h.bits.astype(np.complex128))


def default_aperture(h: BinaryHologram) -> ApertureSpec:
    return ApertureSpec.first_order(h.grid, h.config.period_samples)


def simulate_reconstruction(h: BinaryHologram, ap: ApertureSpec | None = None,
                            pad: int = DEFAULT_PAD) -> ComplexField:
    """First-order envelope seen behind the aperture under unit plane-wave illumination."""
    ap = ap or default_aperture(h)
    return extract_first_order(forward_spectrum(_illuminate(h), pad), ap)


def diffraction_efficiency(h: BinaryHologram, ap: ApertureSpec | None = None,
                           pad: int = DEFAULT_PAD) -> float:
    """Power passed by the aperture over the power incident on the full panel."""
    ap = ap or default_aperture(h)
    s = forward_spectrum(_illuminate(h), pad)
    passed = np.sum(np.abs(s.values[aperture_mask(s, ap)]) ** 2)
    return float(passed / (h.grid.nx * h.grid.ny))
