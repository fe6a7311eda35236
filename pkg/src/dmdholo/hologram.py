"""Binary amplitude holograms by pulse-width / pulse-position modulation.

The local field amplitude sets the duty cycle ``w`` of a carrier grating and
the local phase sets its lateral shift ``p``.  The first diffraction order of
the resulting on/off pattern then carries ``A * exp(i*phi) / pi``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .fieldgen import ComplexField, DomainError, GridSpec

DEFAULT_PERIOD = 20

# Sign linking the analytic coefficients T_m (pulses centred at (k+p)*x0,
# coefficient exp(+2i*pi*m*p)) to numpy's forward DFT (exp(-2i*pi*k*n/N)):
# T_m equals DFT bin ORDER_SIGN * m.  Pinned by the DFT oracle in the tests.
ORDER_SIGN = -1

_NORM_TOL = 1e-12

# Carrier phase is referenced to the mirror edge half a pitch below the grid
# origin, so mirror centres sit at half-integer sample positions relative to
# pulse centres.  Integer alignment would put a mirror on every pulse centre
# and leave a one-mirror grating wherever the amplitude is merely tiny.
CARRIER_ORIGIN_SAMPLES = -0.5


@dataclass(frozen=True)
class GratingConfig:
    period_samples: int = DEFAULT_PERIOD
    orientation: str = "x"

    def __post_init__(self):
        if int(self.period_samples) != self.period_samples or self.period_samples < 4:
            raise DomainError(
                f"period_samples must be an integer >= 4, got {self.period_samples}")
        if self.orientation != "x":
            raise DomainError("only carriers along +x are supported")

    def period_m(self, grid: GridSpec) -> float:
        return self.period_samples * grid.pitch


@dataclass(frozen=True)
class PulseParams:
    w: float
    p: float = 0.0

    def __post_init__(self):
        if not 0 <= self.w <= 1:
            raise DomainError(f"duty cycle w={self.w} outside [0, 1]")
        if not 0 <= self.p < 2:
            raise DomainError(f"pulse position p={self.p} outside [0, 2)")


@dataclass
class BinaryHologram:
    grid: GridSpec
    bits: np.ndarray = field(repr=False)
    config: GratingConfig = GratingConfig()

    def __post_init__(self):
        bits = np.asarray(self.bits)
        if bits.shape != self.grid.shape:
            raise DomainError(f"bits shape {bits.shape} does not match grid {self.grid.shape}")
        if not np.all((bits == 0) | (bits == 1)):
            raise DomainError("hologram bits must be 0 or 1")
        self.bits = bits.astype(np.uint8)

    @property
    def fill_factor(self) -> float:
        return float(self.bits.mean())


def rect(u):
    """1 where ``|u| <= 1/2``, else 0 (boundary inclusive)."""
    return (np.abs(np.asarray(u)) <= 0.5).astype(np.uint8)


def _pulse_bits(cycles: np.ndarray, w) -> np.ndarray:
    # distance (in periods) to the nearest pulse centre; a pulse of zero width is empty
    d = cycles - np.round(cycles)
    w = np.asarray(w)
    return ((np.abs(d) <= w / 2) & (w > 0)).astype(np.uint8)


def uniform_grating_1d(n: int, period_samples: int, params: PulseParams,
                       offset: float = 0.5) -> np.ndarray:
    """Sampled pulse train with pulses of width ``w*x0`` centred at ``(k+p)*x0``.

    Sample ``i`` sits at ``(i + offset) * x0 / period_samples``; the default
    offset puts samples at mirror centres measured from the panel edge.
    """
    if n < period_samples:
        raise DomainError(f"need n >= period_samples ({n} < {period_samples})")
    cycles = (np.arange(n) + offset) / period_samples - params.p
    return _pulse_bits(cycles, params.w)


def analytic_coefficient(m: int, params: PulseParams) -> complex:
    """Fourier coefficient ``sin(pi*m*w)/(pi*m) * exp(2i*pi*m*p)`` of the pulse train."""
    if m == 0:
        return complex(params.w)
    return complex(math.sin(math.pi * m * params.w) / (math.pi * m)
                   * np.exp(2j * math.pi * m * params.p))


def encode_amplitude(a):
    """Duty cycle ``arcsin(a)/pi`` for a peak-normalized amplitude ``a``."""
    a = np.asarray(a, dtype=float)
    if np.any(a < 0) or np.any(a > 1 + _NORM_TOL) or np.any(np.isnan(a)):
        raise DomainError("amplitude must lie in [0, 1]; normalize the field first")
    w = np.arcsin(np.minimum(a, 1.0)) / np.pi
    return float(w) if w.ndim == 0 else w


def wrap_phase(phi):
    """Wrap to ``[0, 2*pi)``."""
    phi = np.mod(np.asarray(phi, dtype=float), 2 * np.pi)
    return np.where(phi >= 2 * np.pi, 0.0, phi)


def encode_phase(phi):
    """Pulse position ``phi/pi`` in ``[0, 2)`` after wrapping ``phi``."""
    p = wrap_phase(phi) / np.pi
    p = np.where(p >= 2, 0.0, p)
    return float(p) if p.ndim == 0 else p


def pulse_position(p):
    """Pulse-train position equivalent to a carrier shift of ``pi*p``.

    ``cos(2*pi*x/x0 + pi*p) >= cos(pi*w)`` holds exactly where a pulse of width
    ``w`` centred at ``x0 * (k - p/2)`` covers ``x``.
    """
    return np.mod(-np.asarray(p, dtype=float) / 2, 1.0)


def encode_field(field: ComplexField) -> tuple[np.ndarray, np.ndarray]:
    """Per-sample ``(w, p)``; zero-amplitude samples get ``w = p = 0``."""
    amp = np.abs(field.values)
    w = encode_amplitude(amp)
    p = np.where(amp > 0, encode_phase(np.angle(field.values)), 0.0)
    return np.asarray(w), np.asarray(p)


def carrier_cycles(grid: GridSpec, period_samples: int) -> np.ndarray:
    """Carrier coordinate ``x/x0`` of each mirror column, from the carrier origin."""
    return (np.arange(grid.nx) - grid.nx // 2 - CARRIER_ORIGIN_SAMPLES) / period_samples


def carrier_origin(grid: GridSpec) -> tuple[float, float]:
    """Physical coordinates of the carrier phase reference point."""
    return CARRIER_ORIGIN_SAMPLES * grid.pitch, CARRIER_ORIGIN_SAMPLES * grid.pitch


def synthesize(field: ComplexField, config: GratingConfig = GratingConfig()) -> BinaryHologram:
    """Threshold the modulated carrier at mirror centres.

    Equivalent to ``1/2 + 1/2*sgn(cos(2*pi*x/x0 + pi*p) - cos(pi*w))`` with
    ``sgn(0) = +1``, evaluated in cycles so that ties are decided exactly.
    """
    if np.max(np.abs(field.values)) > 1 + _NORM_TOL:
        raise DomainError("field is not peak-normalized (max |value| > 1)")
    w, p = encode_field(field)
    g = field.grid
    P = config.period_samples
    cycles = carrier_cycles(g, P)[None, :] - pulse_position(p)
    return BinaryHologram(g, _pulse_bits(cycles, w), config)


def carrier_threshold(field: ComplexField, config: GratingConfig = GratingConfig()) -> np.ndarray:
    """Signed margin ``cos(carrier) - cos(pi*w)`` used to cross-check ``synthesize``."""
    w, p = encode_field(field)
    g = field.grid
    x_over_x0 = carrier_cycles(g, config.period_samples)[None, :]
    return np.cos(2 * np.pi * x_over_x0 + np.pi * p) - np.cos(np.pi * w)


def predicted_first_order(field: ComplexField) -> ComplexField:
    """Slowly-varying first-order field ``sin(pi*w) * exp(i*pi*p) / pi``."""
    w, p = encode_field(field)
    return ComplexField(field.grid, np.sin(np.pi * w) * np.exp(1j * np.pi * p) / np.pi)


def duty_cycle_profile(holo: BinaryHologram) -> np.ndarray:
    """Fraction of on-mirrors in each full carrier period along x, per row.

    Windows are centred on carrier phase zero so an unshifted pulse is never
    split; partial periods at the panel edges are dropped.
    """
    P = holo.config.period_samples
    # window k holds the mirrors whose carrier coordinate lies in [k - 1/2, k + 1/2)
    window = np.floor(carrier_cycles(holo.grid, P) + 0.5).astype(int)
    full = [k for k in np.unique(window) if np.count_nonzero(window == k) == P]
    start = int(np.argmax(window == full[0]))
    cells = holo.bits[:, start:start + len(full) * P].reshape(holo.grid.ny, len(full), P)
    return cells.mean(axis=2)
