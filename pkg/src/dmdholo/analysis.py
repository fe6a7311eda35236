"""Modal analysis of reconstructed fields.

Detection is ideal modal projection: a field's content in mode ``b`` is
``<b, f>`` under :func:`dmdholo.fieldgen.inner_product`.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .fieldgen import (ComplexField, DomainError, GridSpec, ModeSpec, Vortex, LG,
                       inner_product, make_field, ang_mode, norm, normalize_peak)
from .hologram import BinaryHologram, GratingConfig, synthesize
from .propagate import ApertureSpec, diffraction_efficiency, simulate_reconstruction

log = logging.getLogger(__name__)

DEFAULT_FRAME_RATE = 4000.0


@dataclass
class DecompositionResult:
    basis: list
    coefficients: np.ndarray
    residual_power: float

    @property
    def powers(self) -> np.ndarray:
        return np.abs(self.coefficients) ** 2

    @property
    def labels(self) -> list[str]:
        return [getattr(b, "label", str(b)) for b in self.basis]


@dataclass
class SwitchFrame:
    hologram: BinaryHologram
    duration: float

    def __post_init__(self):
        if not self.duration > 0:
            raise DomainError(f"frame duration must be positive, got {self.duration}")


@dataclass
class TimelineSample:
    time: float
    channel_power: tuple


def orthonormalize(fields: Sequence[ComplexField], tol: float = 1e-12,
                   method: str = "gram-schmidt") -> list[ComplexField]:
    """Orthonormal fields spanning the same space as ``fields``.

    ``gram-schmidt`` is modified Gram-Schmidt with one re-orthogonalization
    pass; a member whose remaining norm falls below ``tol`` times its original
    norm is rejected as dependent.  ``symmetric`` (Loewdin) treats all members
    alike, so permuting the input permutes the output.
    """
    if method == "symmetric":
        return _symmetric_orthonormalize(fields, tol)
    if method != "gram-schmidt":
        raise DomainError(f"unknown orthonormalization method {method!r}")
    out: list[ComplexField] = []
    for k, f in enumerate(fields):
        n0 = norm(f)
        if n0 == 0:
            raise DomainError(f"basis member {k} is identically zero")
        v = f.values.copy()
        for _ in range(2):
            for b in out:
                v -= inner_product(b, ComplexField(f.grid, v)) * b.values
        nv = norm(ComplexField(f.grid, v))
        if nv < tol * n0:
            raise DomainError(f"basis member {k} is linearly dependent on earlier members")
        out.append(ComplexField(f.grid, v / nv))
    return out


def _symmetric_orthonormalize(fields, tol):
    n = len(fields)
    S = np.empty((n, n), dtype=complex)
    for a in range(n):
        for b in range(a, n):
            S[a, b] = inner_product(fields[a], fields[b])
            S[b, a] = np.conj(S[a, b])
    d = np.sqrt(S.diagonal().real)
    if np.any(d == 0):
        raise DomainError("basis contains an identically zero member")
    # scale to unit diagonal first so the rank test is relative
    C = S / np.outer(d, d)
    lam, U = np.linalg.eigh(C)
    if lam.min() < tol * lam.max():
        raise DomainError("basis members are linearly dependent")
    T = (U / np.sqrt(lam)) @ U.conj().T / d[:, None]
    stack = np.stack([f.values for f in fields])
    out = np.tensordot(T.T, stack, axes=1)
    return [ComplexField(fields[0].grid, v) for v in out]


def decompose(f: ComplexField, basis: Sequence[ComplexField],
              labels: Sequence | None = None) -> DecompositionResult:
    """Coefficients ``<b_k, f> / |f|`` over an orthonormal basis."""
    nf = norm(f)
    if nf == 0:
        raise DomainError("cannot decompose an all-zero field")
    c = np.array([inner_product(b, f) for b in basis]) / nf
    raw = 1.0 - float(np.sum(np.abs(c) ** 2))
    residual = raw
    if raw < 0:
        log.debug("clamping residual power %.3e to 0", raw)
        residual = 0.0
    return DecompositionResult(list(labels) if labels is not None else list(range(len(basis))),
                               c, residual)


def fidelity(f: ComplexField, target: ComplexField) -> float:
    """Normalized squared overlap ``|<t, f>|^2 / (|t|^2 |f|^2)``."""
    nt, nf = inner_product(target, target).real, inner_product(f, f).real
    if nt == 0 or nf == 0:
        raise DomainError("fidelity undefined for an all-zero field")
    return min(1.0, abs(inner_product(target, f)) ** 2 / (nt * nf))


def interferogram(f: ComplexField, tilt: tuple[float, float] = (0.0, 0.0),
                  ref_amplitude: float = 1.0) -> np.ndarray:
    """Intensity of ``f`` plus a tilted plane wave (tilt in cycles per metre)."""
    if not ref_amplitude > 0:
        raise DomainError(f"reference amplitude must be positive, got {ref_amplitude}")
    X, Y = f.grid.coords()
    ref = ref_amplitude * np.exp(2j * np.pi * (tilt[0] * X + tilt[1] * Y))
    return np.abs(f.values + ref) ** 2


def mub_matrix(n_ell: int, base: Vortex | LG, grid: GridSpec) -> np.ndarray:
    """Normalized overlaps ``|<u_ell, theta_j>|^2`` between OAM and ANG bases.

    Rows run over ``ell = -n_ell..n_ell``, columns over ``j = 0..2*n_ell``.
    """
    if n_ell < 1:
        raise DomainError(f"n_ell must be >= 1, got {n_ell}")
    oam = [make_field(grid, base.with_ell(ell)) for ell in range(-n_ell, n_ell + 1)]
    ang = [ang_mode(grid, j, n_ell, base) for j in range(2 * n_ell + 1)]
    M = np.empty((len(oam), len(ang)))
    for a, u in enumerate(oam):
        nu = inner_product(u, u).real
        for b, t in enumerate(ang):
            M[a, b] = abs(inner_product(u, t)) ** 2 / (nu * inner_product(t, t).real)
    return M


def reconstruct(target: ComplexField, config: GratingConfig = GratingConfig(),
                aperture: ApertureSpec | None = None) -> ComplexField:
    """Hologram pipeline: peak-normalize, synthesize, simulate the first order."""
    return simulate_reconstruction(synthesize(normalize_peak(target), config), aperture)


def identity_pipeline(target: ComplexField, *_args, **_kwargs) -> ComplexField:
    return target


def crosstalk_matrix(modes: Sequence[ModeSpec], grid: GridSpec,
                     config: GratingConfig = GratingConfig(),
                     aperture: ApertureSpec | None = None,
                     pipeline: Callable = reconstruct) -> np.ndarray:
    """Row ``i`` holds the modal power fractions of the reconstruction of mode ``i``.

    The mode fields are orthonormalized once; each orthonormal member is both
    the encoded target and the detection channel, so the identity pipeline
    gives exactly the identity matrix.
    """
    if len(modes) == 0:
        raise DomainError("crosstalk needs at least one mode")
    basis = orthonormalize([make_field(grid, m) for m in modes], method="symmetric")
    X = np.empty((len(basis), len(basis)))
    for i, b in enumerate(basis):
        r = pipeline(b, config, aperture)
        X[i] = decompose(r, basis).powers
    return X


def efficiency_ratio(mode: ModeSpec, reference: ModeSpec, grid: GridSpec,
                     config: GratingConfig = GratingConfig()) -> float:
    """First-order efficiency of ``mode``'s hologram relative to ``reference``'s."""
    def eff(m):
        return diffraction_efficiency(synthesize(normalize_peak(make_field(grid, m)), config))
    return eff(mode) / eff(reference)


def schedule(holograms: Sequence[BinaryHologram], frame_rate: float = DEFAULT_FRAME_RATE,
             cycles: int = 1) -> list[SwitchFrame]:
    """Equal-duration frames, repeated ``cycles`` times."""
    if not frame_rate > 0:
        raise DomainError(f"frame rate must be positive, got {frame_rate}")
    return [SwitchFrame(h, 1.0 / frame_rate) for _ in range(cycles) for h in holograms]


def frame_boundaries(frames: Sequence[SwitchFrame]) -> np.ndarray:
    return np.concatenate([[0.0], np.cumsum([fr.duration for fr in frames])])


def switching_timeline(frames: Sequence[SwitchFrame], sample_rate: float,
                       channels: Sequence[ComplexField],
                       aperture: ApertureSpec | None = None) -> list[TimelineSample]:
    """Detected modal powers versus time for a sequence of displayed holograms.

    Holograms switch instantaneously at frame boundaries.  Each channel's power
    is divided by its maximum over the run.
    """
    if len(frames) == 0:
        raise DomainError("switching timeline needs at least one frame")
    if len(channels) == 0:
        raise DomainError("switching timeline needs at least one channel")
    max_rate = 1.0 / min(fr.duration for fr in frames)
    if sample_rate < 10 * max_rate * (1 - 1e-12):
        raise DomainError(
            f"sample rate {sample_rate:g} Hz below 10x frame rate ({max_rate:g} Hz)")

    # one reconstruction per distinct hologram
    cache: dict[bytes, np.ndarray] = {}
    frame_power = []
    for fr in frames:
        key = fr.hologram.bits.tobytes() + repr((fr.hologram.grid, fr.hologram.config)).encode()
        if key not in cache:
            r = simulate_reconstruction(fr.hologram, aperture)
            cache[key] = np.array([abs(inner_product(c, r)) ** 2 for c in channels])
        frame_power.append(cache[key])
    frame_power = np.array(frame_power)

    edges = frame_boundaries(frames)
    n = int(math.floor(edges[-1] * sample_rate * (1 + 1e-12)))
    t = np.arange(n) / sample_rate
    power = frame_power[active_frames(frames, t)]
    peak = power.max(axis=0)
    power = np.divide(power, peak, out=np.zeros_like(power), where=peak > 0)
    return [TimelineSample(float(ti), tuple(float(v) for v in row)) for ti, row in zip(t, power)]


def active_frames(frames: Sequence[SwitchFrame], times: np.ndarray) -> np.ndarray:
    edges = frame_boundaries(frames)
    return np.clip(np.searchsorted(edges, times, side="right") - 1, 0, len(frames) - 1)
