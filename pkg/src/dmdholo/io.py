"""File formats: CF64 complex fields, PGM holograms with sidecar, CSV tables."""
from __future__ import annotations

import csv
import io as _io
import struct
from pathlib import Path
from typing import Sequence

import numpy as np

from .fieldgen import ComplexField, DomainError, GridSpec
from .hologram import BinaryHologram, GratingConfig

CF64_MAGIC = b"CF64"
_CF64_HEADER = struct.Struct("<4sIId")


class FormatError(DomainError):
    """Raised for malformed file contents."""


# ---------------------------------------------------------------------------
# CF64

def cf64_bytes(f: ComplexField) -> bytes:
    head = _CF64_HEADER.pack(CF64_MAGIC, f.grid.nx, f.grid.ny, f.grid.pitch)
    return head + np.ascontiguousarray(f.values, dtype="<c16").tobytes()


def cf64_from_bytes(data: bytes) -> ComplexField:
    if len(data) < _CF64_HEADER.size:
        raise FormatError("truncated CF64 header")
    magic, nx, ny, pitch = _CF64_HEADER.unpack_from(data)
    if magic != CF64_MAGIC:
        raise FormatError(f"bad CF64 magic {magic!r}")
    body = data[_CF64_HEADER.size:]
    if len(body) != nx * ny * 16:
        raise FormatError(f"CF64 body has {len(body)} bytes, expected {nx * ny * 16}")
    values = np.frombuffer(body, dtype="<c16").reshape(ny, nx).astype(np.complex128)
    return ComplexField(GridSpec(nx, ny, pitch), values)


def write_cf64(path, f: ComplexField):
    Path(path).write_bytes(cf64_bytes(f))


def read_cf64(path) -> ComplexField:
    return cf64_from_bytes(Path(path).read_bytes())


# ---------------------------------------------------------------------------
# PGM / PBM-style images

def _header(magic: bytes, width: int, height: int, maxval: int | None) -> bytes:
    head = magic + b"\n%d %d\n" % (width, height)
    if maxval is not None:
        head += b"%d\n" % maxval
    return head


def bits_to_p4(bits: np.ndarray) -> bytes:
    """Packed 1-bit raster, MSB first, rows padded to whole bytes."""
    h, w = bits.shape
    return _header(b"P4", w, h, None) + np.packbits(bits.astype(np.uint8), axis=1).tobytes()


def image_to_p5(img: np.ndarray) -> bytes:
    h, w = img.shape
    return _header(b"P5", w, h, 255) + np.ascontiguousarray(img, dtype=np.uint8).tobytes()


def _tokens(data: bytes, count: int) -> tuple[list[int], int]:
    """Read ``count`` integer header tokens, skipping comments; return end offset."""
    out, pos = [], 0
    while len(out) < count:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            pos = data.index(b"\n", pos) + 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise FormatError("truncated image header")
        out.append(int(data[start:pos]))
    # exactly one whitespace byte separates header from raster
    return out, pos + 1


def parse_pnm(data: bytes) -> tuple[str, np.ndarray]:
    """Decode a P4 or P5 image to ``(magic, array)``; P4 yields 0/1, P5 raw values."""
    magic = data[:2]
    try:
        if magic == b"P4":
            (w, h), pos = _tokens(data[2:], 2)
            stride = (w + 7) // 8
            raster = np.frombuffer(data[2 + pos:], dtype=np.uint8)
            if raster.size != stride * h:
                raise FormatError(f"P4 raster has {raster.size} bytes, expected {stride * h}")
            return "P4", np.unpackbits(raster.reshape(h, stride), axis=1)[:, :w]
        if magic == b"P5":
            (w, h, maxval), pos = _tokens(data[2:], 3)
            if maxval > 255:
                raise FormatError("16-bit PGM not supported")
            raster = np.frombuffer(data[2 + pos:], dtype=np.uint8)
            if raster.size != w * h:
                raise FormatError(f"P5 raster has {raster.size} bytes, expected {w * h}")
            return "P5", raster.reshape(h, w).copy()
    except ValueError as exc:
        raise FormatError(f"malformed image header: {exc}") from None
    raise FormatError(f"unsupported image magic {magic!r}")


def write_p5(path, img: np.ndarray):
    Path(path).write_bytes(image_to_p5(img))


def read_p5(path) -> np.ndarray:
    kind, img = parse_pnm(Path(path).read_bytes())
    if kind != "P5":
        raise FormatError(f"{path}: expected P5, found {kind}")
    return img


def sidecar_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".meta")


def sidecar_text(holo: BinaryHologram) -> str:
    return (f"period_samples={holo.config.period_samples}\n"
            f"pitch_m={holo.grid.pitch!r}\n")


def parse_sidecar(text: str) -> dict:
    kv = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise FormatError(f"sidecar line without '=': {line!r}")
        k, v = line.split("=", 1)
        kv[k.strip()] = v.strip()
    try:
        return {"period_samples": int(kv["period_samples"]), "pitch_m": float(kv["pitch_m"])}
    except KeyError as exc:
        raise FormatError(f"sidecar lacks {exc}") from None


def write_hologram(path, holo: BinaryHologram, fmt: str = "P4"):
    """Write the mirror map as P4 (1 = on) or P5 (255 = on) plus a ``.meta`` sidecar."""
    if fmt == "P4":
        data = bits_to_p4(holo.bits)
    elif fmt == "P5":
        data = image_to_p5(holo.bits * 255)
    else:
        raise DomainError(f"unknown hologram format {fmt!r}")
    Path(path).write_bytes(data)
    sidecar_path(path).write_text(sidecar_text(holo))


def read_hologram(path) -> BinaryHologram:
    kind, img = parse_pnm(Path(path).read_bytes())
    if kind == "P5":
        if not np.all((img == 0) | (img == 255)):
            raise FormatError("P5 hologram must contain only 0 and 255")
        img = img // 255
    meta = parse_sidecar(sidecar_path(path).read_text())
    grid = GridSpec(img.shape[1], img.shape[0], meta["pitch_m"])
    return BinaryHologram(grid, img, GratingConfig(meta["period_samples"]))


def intensity_image(values: np.ndarray) -> np.ndarray:
    """Linear 8-bit map of a non-negative image, max-normalized."""
    values = np.asarray(values, dtype=float)
    peak = values.max()
    if peak <= 0:
        return np.zeros(values.shape, dtype=np.uint8)
    return np.rint(values / peak * 255).astype(np.uint8)


# ---------------------------------------------------------------------------
# CSV

def fmt_float(v: float) -> str:
    return repr(float(v))


def matrix_csv(matrix: np.ndarray, row_labels: Sequence[str], col_labels: Sequence[str]) -> str:
    """Header ``mode,<col labels>``; one row per input mode."""
    out = _io.StringIO()
    out.write(",".join(["mode", *map(_quote, col_labels)]) + "\n")
    for label, row in zip(row_labels, np.asarray(matrix, dtype=float)):
        out.write(",".join([_quote(label), *map(fmt_float, row)]) + "\n")
    return out.getvalue()


def _quote(label: str) -> str:
    label = str(label)
    if any(c in label for c in ',"\n'):
        return '"' + label.replace('"', '""') + '"'
    return label


def _split_csv(text: str) -> list[list[str]]:
    return list(csv.reader(_io.StringIO(text)))


def parse_matrix_csv(text: str) -> tuple[np.ndarray, list[str], list[str]]:
    rows = _split_csv(text)
    if not rows or rows[0][0] != "mode":
        raise FormatError("matrix CSV must start with a 'mode' header")
    cols = rows[0][1:]
    labels = [r[0] for r in rows[1:]]
    data = np.array([[float(v) for v in r[1:]] for r in rows[1:]], dtype=float)
    return data.reshape(len(labels), len(cols)), labels, cols


def decomposition_csv(result) -> str:
    out = _io.StringIO()
    out.write("mode,real,imag,power\n")
    for label, c in zip(result.labels, result.coefficients):
        out.write(f"{_quote(label)},{fmt_float(c.real)},{fmt_float(c.imag)},"
                  f"{fmt_float(abs(c) ** 2)}\n")
    out.write(f"residual,,,{fmt_float(result.residual_power)}\n")
    return out.getvalue()


def parse_decomposition_csv(text: str):
    from .analysis import DecompositionResult
    rows = _split_csv(text)
    if rows[0] != ["mode", "real", "imag", "power"]:
        raise FormatError("unexpected decomposition CSV header")
    body, last = rows[1:-1], rows[-1]
    if last[0] != "residual":
        raise FormatError("decomposition CSV lacks residual row")
    coeffs = np.array([complex(float(r[1]), float(r[2])) for r in body])
    return DecompositionResult([r[0] for r in body], coeffs, float(last[3]))


def timeline_csv(samples, channel_labels: Sequence[str]) -> str:
    out = _io.StringIO()
    out.write(",".join(["time_s", *map(_quote, channel_labels)]) + "\n")
    for s in samples:
        out.write(",".join([fmt_float(s.time), *map(fmt_float, s.channel_power)]) + "\n")
    return out.getvalue()


def parse_timeline_csv(text: str):
    from .analysis import TimelineSample
    rows = _split_csv(text)
    if not rows or rows[0][0] != "time_s":
        raise FormatError("timeline CSV must start with a 'time_s' header")
    samples = [TimelineSample(float(r[0]), tuple(float(v) for v in r[1:])) for r in rows[1:]]
    return samples, rows[0][1:]
