"""Portable bitmap (PBM) reading and writing, plain (P1) and raw (P4)."""

from __future__ import annotations

import re

import numpy as np

from .core import VSSError


class PBMError(VSSError):
    """Malformed or unsupported PBM data."""


class Bitmap:
    """A bilevel image; ``bits[r, c]`` is 1 for black, 0 for white."""

    __slots__ = ("_bits",)

    def __init__(self, bits):
        arr = np.array(bits, dtype=np.int64)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise VSSError(f"bitmap must be 2-D and non-empty, got shape {arr.shape}")
        if not np.isin(arr, (0, 1)).all():
            raise VSSError("bitmap entries must be 0 or 1")
        bits = arr.astype(np.uint8)
        bits.setflags(write=False)
        self._bits = bits

    @property
    def bits(self) -> np.ndarray:
        return self._bits

    @property
    def width(self) -> int:
        return self._bits.shape[1]

    @property
    def height(self) -> int:
        return self._bits.shape[0]

    def __eq__(self, other):
        if not isinstance(other, Bitmap):
            return NotImplemented
        return np.array_equal(self._bits, other._bits)

    def __hash__(self):
        return hash((self._bits.shape, self._bits.tobytes()))

    def __repr__(self):
        return f"Bitmap({self.width}x{self.height})"


_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*")


def _header(data: bytes) -> tuple[bytes, int, int, int]:
    """Return magic, width, height and the offset just past the header."""
    if len(data) < 2:
        raise PBMError("missing magic number")
    magic = data[:2]
    if magic not in (b"P1", b"P4"):
        raise PBMError(f"unsupported magic {magic!r}; only P1 and P4 bitmaps are read")
    pos = 2
    dims = []
    for _ in range(2):
        pos = _TOKEN.match(data, pos).end()
        m = re.compile(rb"\d+").match(data, pos)
        if m is None:
            raise PBMError("malformed header: expected width and height")
        dims.append(int(m.group()))
        pos = m.end()
    width, height = dims
    if width < 1 or height < 1:
        raise PBMError(f"bad dimensions {width}x{height}")
    return magic, width, height, pos


def read_pbm(data: bytes) -> Bitmap:
    magic, width, height, pos = _header(data)
    if magic == b"P4":
        if pos >= len(data) or not data[pos : pos + 1].isspace():
            raise PBMError("malformed header: missing whitespace before raster")
        pos += 1
        row_bytes = (width + 7) // 8
        need = row_bytes * height
        raw = np.frombuffer(data, dtype=np.uint8, count=min(need, len(data) - pos), offset=pos)
        if raw.size < need:
            raise PBMError(f"truncated raster: {raw.size} of {need} bytes")
        bits = np.unpackbits(raw.reshape(height, row_bytes), axis=1)[:, :width]
        return Bitmap(bits)

    body = re.sub(rb"#[^\n]*", b"", data[pos:])
    digits = re.sub(rb"\s+", b"", body)
    if not re.fullmatch(rb"[01]*", digits):
        raise PBMError("plain raster may only contain 0 and 1")
    if len(digits) < width * height:
        raise PBMError(f"truncated raster: {len(digits)} of {width * height} pixels")
    flat = np.frombuffer(digits[: width * height], dtype=np.uint8) - ord("0")
    return Bitmap(flat.reshape(height, width))


def header_comments(data: bytes) -> list[str]:
    """Comment lines (without ``#``) that appear before the raster."""
    _, _, _, pos = _header(data)
    return [c.decode(errors="replace").strip() for c in re.findall(rb"#([^\n]*)", data[:pos])]


def write_pbm(bitmap: Bitmap, plain: bool = False, comments: tuple[str, ...] = ()) -> bytes:
    """Encode as P4, or P1 when ``plain`` is set."""
    bits = bitmap.bits
    notes = "".join(f"# {c}\n" for c in comments)
    if plain:
        rows = (" ".join(map(str, r)) for r in bits.tolist())
        head = f"P1\n{notes}{bitmap.width} {bitmap.height}\n"
        return head.encode() + "\n".join(rows).encode() + b"\n"
    header = f"P4\n{notes}{bitmap.width} {bitmap.height}\n".encode()
    return header + np.packbits(bits, axis=1).tobytes()
