"""Encode secret bitmaps into share images, stack them with offsets and
measure the contrast that results.

Each secret pixel becomes an ``n_y x (n_x*m)`` cell in every share, laid
out left to right, so moving a share image by one pixel moves the encoding
matrix by one column.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .construct import StvssPair, format_stvss_pair
from .core import VSSError
from .pbm import Bitmap
from .permutations import PermutationMethod, sample_colmaps
from .shift import Shift, ShiftAssignment


class FingerprintMismatch(VSSError):
    """Shares being stacked were not produced by the same scheme."""


def scheme_fingerprint(pair: StvssPair, method) -> str:
    method = PermutationMethod.parse(method)
    text = format_stvss_pair(pair) + method.value
    return hashlib.sha256(text.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class ShareImage:
    index: int  # 1-based share number
    bitmap: Bitmap
    fingerprint: str


def encode(secret: Bitmap, pair: StvssPair, method=PermutationMethod.SYNCHRONIZED, seed=None) -> list[ShareImage]:
    """Draw one collection matrix per secret pixel and hand each share its block."""
    method = PermutationMethod.parse(method)
    rng = np.random.default_rng(seed)
    h, w = secret.height, secret.width
    colors = secret.bits.reshape(-1).astype(bool)
    maps = sample_colmaps(pair, method, rng, colors.size)  # (pixels, width)
    b0, b1 = pair.b0_star.bits, pair.b1_star.bits
    # (rows, pixels, width): row r of the matrix chosen for each pixel
    mats = np.where(colors[None, :, None], b1[:, maps], b0[:, maps])
    fp = scheme_fingerprint(pair, method)
    shares = []
    for i in range(1, pair.n + 1):
        block = mats[pair.share_rows(i)]  # (n_y, pixels, width)
        img = block.reshape(pair.n_y, h, w, pair.width).transpose(1, 0, 2, 3)
        shares.append(ShareImage(i, Bitmap(img.reshape(h * pair.n_y, w * pair.width)), fp))
    return shares


def _translate(bits: np.ndarray, shift: Shift) -> np.ndarray:
    """Content moved left by ``x`` and up by ``y``; uncovered area is white."""
    out = np.zeros_like(bits)
    h, w = bits.shape
    x, y = shift.x, shift.y
    if abs(x) >= w or abs(y) >= h:
        return out
    src_r = slice(max(y, 0), h + min(y, 0))
    dst_r = slice(max(-y, 0), h - max(y, 0))
    src_c = slice(max(x, 0), w + min(x, 0))
    dst_c = slice(max(-x, 0), w - max(x, 0))
    out[dst_r, dst_c] = bits[src_r, src_c]
    return out


def stack(shares: Sequence[ShareImage], shifts: ShiftAssignment | None = None) -> Bitmap:
    """OR the shares over the reference share's footprint.

    ``shifts`` defaults to all shares aligned with the first one. Offsets
    may be negative (content moved right or down).
    """
    if not shares:
        raise VSSError("nothing to stack")
    by_index = {s.index: s for s in shares}
    if len(by_index) != len(shares):
        raise VSSError("duplicate share indices")
    if len({s.fingerprint for s in shares}) != 1:
        raise FingerprintMismatch("shares come from different schemes")
    if len({s.bitmap.bits.shape for s in shares}) != 1:
        raise VSSError("share images differ in size")
    shifts = shifts or ShiftAssignment(shares[0].index)
    if shifts.reference not in by_index:
        raise VSSError(f"reference share {shifts.reference} is not being stacked")
    for idx, _ in shifts.offsets:
        if idx not in by_index:
            raise VSSError(f"shifted share {idx} is not being stacked")
    out = np.zeros_like(shares[0].bitmap.bits)
    for s in shares:
        out |= _translate(s.bitmap.bits, shifts.shift_of(s.index))
    return Bitmap(out)


@dataclass(frozen=True)
class EmpiricalContrast:
    value: Fraction
    std_error: float
    black_cells: int
    white_cells: int


def _interior(secret: Bitmap, pair: StvssPair, shifts: ShiftAssignment) -> np.ndarray:
    """Cells whose shifted footprint lies inside every share image."""
    h, w = secret.height, secret.width
    rows, cols = np.arange(h)[:, None], np.arange(w)[None, :]
    ok = np.ones((h, w), dtype=bool)
    for _, s in shifts.offsets:
        top = rows * pair.n_y + s.y
        left = cols * pair.width + s.x
        ok &= (top >= 0) & (top + pair.n_y <= h * pair.n_y)
        ok &= (left >= 0) & (left + pair.width <= w * pair.width)
    return ok


def empirical_contrast(secret: Bitmap, stacked: Bitmap, pair: StvssPair, shifts: ShiftAssignment) -> EmpiricalContrast:
    """Contrast over interior cells, with a standard error from the cell-weight spread."""
    h, w = secret.height, secret.width
    if stacked.bits.shape != (h * pair.n_y, w * pair.width):
        raise VSSError(f"stacked image is {stacked.bits.shape}, expected {(h * pair.n_y, w * pair.width)}")
    weights = stacked.bits.reshape(h, pair.n_y, w, pair.width).sum(axis=(1, 3), dtype=np.int64)
    inside = _interior(secret, pair, shifts)
    black = weights[inside & (secret.bits == 1)]
    white = weights[inside & (secret.bits == 0)]
    if black.size == 0 or white.size == 0:
        raise VSSError("interior cells must include both black and white secret pixels")
    value = (Fraction(int(black.sum()), black.size) - Fraction(int(white.sum()), white.size)) / pair.m_star
    var_b = black.var(ddof=1) if black.size > 1 else 0.0
    var_w = white.var(ddof=1) if white.size > 1 else 0.0
    se = math.sqrt(var_b / black.size + var_w / white.size) / pair.m_star
    return EmpiricalContrast(value, se, int(black.size), int(white.size))


def measure_empirical_contrast(secret: Bitmap, stacked: Bitmap, pair: StvssPair, shifts: ShiftAssignment) -> Fraction:
    return empirical_contrast(secret, stacked, pair, shifts).value


def cell_weights(share: ShareImage, pair: StvssPair) -> np.ndarray:
    """Hamming weight of every cell of one share image."""
    bits = share.bitmap.bits
    h, w = bits.shape[0] // pair.n_y, bits.shape[1] // pair.width
    return bits.reshape(h, pair.n_y, w, pair.width).sum(axis=(1, 3))
