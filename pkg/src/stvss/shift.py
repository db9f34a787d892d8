"""Average contrast of stacked shares under integer misalignment.

Geometry
--------
A shifted share moves left by ``x`` and up by ``y`` sub-pixels relative to
the reference share. Over one reference cell (``n_y`` rows by ``n_x*m``
columns) it therefore shows a window of its own 2x2 neighbourhood of cells:
the current cell, the one to the right, the one below and the one below
right. Neighbouring secret pixels are independently black or white with
probability 1/2 and each is encoded by its own uniformly drawn matrix, so
all shares of one neighbouring pixel come from the same matrix.

The exact oracle enumerates the current pixel's collection and the joint
law of every neighbour sub-pixel that lands in the window, and averages
stacked Hamming weights with exact rationals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .construct import BLACK, WHITE, StvssPair, StvssParams
from .core import BooleanMatrix, VSSError
from .permutations import (
    DEFAULT_BUDGET,
    BudgetExceeded,
    PermutationMethod,
    collection_array,
    permutation_count,
    sample_colmaps,
)

CURRENT, RIGHT, BELOW, BELOW_RIGHT = (0, 0), (0, 1), (1, 0), (1, 1)


class ShiftRangeError(VSSError):
    """A shift falls outside what one cell neighbourhood can express."""


@dataclass(frozen=True)
class Shift:
    """Positive ``x`` moves the share's content left, positive ``y`` moves it up."""

    x: int = 0
    y: int = 0

    def check(self, pair: StvssPair) -> None:
        if not 0 <= self.x <= pair.width:
            raise ShiftRangeError(f"x={self.x} outside 0..{pair.width}")
        if not 0 <= self.y <= pair.n_y:
            raise ShiftRangeError(f"y={self.y} outside 0..{pair.n_y}")


@dataclass(frozen=True)
class ShiftAssignment:
    """Offsets of shares relative to ``reference`` (which stays at zero)."""

    reference: int
    offsets: tuple[tuple[int, Shift], ...] = ()

    @classmethod
    def of(cls, reference: int, offsets: Mapping[int, Shift | tuple[int, int]] | None = None):
        items = []
        for share, s in (offsets or {}).items():
            items.append((int(share), s if isinstance(s, Shift) else Shift(*s)))
        shares = [s for s, _ in items]
        if len(set(shares)) != len(shares) or reference in shares:
            raise VSSError(f"shares must be distinct and differ from the reference {reference}")
        return cls(reference, tuple(sorted(items)))

    @classmethod
    def single(cls, reference: int, share: int, x: int, y: int = 0) -> "ShiftAssignment":
        return cls.of(reference, {share: Shift(x, y)})

    def shift_of(self, share: int) -> Shift:
        return dict(self.offsets).get(share, Shift())


@dataclass(frozen=True)
class ContrastReport:
    """Average stacked weights for white (``l_bar``) and black (``h_bar``) pixels.

    ``row_l``/``row_h`` split the averages by reference-cell row. Monte
    Carlo reports also carry ``std_error`` (of ``a_bar``) and ``samples``.
    """

    h_bar: Fraction
    l_bar: Fraction
    m_star: int
    a_bar: Fraction
    row_h: tuple[Fraction, ...] = field(default=(), compare=False)
    row_l: tuple[Fraction, ...] = field(default=(), compare=False)
    std_error: float | None = None
    samples: int | None = None


# -- geometry --------------------------------------------------------------------


@dataclass(frozen=True)
class Neighborhood:
    """A share's cells around the one under the reference cell."""

    current: BooleanMatrix | np.ndarray
    right: BooleanMatrix | np.ndarray | None = None
    below: BooleanMatrix | np.ndarray | None = None
    below_right: BooleanMatrix | np.ndarray | None = None


def _bits(block) -> np.ndarray:
    return block.bits if isinstance(block, BooleanMatrix) else np.asarray(block, dtype=np.uint8)


def shifted_window(neigh: Neighborhood, shift: Shift) -> np.ndarray:
    """What the shifted share shows over the reference cell."""
    cur = _bits(neigh.current)
    ny, w = cur.shape
    if not (0 <= shift.x <= w and 0 <= shift.y <= ny):
        raise ShiftRangeError(f"shift ({shift.x}, {shift.y}) does not fit a {ny}x{w} cell")
    blocks = []
    for name, needed in (
        ("right", shift.x > 0),
        ("below", shift.y > 0),
        ("below_right", shift.x > 0 and shift.y > 0),
    ):
        b = getattr(neigh, name)
        if b is None:
            if needed:
                raise VSSError(f"shift ({shift.x}, {shift.y}) needs the {name} neighbour")
            b = np.zeros_like(cur)
        b = _bits(b)
        if b.shape != cur.shape:
            raise VSSError(f"{name} block is {b.shape}, expected {cur.shape}")
        blocks.append(b)
    right, below, below_right = blocks
    big = np.block([[cur, right], [below, below_right]])
    return big[shift.y : shift.y + ny, shift.x : shift.x + w]


def stacked_block(reference_block, shifted: Neighborhood, shift: Shift) -> np.ndarray:
    """The reference cell OR-ed with what the shifted share shows over it."""
    ref = _bits(reference_block)
    window = shifted_window(shifted, shift)
    if window.shape != ref.shape:
        raise VSSError(f"reference block is {ref.shape}, shifted cell is {window.shape}")
    return ref | window


def stacked_weight(reference_block, shifted: Neighborhood, shift: Shift) -> int:
    """Hamming weight of the reference cell stacked with a shifted share."""
    return int(np.count_nonzero(stacked_block(reference_block, shifted, shift)))


def _validate(pair: StvssPair, k_subset: Sequence[int], shifts: ShiftAssignment) -> list[int]:
    shares = list(k_subset)
    if len(shares) != pair.k or len(set(shares)) != len(shares):
        raise VSSError(f"need {pair.k} distinct shares, got {shares}")
    for s in shares:
        pair.share_rows(s)
    if shifts.reference not in shares:
        raise VSSError(f"reference share {shifts.reference} is not among {shares}")
    for s, sh in shifts.offsets:
        if s not in shares:
            raise VSSError(f"shifted share {s} is not among {shares}")
        sh.check(pair)
    return shares


def _source_map(pair: StvssPair, shares: Sequence[int], shifts: ShiftAssignment):
    """Per reference-cell position, the ``(pixel, row, col)`` entries stacked there."""
    ny, w = pair.n_y, pair.width
    out = []
    for r in range(ny):
        for c in range(w):
            entries = []
            for s in shares:
                sh = shifts.shift_of(s)
                rr, cc = r + sh.y, c + sh.x
                pixel = (rr // ny, cc // w)
                entries.append((pixel, (s - 1) * ny + rr % ny, cc % w))
            out.append(entries)
    return out


def _as_assignment(shifts, k_subset) -> ShiftAssignment:
    if isinstance(shifts, ShiftAssignment):
        return shifts
    return ShiftAssignment.of(k_subset[0], shifts)


# -- exact oracle ------------------------------------------------------------------


def _unique_rows(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if a.shape[1] == 0:
        return np.zeros((1, 0), dtype=a.dtype), np.array([a.shape[0]], dtype=np.int64)
    uniq, counts = np.unique(a, axis=0, return_counts=True)
    return uniq, counts.astype(np.int64)


def oracle_average_contrast(
    pair: StvssPair,
    method=PermutationMethod.SYNCHRONIZED,
    k_subset: Sequence[int] | None = None,
    shifts: ShiftAssignment | Mapping | None = None,
    budget: int | None = None,
) -> ContrastReport:
    """Exact average contrast by enumeration.

    Averages over the current pixel's matrix (uniform in its collection) and,
    for every neighbouring pixel the shifted shares reach into, over its
    color and matrix. ``k_subset`` defaults to shares ``1..k`` with the
    first as reference.
    """
    method = PermutationMethod.parse(method)
    k_subset = list(k_subset) if k_subset is not None else list(range(1, pair.k + 1))
    shifts = _as_assignment(shifts or {}, k_subset)
    shares = _validate(pair, k_subset, shifts)
    budget = DEFAULT_BUDGET if budget is None else budget

    colls = [collection_array(pair, c, method, budget) for c in (WHITE, BLACK)]
    count = colls[0].shape[0]
    src = _source_map(pair, shares, shifts)
    npos = len(src)
    neighbours = sorted({p for entries in src for p, _, _ in entries if p != CURRENT})

    # joint law of the neighbour sub-pixels, as OR-per-position patterns with counts
    both = np.concatenate(colls)
    nb_or = np.zeros((1, npos), dtype=bool)
    nb_cnt = np.ones(1, dtype=np.int64)
    nb_total = 1
    for p in neighbours:
        entries = sorted({(r, c) for es in src for q, r, c in es if q == p})
        index = {e: i for i, e in enumerate(entries)}
        rows, cols = zip(*entries)
        pats, cnt = _unique_rows(both[:, list(rows), list(cols)])
        local = np.zeros((pats.shape[0], npos), dtype=bool)
        for pos, es in enumerate(src):
            for q, r, c in es:
                if q == p:
                    local[:, pos] |= pats[:, index[(r, c)]].astype(bool)
        joint = (nb_or[:, None, :] | local[None, :, :]).reshape(-1, npos)
        joint_cnt = (nb_cnt[:, None] * cnt[None, :]).reshape(-1)
        nb_or, inverse = np.unique(joint, axis=0, return_inverse=True)
        nb_cnt = np.zeros(nb_or.shape[0], dtype=np.int64)
        np.add.at(nb_cnt, inverse.reshape(-1), joint_cnt)
        nb_total *= both.shape[0]
    if nb_total * pair.width * pair.n_y >= 2**62 or count >= 2**40:
        raise BudgetExceeded("neighbour enumeration too large for exact accumulation")

    rows_by_color = []
    for t in (WHITE, BLACK):
        cur = np.zeros((count, npos), dtype=bool)
        for pos, es in enumerate(src):
            for q, r, c in es:
                if q == CURRENT:
                    cur[:, pos] |= colls[t][:, r, c].astype(bool)
        cur_or, cur_cnt = _unique_rows(cur)
        row_sums = [0] * pair.n_y
        step = max(1, 4_000_000 // max(1, nb_or.shape[0] * npos))
        for lo in range(0, cur_or.shape[0], step):
            block = cur_or[lo : lo + step]
            stacked = (block[:, None, :] | nb_or[None, :, :]).reshape(
                block.shape[0], nb_or.shape[0], pair.n_y, pair.width
            )
            per_row = stacked.sum(axis=3, dtype=np.int64)  # (cur, nb, n_y)
            by_cur = np.einsum("ijr,j->ir", per_row, nb_cnt)  # weighted over neighbours
            for r in range(pair.n_y):
                row_sums[r] += sum(int(a) * int(b) for a, b in zip(by_cur[:, r], cur_cnt[lo : lo + step]))
        denom = count * nb_total
        rows_by_color.append(tuple(Fraction(s, denom) for s in row_sums))

    row_l, row_h = rows_by_color
    l_bar, h_bar = sum(row_l, Fraction(0)), sum(row_h, Fraction(0))
    return ContrastReport(
        h_bar=h_bar,
        l_bar=l_bar,
        m_star=pair.m_star,
        a_bar=(h_bar - l_bar) / pair.m_star,
        row_h=row_h,
        row_l=row_l,
    )


# -- Monte Carlo -------------------------------------------------------------------


def _sample_weights(pair, method, src, color, neighbours, rng, size) -> np.ndarray:
    mats = (pair.b0_star.bits, pair.b1_star.bits)
    cur_maps = sample_colmaps(pair, method, rng, size)
    nb = {}
    for p in neighbours:
        colors = rng.integers(0, 2, size=size).astype(bool)
        nb[p] = (colors, sample_colmaps(pair, method, rng, size))
    total = np.zeros(size, dtype=np.int64)
    for es in src:
        on = np.zeros(size, dtype=bool)
        for p, r, c in es:
            if p == CURRENT:
                on |= mats[color][r, cur_maps[:, c]].astype(bool)
            else:
                colors, maps = nb[p]
                col = maps[:, c]
                on |= np.where(colors, mats[BLACK][r, col], mats[WHITE][r, col]).astype(bool)
        total += on
    return total


def monte_carlo_contrast(
    pair: StvssPair,
    method=PermutationMethod.SYNCHRONIZED,
    k_subset: Sequence[int] | None = None,
    shifts: ShiftAssignment | Mapping | None = None,
    samples: int = 100_000,
    seed=None,
    chunk: int = 200_000,
) -> ContrastReport:
    """Sampling estimate of :func:`oracle_average_contrast`.

    White and black cells are sampled independently, ``samples`` each.
    ``std_error`` is the standard error of ``a_bar``. Deterministic for a
    fixed seed.
    """
    if samples < 1:
        raise VSSError("samples must be at least 1")
    method = PermutationMethod.parse(method)
    k_subset = list(k_subset) if k_subset is not None else list(range(1, pair.k + 1))
    shifts = _as_assignment(shifts or {}, k_subset)
    shares = _validate(pair, k_subset, shifts)
    src = _source_map(pair, shares, shifts)
    neighbours = sorted({p for es in src for p, _, _ in es if p != CURRENT})
    rng = np.random.default_rng(seed)

    stats = []
    for color in (WHITE, BLACK):
        s1 = s2 = 0
        done = 0
        while done < samples:
            size = min(chunk, samples - done)
            w = _sample_weights(pair, method, src, color, neighbours, rng, size)
            s1 += int(w.sum())
            s2 += int((w * w).sum())
            done += size
        mean = Fraction(s1, samples)
        var = (s2 - s1 * s1 / samples) / (samples - 1) if samples > 1 else 0.0
        stats.append((mean, max(var, 0.0)))
    (l_bar, var_l), (h_bar, var_h) = stats
    se = math.sqrt(var_l / samples + var_h / samples) / pair.m_star
    return ContrastReport(
        h_bar=h_bar,
        l_bar=l_bar,
        m_star=pair.m_star,
        a_bar=(h_bar - l_bar) / pair.m_star,
        std_error=se,
        samples=samples,
    )


# -- closed forms ------------------------------------------------------------------


def analytic_contrast_traditional(m: int, a, x: int) -> Fraction:
    """Average contrast of an unduplicated (2, n) scheme under a horizontal shift."""
    if not 1 <= x <= m - 1:
        raise ShiftRangeError(f"x={x} outside 1..{m - 1}")
    return -Fraction(m - x, m * (m - 1)) * Fraction(a)


def analytic_contrast_stvss(params: StvssParams, m: int, a, x: int, y: int = 0) -> Fraction:
    """Average contrast of a vector-duplicated (2, n) scheme, valid for ``0 <= x <= m``."""
    nx, ny = params.n_x, params.n_y
    a = Fraction(a)
    if not 0 <= y < ny:
        raise ShiftRangeError(f"y={y} outside 0..{ny - 1}")
    if x == 0:
        return Fraction(ny - y, ny) * a
    if 1 <= x <= m - 1:
        return -Fraction((nx * m - x) * (ny - y), nx * ny * m * (m - 1)) * a
    if x == m:
        return Fraction((nx - 1) * (ny - y), nx * ny) * a
    raise ShiftRangeError(f"x={x} outside 0..{m}; no closed form beyond one base width")
