"""Shift-tolerant basis matrices built by duplicating basis-matrix rows,
plus the naive pixel-duplication baseline they are compared against.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .core import BasisPair, BooleanMatrix, SecurityResult, VSSError, parse_basis_pair, format_basis_pair

WHITE = 0
BLACK = 1

VECTOR_DUP = "vector_dup"
PIXEL_DUP = "pixel_dup"
KINDS = (VECTOR_DUP, PIXEL_DUP)


def as_color(color) -> int:
    """Normalise ``0/1`` or ``"white"/"black"`` to 0 (white) or 1 (black)."""
    if isinstance(color, str):
        try:
            return {"white": WHITE, "black": BLACK}[color.lower()]
        except KeyError:
            raise VSSError(f"unknown color {color!r}") from None
    if color in (0, 1):
        return int(color)
    raise VSSError(f"unknown color {color!r}")


@dataclass(frozen=True)
class StvssParams:
    n_x: int = 1
    n_y: int = 1

    def __post_init__(self):
        if self.n_x < 1 or self.n_y < 1:
            raise VSSError(f"n_x and n_y must be positive, got ({self.n_x}, {self.n_y})")


@dataclass(frozen=True)
class StvssPair:
    """Expanded basis matrices of size ``(n_y*n) x (n_x*m)``.

    Share ``i`` owns rows ``(i-1)*n_y .. i*n_y - 1`` (0-based) of both
    matrices. Columns split into ``n_x`` groups of ``m``; within a group,
    position ``p`` holds base column ``p``. For ``vector_dup`` a group is a
    contiguous run of ``m`` columns, for ``pixel_dup`` it is every
    ``n_x``-th column.
    """

    b0_star: BooleanMatrix
    b1_star: BooleanMatrix
    base: BasisPair
    params: StvssParams
    kind: str = VECTOR_DUP

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def m(self) -> int:
        return self.base.m

    @property
    def k(self) -> int:
        return self.base.k

    @property
    def n_x(self) -> int:
        return self.params.n_x

    @property
    def n_y(self) -> int:
        return self.params.n_y

    @property
    def width(self) -> int:
        return self.params.n_x * self.base.m

    @property
    def m_star(self) -> int:
        return self.params.n_x * self.params.n_y * self.base.m

    def matrix(self, color) -> BooleanMatrix:
        return self.b1_star if as_color(color) else self.b0_star

    def share_rows(self, i: int) -> slice:
        if not 1 <= i <= self.n:
            raise IndexError(f"share index {i} out of range 1..{self.n}")
        return slice((i - 1) * self.n_y, i * self.n_y)

    def column_groups(self) -> np.ndarray:
        """``(n_x, m)`` array; entry ``[g, p]`` is the column holding base column ``p`` in group ``g``."""
        g = np.arange(self.n_x)[:, None]
        p = np.arange(self.m)[None, :]
        if self.kind == VECTOR_DUP:
            return g * self.m + p
        return p * self.n_x + g


def construct_stvss(base: BasisPair, params: StvssParams) -> StvssPair:
    """Each share row becomes ``n_y`` copies of the row concatenated ``n_x`` times."""

    def expand(mat: BooleanMatrix) -> BooleanMatrix:
        rows = np.tile(mat.bits, (1, params.n_x))
        return BooleanMatrix(np.repeat(rows, params.n_y, axis=0))

    return StvssPair(expand(base.b0), expand(base.b1), base, params, VECTOR_DUP)


def construct_pixel_duplication(base: BasisPair, params: StvssParams) -> StvssPair:
    """Every base entry becomes a constant ``n_y x n_x`` cell."""

    def expand(mat: BooleanMatrix) -> BooleanMatrix:
        return BooleanMatrix(np.kron(mat.bits, np.ones((params.n_y, params.n_x), dtype=np.uint8)))

    return StvssPair(expand(base.b0), expand(base.b1), base, params, PIXEL_DUP)


def build(base: BasisPair, params: StvssParams, kind: str = VECTOR_DUP) -> StvssPair:
    if kind == VECTOR_DUP:
        return construct_stvss(base, params)
    if kind == PIXEL_DUP:
        return construct_pixel_duplication(base, params)
    raise VSSError(f"unknown kind {kind!r}; expected one of {KINDS}")


def share_block(pair: StvssPair, color, i: int) -> BooleanMatrix:
    """The ``n_y x (n_x*m)`` block that share ``i`` receives for ``color``."""
    return BooleanMatrix(pair.matrix(color).bits[pair.share_rows(i)])


def _orbit_key(bits: np.ndarray, groups: np.ndarray, method) -> object:
    from .permutations import PermutationMethod

    if method is PermutationMethod.FULL:
        return sorted(col.tobytes() for col in bits.T)
    if method is PermutationMethod.PER_BLOCK:
        return [sorted(bits[:, j].tobytes() for j in grp) for grp in groups]
    # synchronized: the n_x columns holding one base column move as a unit
    return sorted(bits[:, groups[:, p]].tobytes() for p in range(groups.shape[1]))


def verify_stvss_security(pair: StvssPair, method=None, budget: int | None = None) -> SecurityResult:
    """Check that fewer than k shares see identical collections for both colors.

    First compares per-share block weights, then for every share subset of
    size q < k compares the restricted collections as multisets. When the
    collection is within the enumeration budget the comparison enumerates
    every permuted matrix; otherwise it uses the equivalent orbit test
    (two restricted matrices generate the same multiset iff one is a
    permitted column permutation of the other) and the result is flagged
    ``exhaustive=False``.
    """
    from .permutations import DEFAULT_BUDGET, PermutationMethod, collection_array, permutation_count

    method = PermutationMethod.SYNCHRONIZED if method is None else PermutationMethod.parse(method)
    budget = DEFAULT_BUDGET if budget is None else budget

    for i in range(1, pair.n + 1):
        rows = pair.share_rows(i)
        if np.count_nonzero(pair.b0_star.bits[rows]) != np.count_nonzero(pair.b1_star.bits[rows]):
            return SecurityResult(False, (i,))

    exhaustive = permutation_count(pair, method) <= budget
    if exhaustive:
        colls = [collection_array(pair, c, method, budget) for c in (WHITE, BLACK)]
    groups = pair.column_groups()
    for q in range(1, pair.k):
        for subset in combinations(range(1, pair.n + 1), q):
            rows = np.concatenate([np.arange(pair.n * pair.n_y)[pair.share_rows(i)] for i in subset])
            if exhaustive:
                white, black = (sorted(m.tobytes() for m in coll[:, rows, :]) for coll in colls)
            else:
                white = _orbit_key(pair.b0_star.bits[rows], groups, method)
                black = _orbit_key(pair.b1_star.bits[rows], groups, method)
            if white != black:
                return SecurityResult(False, subset, exhaustive)
    return SecurityResult(True, None, exhaustive)


# -- text format ---------------------------------------------------------------


def format_stvss_pair(pair: StvssPair) -> str:
    """``NX NY KIND`` header followed by the base pair in basis-pair format."""
    return f"{pair.n_x} {pair.n_y} {pair.kind}\n" + format_basis_pair(pair.base)


def parse_stvss_pair(text: str) -> StvssPair:
    lines = text.strip().splitlines()
    if not lines:
        raise VSSError("empty STVSS text")
    head = lines[0].split()
    if len(head) != 3:
        raise VSSError(f"bad header {lines[0]!r}; expected 'NX NY KIND'")
    try:
        params = StvssParams(int(head[0]), int(head[1]))
    except ValueError:
        raise VSSError(f"bad header {lines[0]!r}") from None
    return build(parse_basis_pair("\n".join(lines[1:])), params, head[2])
