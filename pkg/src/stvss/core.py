"""Boolean matrices, basis pairs and the contrast/security checks for
traditional (k, n) visual secret sharing schemes.

Row indices in the public API are 1-based because every row of a basis
matrix is a share, and shares are numbered from 1.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np


class VSSError(ValueError):
    """Base class for invalid schemes and malformed inputs."""


class ContrastViolation(VSSError):
    """Raised when a pair does not separate black from white (h <= l)."""


class BooleanMatrix:
    """Immutable dense 0/1 matrix.

    Rows are share rows and columns are sub-pixel positions. The backing
    array is a read-only ``uint8`` numpy array, so any width works.
    """

    __slots__ = ("_bits",)

    def __init__(self, rows):
        arr = np.array(rows, dtype=np.int64)
        if arr.ndim != 2:
            raise VSSError(f"expected a 2-D matrix, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise VSSError("matrix must have at least one row and one column")
        if not np.isin(arr, (0, 1)).all():
            raise VSSError("matrix entries must be 0 or 1")
        bits = arr.astype(np.uint8)
        bits.setflags(write=False)
        self._bits = bits

    @classmethod
    def from_strings(cls, rows: Iterable[str]) -> "BooleanMatrix":
        """Build from strings such as ``["011", "1 0 1"]`` (spaces ignored)."""
        return cls([[int(ch) for ch in row.replace(" ", "")] for row in rows])

    @property
    def bits(self) -> np.ndarray:
        return self._bits

    @property
    def rows(self) -> int:
        return self._bits.shape[0]

    @property
    def cols(self) -> int:
        return self._bits.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._bits.shape

    def row(self, i: int) -> np.ndarray:
        """Row ``i`` (1-based)."""
        _check_index(i, self.rows)
        return self._bits[i - 1]

    def select_rows(self, rows: Sequence[int]) -> "BooleanMatrix":
        for i in rows:
            _check_index(i, self.rows)
        return BooleanMatrix(self._bits[[i - 1 for i in rows]])

    def permute_columns(self, order: Sequence[int]) -> "BooleanMatrix":
        """New matrix whose column ``j`` is this matrix's column ``order[j]`` (0-based)."""
        return BooleanMatrix(self._bits[:, list(order)])

    def to_strings(self) -> list[str]:
        return ["".join(str(int(v)) for v in r) for r in self._bits]

    def __eq__(self, other):
        if not isinstance(other, BooleanMatrix):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self._bits, other._bits)

    def __hash__(self):
        return hash((self.shape, self._bits.tobytes()))

    def __repr__(self):
        return f"BooleanMatrix({self.to_strings()!r})"


def _check_index(i: int, n: int) -> None:
    if not 1 <= i <= n:
        raise IndexError(f"row index {i} out of range 1..{n}")


def hamming_weight(v) -> int:
    """Number of 1 entries in a 0/1 vector (or matrix)."""
    return int(np.count_nonzero(np.asarray(v)))


def stack_rows(mat: BooleanMatrix, rows: Iterable[int]) -> np.ndarray:
    """OR of the selected rows, i.e. what stacking those shares shows."""
    rows = list(rows)
    if not rows:
        raise VSSError("at least one row is required")
    if len(set(rows)) != len(rows):
        raise VSSError(f"duplicate row indices in {rows}")
    for i in rows:
        _check_index(i, mat.rows)
    return np.bitwise_or.reduce(mat.bits[[i - 1 for i in rows]], axis=0)


@dataclass(frozen=True)
class BasisPair:
    """Basis matrices ``b0`` (white) and ``b1`` (black) of a (k, n) scheme.

    Construction only checks shapes; call :meth:`validate` (or use
    :func:`builtin_pair` / :func:`parse_basis_pair`) for the contrast and
    security conditions.
    """

    b0: BooleanMatrix
    b1: BooleanMatrix
    k: int

    def __post_init__(self):
        if self.b0.shape != self.b1.shape:
            raise VSSError(f"b0 is {self.b0.shape} but b1 is {self.b1.shape}")
        if not 2 <= self.k <= self.n:
            raise VSSError(f"threshold k={self.k} must satisfy 2 <= k <= n={self.n}")

    @property
    def n(self) -> int:
        return self.b0.rows

    @property
    def m(self) -> int:
        return self.b0.cols

    def matrix(self, color: int) -> BooleanMatrix:
        return self.b1 if color else self.b0

    def validate(self) -> "BasisPair":
        result = verify_security(self)
        if not result:
            raise VSSError(f"security condition fails on rows {result.witness}")
        contrast_params(self)
        return self


@dataclass(frozen=True)
class ContrastParams:
    h: int
    l: int
    m: int
    a: Fraction


@dataclass(frozen=True)
class PairStructure:
    """Column-pattern counts of two rows of a (2, n) pair.

    ``a_p`` and ``b_p`` are the all-black and all-white columns shared by
    both matrices; ``c``/``d`` are the one-sided columns of ``b0``; ``e`` is
    the number of columns that carry the contrast.
    """

    a_p: int
    b_p: int
    c: int
    d: int
    e: int

    @property
    def m(self) -> int:
        return self.a_p + self.b_p + self.c + self.d + 2 * self.e

    @property
    def l(self) -> int:
        return self.a_p + self.c + self.d + self.e

    @property
    def h(self) -> int:
        return self.a_p + self.c + self.d + 2 * self.e


@dataclass(frozen=True)
class SecurityResult:
    """Outcome of a security check; falsy on failure.

    ``witness`` holds the offending row (or share) subset, 1-based.
    ``exhaustive`` is False when the check used the orbit criterion
    instead of enumerating every permuted matrix.
    """

    passed: bool
    witness: tuple[int, ...] | None = None
    exhaustive: bool = True

    def __bool__(self):
        return self.passed


def contrast_params(pair: BasisPair) -> ContrastParams:
    """Worst-case stacked weights over every k-subset of rows.

    ``l`` is the largest white weight and ``h`` the smallest black weight,
    so the contrast inequalities hold for any k shares.
    """
    subsets = list(combinations(range(1, pair.n + 1), pair.k))
    l = max(hamming_weight(stack_rows(pair.b0, s)) for s in subsets)
    h = min(hamming_weight(stack_rows(pair.b1, s)) for s in subsets)
    if h <= l:
        raise ContrastViolation(f"h={h} is not greater than l={l}")
    return ContrastParams(h=h, l=l, m=pair.m, a=Fraction(h - l, pair.m))


def _column_multiset(bits: np.ndarray) -> Counter:
    return Counter(col.tobytes() for col in bits.T)


def verify_security(pair: BasisPair) -> SecurityResult:
    # Every column permutation is allowed, so the two restricted collections
    # coincide exactly when the restricted matrices have the same columns.
    for q in range(1, pair.k):
        for subset in combinations(range(pair.n), q):
            idx = list(subset)
            if _column_multiset(pair.b0.bits[idx]) != _column_multiset(pair.b1.bits[idx]):
                return SecurityResult(False, tuple(i + 1 for i in subset))
    return SecurityResult(True)


def naor_shamir_2n(n: int) -> BasisPair:
    """The classic (2, n) scheme with m = n, h = 2, l = 1."""
    if n < 2:
        raise VSSError(f"n must be at least 2, got {n}")
    b0 = np.zeros((n, n), dtype=np.uint8)
    b0[:, 0] = 1
    return BasisPair(BooleanMatrix(b0), BooleanMatrix(np.eye(n, dtype=np.uint8)), k=2)


_BUILTINS = {
    "ex1_2_3": (["011", "011", "011"], ["011", "110", "101"], 2),
    "ex2_2_2": (["10", "10"], ["10", "01"], 2),
    "ex7_3_4": (
        ["001110", "001101", "001011", "000111"],
        ["100011", "010011", "001011", "000111"],
        3,
    ),
}

BUILTIN_NAMES = tuple(_BUILTINS)


def builtin_pair(name: str) -> BasisPair:
    """Basis pairs used throughout the worked examples.

    ``ex1_2_3`` is a (2,3) scheme with m=3, ``ex2_2_2`` the (2,2) scheme
    with m=2 and ``ex7_3_4`` a (3,4) scheme with m=6.
    """
    try:
        b0, b1, k = _BUILTINS[name]
    except KeyError:
        raise VSSError(f"unknown builtin pair {name!r}; choose from {', '.join(_BUILTINS)}") from None
    return BasisPair(BooleanMatrix.from_strings(b0), BooleanMatrix.from_strings(b1), k).validate()


def decompose_pair(pair: BasisPair, i: int, j: int) -> PairStructure:
    """Count the column patterns of rows ``i`` and ``j`` (1-based)."""
    if pair.k != 2:
        raise VSSError("decompose_pair needs a k=2 scheme")
    if i == j:
        raise VSSError("rows must differ")
    _check_index(i, pair.n)
    _check_index(j, pair.n)

    def count(mat: BooleanMatrix, top: int, bottom: int) -> int:
        ri, rj = mat.bits[i - 1], mat.bits[j - 1]
        return int(np.count_nonzero((ri == top) & (rj == bottom)))

    a_p = count(pair.b1, 1, 1)
    e = count(pair.b0, 1, 1) - a_p
    s = PairStructure(
        a_p=a_p, b_p=count(pair.b1, 0, 0), c=count(pair.b0, 1, 0), d=count(pair.b0, 0, 1), e=e
    )
    checks = {
        "b1 (1,0) = c+e": count(pair.b1, 1, 0) == s.c + s.e,
        "b1 (0,1) = d+e": count(pair.b1, 0, 1) == s.d + s.e,
        "b0 (0,0) = b'+e": count(pair.b0, 0, 0) == s.b_p + s.e,
    }
    failed = [name for name, ok in checks.items() if not ok]
    if e < 0 or failed:
        raise VSSError(f"rows ({i},{j}) do not fit the canonical (2,n) form: {failed or 'e < 0'}")
    if e == 0:
        raise ContrastViolation(f"rows ({i},{j}) carry no contrast (e = 0)")
    return s


# -- text format ---------------------------------------------------------------


def _parse_rows(lines: list[str], n: int, m: int, what: str) -> BooleanMatrix:
    if len(lines) != n:
        raise VSSError(f"{what}: expected {n} rows, got {len(lines)}")
    rows = []
    for ln in lines:
        vals = ln.split()
        if len(vals) != m:
            raise VSSError(f"{what}: ragged row {ln!r} (expected {m} entries)")
        try:
            rows.append([int(v) for v in vals])
        except ValueError:
            raise VSSError(f"{what}: non-integer entry in {ln!r}") from None
    return BooleanMatrix(rows)


def parse_basis_pair(text: str, validate: bool = True) -> BasisPair:
    """Parse ``n m k``, n rows of B0, a ``---`` line, n rows of B1."""
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines:
        raise VSSError("empty basis-pair text")
    try:
        n, m, k = (int(v) for v in lines[0].split())
    except ValueError:
        raise VSSError(f"bad header {lines[0]!r}; expected 'n m k'") from None
    body = lines[1:]
    if "---" not in body:
        raise VSSError("missing '---' separator")
    sep = body.index("---")
    pair = BasisPair(
        _parse_rows(body[:sep], n, m, "B0"), _parse_rows(body[sep + 1 :], n, m, "B1"), k
    )
    return pair.validate() if validate else pair


def format_matrix(mat: BooleanMatrix) -> str:
    return "\n".join(" ".join(str(int(v)) for v in r) for r in mat.bits)


def format_basis_pair(pair: BasisPair) -> str:
    return f"{pair.n} {pair.m} {pair.k}\n{format_matrix(pair.b0)}\n---\n{format_matrix(pair.b1)}\n"
