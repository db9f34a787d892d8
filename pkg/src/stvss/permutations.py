"""Encoding collections: every matrix the dealer may pick for one color.

A collection is the multiset of column permutations of ``B0*`` or ``B1*``
allowed by a :class:`PermutationMethod`. Uniform sampling is over
permutation choices, so matrices that arise from several permutations
(repeated columns) carry proportional weight.
"""

from __future__ import annotations

import enum
from collections import Counter
from fractions import Fraction
from functools import lru_cache
from itertools import permutations, product
from math import factorial
from typing import Iterator

import numpy as np

from .construct import StvssPair, as_color
from .core import BooleanMatrix, VSSError

DEFAULT_BUDGET = 10**7


class BudgetExceeded(VSSError):
    """An exact enumeration would exceed the configured budget."""


class PermutationMethod(enum.Enum):
    FULL = "full"  # all columns permuted jointly
    PER_BLOCK = "per_block"  # each column group permuted independently
    SYNCHRONIZED = "synchronized"  # one permutation applied to every group

    @classmethod
    def parse(cls, value) -> "PermutationMethod":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "_")
        aliases = {
            "1": cls.FULL,
            "method1": cls.FULL,
            "2": cls.PER_BLOCK,
            "method2": cls.PER_BLOCK,
            "perblockindependent": cls.PER_BLOCK,
            "per_block_independent": cls.PER_BLOCK,
            "3": cls.SYNCHRONIZED,
            "method3": cls.SYNCHRONIZED,
            "sync": cls.SYNCHRONIZED,
        }
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            raise VSSError(f"unknown permutation method {value!r}") from None


def permutation_count(pair: StvssPair, method) -> int:
    method = PermutationMethod.parse(method)
    if method is PermutationMethod.SYNCHRONIZED:
        return factorial(pair.m)
    if method is PermutationMethod.PER_BLOCK:
        return factorial(pair.m) ** pair.n_x
    return factorial(pair.width)


def _check_budget(pair: StvssPair, method: PermutationMethod, budget: int | None) -> int:
    count = permutation_count(pair, method)
    budget = DEFAULT_BUDGET if budget is None else budget
    if count > budget:
        raise BudgetExceeded(
            f"{method.value} collection has {count} permutation choices, budget is {budget}"
        )
    return count


def iter_words(pair: StvssPair, method) -> Iterator[tuple[int, ...]]:
    """Permutation words in lexicographic order.

    Synchronized words have length ``m``; per-block words are the ``n_x``
    group permutations concatenated; full words have length ``n_x*m``.
    """
    method = PermutationMethod.parse(method)
    if method is PermutationMethod.SYNCHRONIZED:
        yield from permutations(range(pair.m))
    elif method is PermutationMethod.PER_BLOCK:
        for parts in product(list(permutations(range(pair.m))), repeat=pair.n_x):
            yield sum(parts, ())
    else:
        yield from permutations(range(pair.width))


def _colmaps_from_words(pair: StvssPair, method: PermutationMethod, words: np.ndarray) -> np.ndarray:
    """Vectorised word -> column map; ``out[s, j]`` is the source column of column ``j``."""
    words = np.asarray(words, dtype=np.int64)
    if method is PermutationMethod.FULL:
        return words
    groups = pair.column_groups()
    out = np.empty((words.shape[0], pair.width), dtype=np.int64)
    m = pair.m
    for g in range(pair.n_x):
        perm = words if method is PermutationMethod.SYNCHRONIZED else words[:, g * m : (g + 1) * m]
        out[:, groups[g]] = groups[g][perm]
    return out


def column_map(pair: StvssPair, method, word) -> np.ndarray:
    method = PermutationMethod.parse(method)
    return _colmaps_from_words(pair, method, np.asarray([word]))[0]


@lru_cache(maxsize=64)
def _colmaps(pair: StvssPair, method: PermutationMethod) -> np.ndarray:
    words = np.array(list(iter_words(pair, method)), dtype=np.int64)
    maps = _colmaps_from_words(pair, method, words)
    maps.setflags(write=False)
    return maps


@lru_cache(maxsize=64)
def _collection(pair: StvssPair, color: int, method: PermutationMethod) -> np.ndarray:
    bits = pair.matrix(color).bits
    coll = np.ascontiguousarray(np.moveaxis(bits[:, _colmaps(pair, method)], 1, 0))
    coll.setflags(write=False)
    return coll


def collection_array(pair: StvssPair, color, method, budget: int | None = None) -> np.ndarray:
    """All collection matrices as a read-only ``(count, rows, cols)`` array."""
    method = PermutationMethod.parse(method)
    _check_budget(pair, method, budget)
    return _collection(pair, as_color(color), method)


def iter_collection(pair: StvssPair, color, method, budget: int | None = None):
    """Yield ``(word, matrix)`` in enumeration order."""
    method = PermutationMethod.parse(method)
    _check_budget(pair, method, budget)
    bits = pair.matrix(color).bits

    def gen():
        for word in iter_words(pair, method):
            yield word, BooleanMatrix(bits[:, column_map(pair, method, word)])

    return gen()


def enumerate_collection(pair: StvssPair, color, method, budget: int | None = None) -> Iterator[BooleanMatrix]:
    """One matrix per permutation choice, in lexicographic word order."""
    return (mat for _, mat in iter_collection(pair, color, method, budget))


def _rng(rng) -> np.random.Generator:
    return rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)


def sample_words(pair: StvssPair, method, rng, size: int) -> np.ndarray:
    """``size`` independent uniform permutation words, shape ``(size, word_len)``."""
    method = PermutationMethod.parse(method)
    rng = _rng(rng)
    if method is PermutationMethod.SYNCHRONIZED:
        return np.argsort(rng.random((size, pair.m)), axis=1)
    if method is PermutationMethod.PER_BLOCK:
        return np.concatenate(
            [np.argsort(rng.random((size, pair.m)), axis=1) for _ in range(pair.n_x)], axis=1
        )
    return np.argsort(rng.random((size, pair.width)), axis=1)


def sample_colmaps(pair: StvssPair, method, rng, size: int) -> np.ndarray:
    method = PermutationMethod.parse(method)
    return _colmaps_from_words(pair, method, sample_words(pair, method, rng, size))


def sample_matrix(pair: StvssPair, color, method, rng=None) -> BooleanMatrix:
    """One matrix drawn uniformly over permutation choices."""
    colmap = sample_colmaps(pair, method, _rng(rng), 1)[0]
    return BooleanMatrix(pair.matrix(color).bits[:, colmap])


def prefix_distribution(
    pair: StvssPair, color, method, share: int, row_in_block: int, width: int, budget: int | None = None
) -> list[tuple[str, Fraction]]:
    """Exact law of the first ``width`` entries of one share row.

    ``share`` and ``row_in_block`` are 1-based. Returns ``(bits, probability)``
    sorted by bit string.
    """
    if not 0 <= width <= pair.width:
        raise VSSError(f"width {width} outside 0..{pair.width}")
    if not 1 <= row_in_block <= pair.n_y:
        raise IndexError(f"row_in_block {row_in_block} out of range 1..{pair.n_y}")
    row = (share - 1) * pair.n_y + row_in_block - 1
    pair.share_rows(share)
    coll = collection_array(pair, color, method, budget)
    counts = Counter("".join(map(str, r)) for r in coll[:, row, :width].tolist())
    total = coll.shape[0]
    return sorted((bits, Fraction(c, total)) for bits, c in counts.items())
