from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from stvss.codec import (
    FingerprintMismatch,
    ShareImage,
    cell_weights,
    empirical_contrast,
    encode,
    measure_empirical_contrast,
    stack,
)
from stvss.construct import StvssParams, build
from stvss.core import VSSError, builtin_pair
from stvss.pbm import Bitmap
from stvss.permutations import collection_array
from stvss.shift import ShiftAssignment


def random_secret(h, w, seed):
    return Bitmap(np.random.default_rng(seed).integers(0, 2, (h, w)))


def test_single_white_pixel(dup22_pair):
    shares = encode(Bitmap([[0]]), dup22_pair, seed=0)
    assert len(shares) == 3
    for s in shares:
        assert s.bitmap.bits.shape == (2, 6)
        assert int(s.bitmap.bits.sum()) == 8


def test_cells_come_from_the_collection(dup22_pair):
    secret = random_secret(5, 7, 1)
    shares = encode(secret, dup22_pair, seed=2)
    colls = [collection_array(dup22_pair, c, "sync") for c in (0, 1)]
    for r in range(5):
        for c in range(7):
            rows = np.concatenate([s.bitmap.bits[2 * r : 2 * r + 2, 6 * c : 6 * c + 6] for s in shares])
            coll = colls[secret.bits[r, c]]
            assert any(np.array_equal(rows, m) for m in coll)


def test_all_black_equal_weights(dup22_pair):
    shares = encode(Bitmap(np.ones((2, 2))), dup22_pair, seed=3)
    weights = {int(w) for s in shares for w in cell_weights(s, dup22_pair).ravel()}
    assert weights == {8}


def test_encode_deterministic(dup22_pair):
    secret = random_secret(4, 4, 0)
    a = encode(secret, dup22_pair, seed=5)
    b = encode(secret, dup22_pair, seed=5)
    c = encode(secret, dup22_pair, seed=6)
    assert [s.bitmap for s in a] == [s.bitmap for s in b]
    assert [s.bitmap for s in a] != [s.bitmap for s in c]


def test_stack_self_is_identity(dup22_pair):
    share = encode(random_secret(3, 3, 0), dup22_pair, seed=1)[0]
    assert stack([share]) == share.bitmap
    assert stack([share, ShareImage(2, share.bitmap, share.fingerprint)]) == share.bitmap


def test_zero_shift_weights(dup22_pair):
    secret = random_secret(6, 6, 4)
    shares = encode(secret, dup22_pair, seed=4)
    out = stack([shares[0], shares[2]])
    weights = out.bits.reshape(6, 2, 6, 6).sum(axis=(1, 3))
    # n_y * n_x * l for white, n_y * n_x * h for black
    assert (weights[secret.bits == 0] == 8).all()
    assert (weights[secret.bits == 1] == 12).all()
    shifts = ShiftAssignment(1)
    assert measure_empirical_contrast(secret, out, dup22_pair, shifts) == Fraction(1, 3)


def test_fingerprint_mismatch(dup22_pair, dup21_pair):
    a = encode(Bitmap([[0, 1]]), dup22_pair, seed=0)[0]
    other = build(builtin_pair("ex1_2_3"), StvssParams(2, 2), "pixel_dup")
    b = encode(Bitmap([[0, 1]]), other, seed=0)[1]
    with pytest.raises(FingerprintMismatch):
        stack([a, b])
    c = encode(Bitmap([[0, 1]]), dup22_pair, method="full", seed=0)[1]
    with pytest.raises(FingerprintMismatch):
        stack([a, c])


def test_stack_validation(dup22_pair):
    shares = encode(Bitmap([[0, 1]]), dup22_pair, seed=0)
    with pytest.raises(VSSError):
        stack([])
    with pytest.raises(VSSError):
        stack([shares[0], shares[0]])
    with pytest.raises(VSSError):
        stack(shares[:2], ShiftAssignment.single(3, 1, 1, 0))
    with pytest.raises(VSSError):
        stack(shares[:2], ShiftAssignment.single(1, 3, 1, 0))


def test_translation_direction(dup22_pair):
    shares = encode(random_secret(3, 3, 2), dup22_pair, seed=2)
    moved = stack([shares[0], shares[1]], ShiftAssignment.single(1, 2, 1, 1))
    expect = shares[0].bitmap.bits.copy()
    expect[:-1, :-1] |= shares[1].bitmap.bits[1:, 1:]
    assert np.array_equal(moved.bits, expect)
    back = stack([shares[0], shares[1]], ShiftAssignment.single(1, 2, -2, -1))
    expect = shares[0].bitmap.bits.copy()
    expect[1:, 2:] |= shares[1].bitmap.bits[:-1, :-2]
    assert np.array_equal(back.bits, expect)
    far = stack([shares[0], shares[1]], ShiftAssignment.single(1, 2, 100, 0))
    assert far == shares[0].bitmap


def test_dup22_cell_weights(dup22_pair):
    secret = random_secret(40, 40, 8)
    shares = encode(secret, dup22_pair, seed=8)
    shifts = ShiftAssignment.single(1, 3, 1, 1)
    out = stack([shares[0], shares[2]], shifts)
    weights = out.bits.reshape(40, 2, 40, 6).sum(axis=(1, 3))[:-1, :-1]
    inner = secret.bits[:-1, :-1]
    white, black = Counter(weights[inner == 0].tolist()), Counter(weights[inner == 1].tolist())
    assert white[12] > 0 and black[10] > 0
    assert max(white) <= 12 and max(black) <= 12


def test_measure_matches_oracle(dup22_pair):
    secret = random_secret(120, 120, 3)
    shares = encode(secret, dup22_pair, seed=3)
    shifts = ShiftAssignment.single(1, 3, 1, 1)
    result = empirical_contrast(secret, stack([shares[0], shares[2]], shifts), dup22_pair, shifts)
    assert result.black_cells + result.white_cells == 119 * 119
    assert abs(float(result.value) + 5 / 72) < 5 * result.std_error


def test_traditional_vertical_slip_near_zero():
    pair = build(builtin_pair("ex2_2_2"), StvssParams())
    secret = random_secret(150, 150, 12)
    shares = encode(secret, pair, seed=12)
    shifts = ShiftAssignment.single(1, 2, 0, 1)
    result = empirical_contrast(secret, stack(shares, shifts), pair, shifts)
    assert abs(float(result.value)) < 5 * result.std_error


def test_measure_needs_both_colors(dup22_pair):
    secret = Bitmap(np.zeros((3, 3)))
    shares = encode(secret, dup22_pair, seed=0)
    with pytest.raises(VSSError):
        measure_empirical_contrast(secret, stack(shares), dup22_pair, ShiftAssignment(1))
    with pytest.raises(VSSError):
        measure_empirical_contrast(secret, Bitmap(np.zeros((2, 2))), dup22_pair, ShiftAssignment(1))


@pytest.mark.parametrize("name, params", [("ex1_2_3", (2, 2)), ("ex7_3_4", (2, 2)), ("ex2_2_2", (1, 2))])
def test_share_statistics_do_not_depend_on_secret(name, params):
    pair = build(builtin_pair(name), StvssParams(*params))
    a = Bitmap(np.zeros((64, 64)))
    b = random_secret(64, 64, 99)
    sa, sb = encode(a, pair, seed=1), encode(b, pair, seed=1)
    for i in range(pair.n):
        ha = Counter(cell_weights(sa[i], pair).ravel().tolist())
        hb = Counter(cell_weights(sb[i], pair).ravel().tolist())
        assert ha == hb
    if pair.k == 3:  # any two shares of a (3,4) scheme
        for i in range(pair.n):
            for j in range(i + 1, pair.n):
                pa = stack([sa[i], sa[j]])
                pb = stack([sb[i], sb[j]])
                wa = Counter(pa.bits.reshape(64, 2, 64, 12).sum(axis=(1, 3)).ravel().tolist())
                wb = Counter(pb.bits.reshape(64, 2, 64, 12).sum(axis=(1, 3)).ravel().tolist())
                assert wa == wb
