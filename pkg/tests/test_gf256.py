"""Field arithmetic and evaluation-coding tests.

The reference multiply below is an independent bit-by-bit carry-less
product, so the log/antilog tables are checked against something that
never touches them.
"""

import random

import pytest
from hypothesis import given, strategies as st

from mvcode import gf256
from mvcode.gf256 import (
    EvalCodeword,
    InsufficientPointsError,
    eval_encode,
    interpolate,
    interpolate_pairs,
)


def ref_mul(a, b):
    p = 0
    while b:
        if b & 1:
            p ^= a
        a <<= 1
        if a & 0x100:
            a ^= 0x11B
        b >>= 1
    return p


def ref_inv(a):
    # brute-force scan of all 255 nonzero candidates
    for b in range(1, 256):
        if ref_mul(a, b) == 1:
            return b
    raise AssertionError(f"no inverse found for {a:#x}")


def test_add_is_xor():
    assert gf256.add(0x02, 0x03) == 0x01


def test_mul_identity_all_elements():
    for a in range(256):
        assert gf256.mul(a, 0x01) == a


def test_known_inverse():
    assert ref_inv(0x53) == 0xCA  # oracle agrees with the frozen value
    assert gf256.inv(0x53) == 0xCA


def test_inverse_table_exhaustive():
    for a in range(1, 256):
        assert gf256.mul(a, gf256.inv(a)) == 1
        assert gf256.inv(a) == ref_inv(a)


def test_inverse_of_zero_raises():
    with pytest.raises(ZeroDivisionError):
        gf256.inv(0)


def test_mul_matches_reference_on_sample():
    rng = random.Random(7)
    for _ in range(2000):
        a, b = rng.randrange(256), rng.randrange(256)
        assert gf256.mul(a, b) == ref_mul(a, b)


def test_field_axioms_sample():
    rng = random.Random(11)
    for _ in range(500):
        a, b, c = (rng.randrange(256) for _ in range(3))
        assert gf256.mul(a, b) == gf256.mul(b, a)
        assert gf256.mul(gf256.mul(a, b), c) == gf256.mul(a, gf256.mul(b, c))
        assert gf256.mul(a, b ^ c) == gf256.mul(a, b) ^ gf256.mul(a, c)


def test_constant_polynomial_evaluates_to_itself():
    for p in (0, 1, 77, 255):
        cw = eval_encode([5], [p])
        assert cw.values == (5,)


def test_degree_one_polynomial():
    # P(x) = 1 + x at points 0 and 1: P(0)=1, P(1)=1^1=0
    cw = eval_encode([1, 1], [0x00, 0x01])
    assert cw.values == (0x01, 0x00)


def test_two_of_three_recovery():
    rng = random.Random(3)
    for _ in range(200):
        msg = [rng.randrange(256), rng.randrange(256)]
        cw = eval_encode(msg, [5, 9, 17])
        for keep in ((0, 1), (0, 2), (1, 2)):
            sub = EvalCodeword(
                tuple(cw.point_ids[i] for i in keep),
                tuple(cw.values[i] for i in keep),
            )
            assert interpolate(sub, 2) == msg


def test_single_pair_interpolation():
    assert interpolate(EvalCodeword((42,), (9,)), 1) == [9]


def test_underdetermined_raises():
    cw = eval_encode([1, 2, 3], [4, 5, 6])
    with pytest.raises(InsufficientPointsError):
        interpolate(EvalCodeword(cw.point_ids[:2], cw.values[:2]), 3)


def test_duplicate_points_rejected():
    with pytest.raises(ValueError):
        eval_encode([1, 2], [7, 7])
    with pytest.raises(ValueError):
        EvalCodeword((7, 7), (1, 2))


def test_round_trip_1000_random_cases():
    rng = random.Random(2014)
    for _ in range(1000):
        length = rng.randrange(1, 17)
        msg = [rng.randrange(256) for _ in range(length)]
        extra = rng.randrange(0, 5)
        points = rng.sample(range(256), length + extra)
        cw = eval_encode(msg, points)
        assert interpolate(cw, length) == msg


def test_any_l_subset_agrees():
    rng = random.Random(99)
    msg = [rng.randrange(256) for _ in range(4)]
    points = rng.sample(range(256), 7)
    cw = eval_encode(msg, points)
    from itertools import combinations

    for keep in combinations(range(7), 4):
        sub_pts = [cw.point_ids[i] for i in keep]
        sub_vals = [cw.values[i] for i in keep]
        assert interpolate_pairs(sub_pts, sub_vals, 4) == msg


@given(
    st.lists(st.integers(0, 255), min_size=1, max_size=12),
    st.integers(0, 10_000),
)
def test_round_trip_property(msg, seed):
    rng = random.Random(seed)
    points = rng.sample(range(256), len(msg))
    assert interpolate(eval_encode(msg, points), len(msg)) == msg
