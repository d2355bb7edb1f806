"""Canonical-vector and logical-matrix algebra, checked against dense oracles."""

import itertools
import random

import numpy as np
import pytest

import helpers
from bcnkit.stp import (
    CanonicalVector,
    LogicalMatrix,
    block,
    decode,
    delta,
    encode,
    mat_pow,
    pack,
    stp,
    stp_vec,
)

I2 = LogicalMatrix.identity(2)
# saturating increment counter and its reset sibling
C1 = LogicalMatrix(5, (2, 3, 4, 5, 5))
C2 = LogicalMatrix(5, (1, 1, 1, 1, 1))
C = LogicalMatrix(5, C1.col_index + C2.col_index + C2.col_index + C2.col_index)


def test_canonical_vector_validates_range():
    with pytest.raises(ValueError):
        delta(0, 3)
    with pytest.raises(ValueError):
        delta(4, 3)
    with pytest.raises(ValueError):
        CanonicalVector(1, 0)


def test_logical_matrix_validates_columns():
    with pytest.raises(ValueError):
        LogicalMatrix(3, (1, 4))
    with pytest.raises(ValueError):
        LogicalMatrix(0, (1,))
    with pytest.raises(ValueError):
        LogicalMatrix(3, ())


def test_permutation_predicate():
    assert LogicalMatrix(3, (2, 3, 1)).is_permutation
    assert not LogicalMatrix(3, (2, 2, 1)).is_permutation
    assert not LogicalMatrix(3, (2, 3)).is_permutation


def test_stp_identity_case():
    assert stp(I2, I2) == I2


def test_stp_counter_step():
    # one simultaneous alert moves the counter from 0 to 1
    result = stp(C1, delta(1, 5).as_matrix())
    assert result.as_vector() == delta(2, 5)


def test_stp_matches_dense_kronecker_oracle():
    rng = random.Random(42)
    a = helpers.random_logical(rng, 4, 2)
    b = helpers.random_logical(rng, 6, 3)
    result = stp(a, b)
    expected = helpers.dense_stp(helpers.dense(a), helpers.dense(b))
    assert (result.rows, result.cols) == expected.shape == (12, 3)
    assert np.array_equal(helpers.dense(result), expected)


def test_stp_dimension_law():
    import math

    rng = random.Random(1)
    for _ in range(200):
        a = helpers.random_logical(rng, rng.randint(1, 7), rng.randint(1, 7))
        b = helpers.random_logical(rng, rng.randint(1, 7), rng.randint(1, 7))
        t = math.lcm(a.cols, b.rows)
        result = stp(a, b)
        assert result.rows == a.rows * t // a.cols
        assert result.cols == b.cols * t // b.rows


def test_stp_reduces_to_matrix_product():
    rng = random.Random(2)
    for _ in range(200):
        n = rng.randint(1, 6)
        a = helpers.random_logical(rng, rng.randint(1, 6), n)
        b = helpers.random_logical(rng, n, rng.randint(1, 6))
        assert np.array_equal(
            helpers.dense(stp(a, b)), helpers.dense(a) @ helpers.dense(b)
        )


def test_stp_associativity():
    rng = random.Random(3)
    for _ in range(150):
        a = helpers.random_logical(rng, rng.randint(1, 6), rng.randint(1, 6))
        b = helpers.random_logical(rng, rng.randint(1, 6), rng.randint(1, 6))
        c = helpers.random_logical(rng, rng.randint(1, 6), rng.randint(1, 6))
        assert stp(stp(a, b), c) == stp(a, stp(b, c))


def test_stp_vec_examples():
    assert stp_vec(delta(2, 2), delta(1, 2)) == delta(3, 4)
    assert stp_vec(delta(1, 7), delta(1, 9)) == delta(1, 63)
    assert stp_vec(delta(5, 5), delta(3, 3)) == delta(15, 15)


def test_stp_vec_formula_exhaustive():
    for a in range(1, 9):
        for b in range(1, 9):
            for i in range(1, a + 1):
                for j in range(1, b + 1):
                    v = stp_vec(delta(i, a), delta(j, b))
                    assert v == delta((i - 1) * b + j, a * b)
                    via_mat = stp(delta(i, a).as_matrix(), delta(j, b).as_matrix())
                    assert via_mat.as_vector() == v


def test_encode_examples():
    assert encode((1,)) == delta(1, 2)
    assert encode((1, 0)) == delta(2, 4)
    assert encode((1, 1, 1, 1)) == delta(1, 16)
    assert encode((0, 0, 0, 0)) == delta(16, 16)


def test_encode_follows_table_ordering():
    # all-true first, all-false last, each earlier bit most significant
    for row, bits in enumerate(itertools.product((1, 0), repeat=4), start=1):
        assert encode(bits) == delta(row, 16)


def test_encode_coherence_with_stp_vec_fold():
    for n in range(1, 5):
        for bits in itertools.product((0, 1), repeat=n):
            folded = delta(2 - bits[0], 2)
            for b in bits[1:]:
                folded = stp_vec(folded, delta(2 - b, 2))
            assert encode(bits) == folded


def test_encode_rejects_bad_input():
    with pytest.raises(ValueError):
        encode(())
    with pytest.raises(ValueError):
        encode((1, 2))


def test_decode_examples():
    assert decode(delta(3, 4), (2, 2)) == (2, 1)
    assert decode(delta(1, 16), (2, 2, 2, 2)) == (1, 1, 1, 1)


def test_decode_shape_mismatch():
    with pytest.raises(ValueError):
        decode(delta(3, 4), (2, 3))


def test_pack_decode_roundtrip_random():
    rng = random.Random(4)
    for _ in range(200):
        dims = tuple(rng.randint(1, 5) for _ in range(rng.randint(1, 5)))
        values = tuple(rng.randint(1, d) for d in dims)
        packed = pack(values, dims)
        assert decode(packed, dims) == values


def test_pack_matches_stp_vec_fold():
    rng = random.Random(5)
    for _ in range(100):
        dims = tuple(rng.randint(1, 4) for _ in range(rng.randint(1, 4)))
        values = tuple(rng.randint(1, d) for d in dims)
        folded = delta(values[0], dims[0])
        for v, d in zip(values[1:], dims[1:]):
            folded = stp_vec(folded, delta(v, d))
        assert pack(values, dims) == folded


def test_mat_pow_zeroth_power():
    assert mat_pow(C1, 0) == LogicalMatrix.identity(5)


def test_mat_pow_counter_saturates():
    assert mat_pow(C1, 5) == LogicalMatrix(5, (5, 5, 5, 5, 5))


def test_mat_pow_swap_involution():
    swap = LogicalMatrix(2, (2, 1))
    assert mat_pow(swap, 2) == LogicalMatrix.identity(2)
    assert mat_pow(swap, 7) == swap


def test_mat_pow_matches_dense_oracle():
    rng = random.Random(6)
    for _ in range(50):
        n = rng.randint(1, 6)
        a = helpers.random_logical(rng, n, n)
        k = rng.randint(0, 6)
        expected = np.linalg.matrix_power(helpers.dense(a), k)
        assert np.array_equal(helpers.dense(mat_pow(a, k)), expected)


def test_mat_pow_rejects_non_square():
    with pytest.raises(ValueError):
        mat_pow(LogicalMatrix(2, (1, 2, 2)), 2)
    with pytest.raises(ValueError):
        mat_pow(I2, -1)


def test_block_extracts_counter_blocks():
    assert block(C, 1, 5) == C1
    assert block(C, 2, 5) == C2
    assert block(LogicalMatrix.identity(4), 1, 4) == LogicalMatrix.identity(4)


def test_block_errors():
    with pytest.raises(ValueError):
        block(C, 1, 3)
    with pytest.raises(ValueError):
        block(C, 5, 5)


def test_block_coherence_with_stp():
    rng = random.Random(7)
    for _ in range(100):
        nblocks = rng.randint(1, 4)
        width = rng.randint(1, 4)
        a = helpers.random_logical(rng, rng.randint(1, 5), nblocks * width)
        for k in range(1, nblocks + 1):
            assert block(a, k, width) == stp(a, delta(k, nblocks).as_matrix())
