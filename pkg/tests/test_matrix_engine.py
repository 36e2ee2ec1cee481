import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from frodoproc.matrix_engine import (MatrixRows, ProviderExhausted, mac_block_product, mat_add_blocks, mat_sub_mul,
                                     matmul_ma, matmul_mac, mul_sign_extract, naive_matmul_add, to_zq)

D = 15
Q = 1 << D


def rand_instance(rng, n, D=D, d=12):
    a = rng.integers(0, 1 << D, size=(n, n)).astype(np.uint16)
    s = rng.integers(-d, d + 1, size=(n, 8)).astype(np.int8)
    e = rng.integers(0, 1 << D, size=(n, 8)).astype(np.uint16)
    return a, s, e


def test_sign_extract_examples():
    assert mul_sign_extract(7, -3, 15) == 32747
    assert mul_sign_extract(12345, 0, 16) == 0
    with pytest.raises(ValueError):
        mul_sign_extract(1, 16, 16)


def test_block_product_edge_cases():
    e = np.arange(8).reshape(2, 4)
    zeros_a = [np.zeros((2, 4))] * 4
    zeros_s = [np.zeros((4, 4))] * 4
    assert np.array_equal(mac_block_product(zeros_a, zeros_s, e, D), e)
    # left block picks rows 0 and 2 of S
    a = np.zeros((2, 4), dtype=np.uint16)
    a[0, 0] = a[1, 2] = 1
    s = np.arange(16).reshape(4, 4) - 8
    out = mac_block_product([a], [s], np.zeros((2, 4)), D)
    assert np.array_equal(out, to_zq(s[[0, 2]], D))
    with pytest.raises(ValueError):
        mac_block_product([a, a], [s], np.zeros((2, 4)), D)


def test_block_product_vs_naive():
    rng = np.random.default_rng(1)
    a, s, e = rand_instance(rng, 16)
    blocks_a = [a[0:2, 4 * k:4 * k + 4] for k in range(4)]
    blocks_s = [s[4 * k:4 * k + 4, 0:4] for k in range(4)]
    got = mac_block_product(blocks_a, blocks_s, e[0:2, 0:4], D)
    ref = np.array(naive_matmul_add(a[0:2], s[:, 0:4], e[0:2, 0:4], D))
    assert np.array_equal(got, ref)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([8, 16, 64]), st.sampled_from([15, 16]), st.integers(0, 2 ** 32 - 1))
def test_modes_agree(n, D_, seed):
    rng = np.random.default_rng(seed)
    a, s, e = rand_instance(rng, n, D_)
    ref = np.array(naive_matmul_add(a, s, e, D_))
    mac = matmul_mac(MatrixRows(a), s, e, D_)
    assert np.array_equal(mac, ref)
    # S'A + E' with S' = s^T and E' = e^T, returned transposed
    ma = matmul_ma(MatrixRows(a), s, e, D_)
    ref_t = np.array(naive_matmul_add(a.T, s, e, D_))
    assert np.array_equal(ma, ref_t)
    assert int(mac.max()) < (1 << D_) and int(ma.max()) < (1 << D_)


def test_zero_operands():
    z = np.zeros((8, 8), dtype=np.uint16)
    a = np.random.default_rng(0).integers(0, Q, size=(8, 8))
    assert not matmul_mac(MatrixRows(a), z.astype(np.int8), z, D).any()
    assert not matmul_ma(MatrixRows(a), z.astype(np.int8), z, D).any()


def test_ma_partial_sums_trace():
    rng = np.random.default_rng(3)
    a, s, e = rand_instance(rng, 8)
    seen = []
    matmul_ma(MatrixRows(a), s, e, D, on_phase=lambda k, j, r: seen.append((k, j, r.copy())))
    for k, j, r in seen:
        rows = slice(0, 4 * (k + 1))
        cols = slice(4 * j, 4 * j + 4)
        expect = np.array(naive_matmul_add(a[rows].T, s[rows, cols], e[:, cols], D))
        assert np.array_equal(r[:, cols], expect)


def test_write_counts():
    rng = np.random.default_rng(4)
    a, s, e = rand_instance(rng, 16)
    counts = np.zeros((16, 8), dtype=np.int64)
    matmul_ma(MatrixRows(a), s, e, D, write_counts=counts)
    assert (counts == 16 // 4).all()
    blocks = []
    matmul_mac(MatrixRows(a), s, e, D, on_block=lambda i, j, b: blocks.append((i, j)))
    assert sorted(blocks) == [(i, j) for i in range(8) for j in range(2)]


def test_provider_exhaustion():
    a = np.zeros((4, 8), dtype=np.uint16)
    with pytest.raises(ProviderExhausted):
        matmul_mac(MatrixRows(a), np.zeros((8, 8), np.int8), np.zeros((8, 8), np.uint16), D)


def test_sub_mul():
    rng = np.random.default_rng(5)
    bp = rng.integers(0, Q, size=(8, 64)).astype(np.uint16)
    s = rng.integers(-12, 13, size=(64, 8)).astype(np.int8)
    c = rng.integers(0, Q, size=(8, 8)).astype(np.uint16)
    assert np.array_equal(mat_sub_mul(c, bp, np.zeros_like(s), D), c)
    assert np.array_equal(mat_sub_mul(c, bp, s, D), np.array(naive_matmul_add(bp, s, c, D, subtract=True)))
    with pytest.raises(ValueError):
        mat_sub_mul(c, bp, s[:32], D)


def test_add_blocks():
    rng = np.random.default_rng(6)
    x = rng.integers(0, Q, size=(8, 8)).astype(np.uint16)
    y = rng.integers(0, Q, size=(8, 8)).astype(np.uint16)
    assert np.array_equal(mat_add_blocks(x, np.zeros_like(y), D), x)
    assert np.array_equal(mat_add_blocks(x, y, D), mat_add_blocks(y, x, D))
    assert np.array_equal(mat_add_blocks(x, y, D), (x.astype(np.int64) + y) % Q)
    with pytest.raises(ValueError):
        mat_add_blocks(x, y[:4], D)
