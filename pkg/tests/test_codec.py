import os

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from frodoproc import codec
from frodoproc.params import params_for

P640, P1344 = params_for(640), params_for(1344)


def test_scaling_examples():
    u = bytes([0b11]) + bytes(P640.len_u - 1)
    assert codec.encode(u, P640)[0, 0] == 24576
    u = bytes([9]) + bytes(P1344.len_u - 1)
    assert codec.encode(u, P1344)[0, 0] == 36864
    assert not codec.encode(bytes(P640.len_u), P640).any()


def test_encode_length_check():
    with pytest.raises(ValueError):
        codec.encode(bytes(3), P640)


def test_rounding_boundaries():
    m = np.zeros((8, 8), dtype=np.uint16)
    for value, chunk in ((24575, 3), (24576 + 4095, 3), (24576 + 4096, 0)):
        m[0, 0] = value
        assert codec.decode(m, P640)[0] & 3 == chunk


def test_rounding_sweep_640():
    # every element value decodes to round(v / 2^13) mod 4
    p = P640
    for v in range(0, p.q, 7):
        m = np.zeros((8, 8), dtype=np.uint16)
        m[0, 0] = v
        assert codec.decode(m, p)[0] & 3 == ((v + 4096) >> 13) % 4


def test_roundtrip_and_noise(p):
    for _ in range(50):
        u = os.urandom(p.len_u)
        enc = codec.encode(u, p)
        assert codec.decode(enc, p) == u
        half = 1 << (p.D - p.B - 1)
        noise = np.random.randint(-half + 1, half, size=enc.shape)
        assert codec.decode(((enc.astype(np.int64) + noise) % p.q).astype(np.uint16), p) == u


def test_single_chunk_exhaustive(p):
    for pos in range(64):
        for v in range(1 << p.B):
            bits = v << (pos * p.B)
            u = bits.to_bytes(p.len_u, "little")
            assert codec.decode(codec.encode(u, p), p) == u


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([640, 976, 1344]), st.integers(1, 4), st.integers(1, 4), st.data())
def test_pack_roundtrip(level, rb, cb, data):
    p = params_for(level)
    rows, cols = 2 * rb, 8 * cb
    seed = data.draw(st.integers(0, 2 ** 32 - 1))
    m = np.random.default_rng(seed).integers(0, p.q, size=(rows, cols)).astype(np.uint16)
    packed = codec.pack(m, p)
    assert len(packed) == rows * cols * p.D // 8
    assert np.array_equal(codec.unpack(packed, rows, cols, p), m)


def test_pack_zero_and_bad_length():
    z = np.zeros((8, 8), dtype=np.uint16)
    assert codec.pack(z, P640) == bytes(8 * 8 * 15 // 8)
    with pytest.raises(ValueError):
        codec.unpack(bytes(10), 8, 8, P640)
