import hashlib
import os

import pytest
from hypothesis import given, settings, strategies as st

from frodoproc.params import ShakeVariant
from frodoproc.xof import Sponge, keccak_f, permutation_count, shake, shake_reference

V128, V256 = ShakeVariant.SHAKE128, ShakeVariant.SHAKE256


def test_zero_state_first_lane():
    assert keccak_f([0] * 25)[0] == 0xF1258F7940E1DDE7


def test_permutation_sanity():
    st0 = [int.from_bytes(os.urandom(8), "little") for _ in range(25)]
    once = keccak_f(st0)
    assert keccak_f(once) != st0
    other = list(st0)
    other[3] ^= 1
    assert keccak_f(other) != once


def test_empty_vectors():
    assert shake(V128, b"", 4) == bytes.fromhex("7f9c2ba4")
    assert shake(V256, b"", 4) == bytes.fromhex("46b9dd2b")
    assert shake(V128, b"abc", 0) == b""


@pytest.mark.parametrize("variant, ref", [(V128, hashlib.shake_128), (V256, hashlib.shake_256)])
@pytest.mark.parametrize("n_in, n_out", [(0, 1), (135, 137), (136, 300), (167, 168), (168, 169), (500, 1000)])
def test_sponge_matches_hashlib(variant, ref, n_in, n_out):
    data = os.urandom(n_in)
    assert Sponge(variant, data).squeeze(n_out) == ref(data).digest(n_out)
    assert shake_reference(variant, data, n_out) == ref(data).digest(n_out)
    assert shake(variant, data, n_out) == ref(data).digest(n_out)


@settings(max_examples=40, deadline=None)
@given(st.binary(max_size=400), st.lists(st.integers(0, 200), max_size=5), st.lists(st.integers(0, 200), max_size=4))
def test_incremental_equals_oneshot(data, in_cuts, out_sizes):
    sp = Sponge(V128)
    pos = 0
    for c in sorted(min(c, len(data)) for c in in_cuts):
        sp.absorb(data[pos:c])
        pos = c
    sp.absorb(data[pos:])
    out = b"".join(sp.squeeze(n) for n in out_sizes)
    assert out == hashlib.shake_128(data).digest(sum(out_sizes))


def test_prefix_property():
    x = b"prefix"
    assert shake(V256, x, 1000).startswith(shake(V256, x, 77))


def test_no_absorb_after_squeeze():
    sp = Sponge(V256, b"x")
    sp.squeeze(1)
    with pytest.raises(Exception):
        sp.absorb(b"y")


def test_offset_stays_in_block():
    sp = Sponge(V128)
    for _ in range(40):
        sp.absorb(os.urandom(13))
        assert 0 <= sp.absorbed_offset < V128.rate_bytes


def test_permutation_count():
    # 168 input bytes need 2 absorb blocks (padding spills); 1 squeeze block suffices for 10 bytes
    absorb, squeeze = permutation_count(V128, 168, 10)
    assert absorb + squeeze == 2
