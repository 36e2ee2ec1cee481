import os

import numpy as np
import pytest

from frodoproc import codec, kem
from frodoproc.params import params_for

import oracles


@pytest.fixture(scope="module")
def pair640():
    p = params_for(640)
    pair = kem.keygen(os.urandom(p.keygen_randomness_len), p)
    ct, ss = kem.encaps(pair.pk, os.urandom(p.encaps_randomness_len), p)
    return p, pair, ct, ss


def test_roundtrip(p):
    pair = kem.keygen(os.urandom(p.keygen_randomness_len), p)
    ct, ss = kem.encaps(pair.pk, os.urandom(p.encaps_randomness_len), p)
    assert (len(pair.pk), len(pair.sk), len(ct), len(ss)) == (p.len_pk, p.len_sk, p.len_ct, p.len_ss)
    assert kem.decaps(pair.sk, ct, p) == ss


def test_deterministic(pair640):
    p, pair, ct, ss = pair640
    r = bytes(range(p.keygen_randomness_len))
    assert kem.keygen(r, p) == kem.keygen(r, p)
    e = bytes(p.encaps_randomness_len)
    assert kem.encaps(pair.pk, e, p) == kem.encaps(pair.pk, e, p)


def test_sk_layout(pair640):
    p, pair, _, _ = pair640
    assert pair.sk[p.len_s:p.len_s + p.len_pk] == pair.pk
    assert pair.sk[-p.len_pkh:] == oracles.xof(p, pair.pk, p.len_pkh)


def test_pk_parses_and_repacks(pair640):
    p, pair, _, _ = pair640
    b = codec.unpack(pair.pk[p.len_seed_a:], p.n, p.nbar, p)
    assert codec.pack(b, p) == pair.pk[p.len_seed_a:]


def test_keygen_matches_oracle(pair640):
    p, pair, _, _ = pair640
    key = kem.parse_sk(pair.sk, p)
    a = oracles.gen_a(p, key.seed_a)
    # B - A S must be the small error E
    e = (key.b.astype(np.int64) - a @ key.s_t.T.astype(np.int64)) % p.q
    e = np.where(e > p.q // 2, e - p.q, e)
    assert int(np.abs(e).max()) <= p.d


@pytest.mark.parametrize("where", ["bp", "c", "salt"])
def test_tamper_rejects(pair640, where):
    p, pair, ct, ss = pair640
    off = {"bp": 5, "c": p.len_b_packed + 3, "salt": p.len_ct - 1}[where]
    bad = bytearray(ct)
    bad[off] ^= 0x10
    got = kem.decaps(pair.sk, bytes(bad), p)
    assert got != ss
    assert got == oracles.decaps(p, pair.sk, bytes(bad))
    assert got == oracles.xof(p, bytes(bad) + pair.sk[:p.len_s], p.len_ss)


def test_oracle_accepts_valid(pair640):
    p, pair, ct, ss = pair640
    assert oracles.decaps(p, pair.sk, ct) == ss


def test_length_errors(pair640):
    p, pair, ct, _ = pair640
    with pytest.raises(kem.KemLengthError):
        kem.decaps(pair.sk, ct[:-1], p)
    with pytest.raises(kem.KemLengthError):
        kem.decaps(pair.sk + b"\0", ct, p)
    with pytest.raises(kem.KemLengthError):
        kem.encaps(pair.pk[:-2], bytes(p.encaps_randomness_len), p)
    with pytest.raises(kem.KemLengthError):
        kem.keygen(b"short", p)


def test_verify_select():
    a, b, c = b"\x01" * 16, b"\x02" * 16, b"\x01" * 16
    assert kem.verify_select(a, b, c) == a
    assert kem.verify_select(a, b, b"\x01" * 15 + b"\x00") == b
    assert kem.verify_select(a, b, b"\x00" + b"\x01" * 15) == b
    with pytest.raises(ValueError):
        kem.verify_select(a, b, c[:8])


def test_verify_select_vs_direct():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        ss0, ss1 = rng.bytes(16), rng.bytes(16)
        ss2 = ss0 if rng.random() < 0.5 else bytearray(ss0)
        if ss2 is not ss0:
            ss2[int(rng.integers(16))] ^= 1 << int(rng.integers(8))
        ss2 = bytes(ss2)
        assert kem.verify_select(ss0, ss1, ss2) == (ss0 if ss0 == ss2 else ss1)


def test_tamper_sensitivity_positions(pair640):
    p, pair, ct, ss = pair640
    rng = np.random.default_rng(8)
    for bit in rng.choice(8 * p.len_ct, size=16, replace=False):
        bad = bytearray(ct)
        bad[bit // 8] ^= 1 << (bit % 8)
        assert kem.decaps(pair.sk, bytes(bad), p) != ss
