"""FrodoKEM KeyGen / Encaps / Decaps over caller-supplied randomness.

Decapsulation uses hash-packed verification: instead of comparing the
re-encrypted (B'' || C') with (B' || C) directly, it hashes both candidates
and selects between ss0 (accept) and ss1 (implicit rejection) by comparing
ss0 with ss2.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import codec, sampling
from .matrix_engine import MatrixRows, mat_add_blocks, mat_sub_mul, matmul_ma, matmul_mac, to_zq
from .params import ParameterSet, SecurityLevel, params_for
from .xof import shake


class KemLengthError(ValueError):
    """An input byte string has the wrong length for the parameter set."""


@dataclass(frozen=True)
class KeyPair:
    pk: bytes
    sk: bytes


@dataclass(frozen=True)
class SecretKey:
    s: bytes
    pk: bytes
    seed_a: bytes
    b: np.ndarray       # n x nbar
    s_t: np.ndarray     # nbar x n, signed
    pkh: bytes


@dataclass(frozen=True)
class Ciphertext:
    bp: np.ndarray      # nbar x n
    c: np.ndarray       # nbar x nbar
    salt: bytes
    raw: bytes


def _check(name: str, data: bytes, expected: int) -> None:
    if len(data) != expected:
        raise KemLengthError(f"{name} must be {expected} bytes, got {len(data)}")


def _p(level) -> ParameterSet:
    return level if isinstance(level, ParameterSet) else params_for(level)


def parse_sk(sk: bytes, p: ParameterSet) -> SecretKey:
    _check("sk", sk, p.len_sk)
    off = p.len_s
    pk = sk[off:off + p.len_pk]
    off += p.len_pk
    s_bytes = sk[off:off + 2 * p.n * p.nbar]
    off += 2 * p.n * p.nbar
    s_t = np.frombuffer(s_bytes, dtype="<i2").astype(np.int8).reshape(p.nbar, p.n)
    b = codec.unpack(pk[p.len_seed_a:], p.n, p.nbar, p)
    return SecretKey(sk[:p.len_s], pk, pk[:p.len_seed_a], b, s_t, sk[off:])


def parse_ct(ct: bytes, p: ParameterSet) -> Ciphertext:
    _check("ct", ct, p.len_ct)
    bp = codec.unpack(ct[:p.len_b_packed], p.nbar, p.n, p)
    c = codec.unpack(ct[p.len_b_packed:p.len_b_packed + p.len_c_packed], p.nbar, p.nbar, p)
    return Ciphertext(bp, c, ct[p.len_ct - p.len_salt:], ct)


def keygen(randomness: bytes, level: SecurityLevel | ParameterSet | int) -> KeyPair:
    """Deterministic KeyGen from ``s || seed_SE || z``."""
    p = _p(level)
    _check("keygen randomness", randomness, p.keygen_randomness_len)
    s = randomness[:p.len_s]
    seed_se = randomness[p.len_s:p.len_s + p.len_seed_se]
    z = randomness[p.len_s + p.len_seed_se:]

    seed_a = shake(p.shake_variant, z, p.len_seed_a)
    samples = sampling.sample_matrix(seed_se, sampling.SEP_KEYGEN, 2 * p.n * p.nbar, p)
    s_t, e = sampling.split_keygen_samples(samples, p)
    b = matmul_mac(sampling.RowStream(p, seed_a), s_t.T, to_zq(e, p.D), p)

    pk = seed_a + codec.pack(b, p)
    pkh = shake(p.shake_variant, pk, p.len_pkh)
    sk = s + pk + s_t.astype("<i2").tobytes() + pkh
    return KeyPair(pk, sk)


def _reencrypt(p: ParameterSet, seed_a: bytes, b: np.ndarray, seed_se: bytes, u: bytes):
    samples = sampling.sample_matrix(seed_se, sampling.SEP_ENCAPS, 2 * p.n * p.nbar + p.nbar ** 2, p)
    sp, ep, epp = sampling.split_encaps_samples(samples, p)
    # C first (frees B early), then B' = S'A + E' via its transpose A^T S'^T + E'^T
    e_u = mat_add_blocks(to_zq(epp, p.D), codec.encode(u, p), p)
    c = matmul_mac(MatrixRows(b.T), sp.T, e_u.T, p).T
    bp = matmul_ma(sampling.RowStream(p, seed_a), sp.T, to_zq(ep, p.D).T, p).T
    return bp, c


def encaps(pk: bytes, randomness: bytes, level) -> tuple[bytes, bytes]:
    """Deterministic Encaps from ``u || salt``; returns (ct, ss)."""
    p = _p(level)
    _check("pk", pk, p.len_pk)
    _check("encaps randomness", randomness, p.encaps_randomness_len)
    u, salt = randomness[:p.len_u], randomness[p.len_u:]
    seed_a = pk[:p.len_seed_a]
    b = codec.unpack(pk[p.len_seed_a:], p.n, p.nbar, p)

    pkh = shake(p.shake_variant, pk, p.len_pkh)
    g = shake(p.shake_variant, pkh + u + salt, p.len_seed_se + p.len_k)
    seed_se, k = g[:p.len_seed_se], g[p.len_seed_se:]
    bp, c = _reencrypt(p, seed_a, b, seed_se, u)

    ct = codec.pack(bp, p) + codec.pack(c, p) + salt
    ss = shake(p.shake_variant, ct + k, p.len_ss)
    return ct, ss


def verify_select(ss0: bytes, ss1: bytes, ss2: bytes) -> bytes:
    """ss0 if ss0 == ss2 else ss1; every byte is examined and the pick is a mask blend."""
    if not len(ss0) == len(ss1) == len(ss2):
        raise ValueError("shared-secret candidates differ in length")
    diff = 0
    for a, b in zip(ss0, ss2):
        diff |= a ^ b
    # 0xFF when equal, 0x00 otherwise, without branching on diff
    mask = ((diff - 1) >> 8) & 0xFF
    return bytes((a & mask) | (b & ~mask & 0xFF) for a, b in zip(ss0, ss1))


def decaps_candidates(sk: bytes, ct: bytes, level):
    """All intermediate values of Decaps; used by the simulator cross-check and tests."""
    p = _p(level)
    key = parse_sk(sk, p)
    cipher = parse_ct(ct, p)
    m = mat_sub_mul(cipher.c, cipher.bp, key.s_t.T, p)
    u = codec.decode(m, p)
    g = shake(p.shake_variant, key.pkh + u + cipher.salt, p.len_seed_se + p.len_k)
    seed_se, k = g[:p.len_seed_se], g[p.len_seed_se:]
    bpp, cp = _reencrypt(p, key.seed_a, key.b, seed_se, u)
    body = ct[:p.len_ct - p.len_salt]
    ss0 = shake(p.shake_variant, body + cipher.salt + k, p.len_ss)
    ss1 = shake(p.shake_variant, body + cipher.salt + key.s, p.len_ss)
    ss2 = shake(p.shake_variant, codec.pack(bpp, p) + codec.pack(cp, p) + cipher.salt + k, p.len_ss)
    return dict(m=m, u=u, k=k, bpp=bpp, cp=cp, ss0=ss0, ss1=ss1, ss2=ss2)


def decaps(sk: bytes, ct: bytes, level) -> bytes:
    p = _p(level)
    _check("sk", sk, p.len_sk)
    _check("ct", ct, p.len_ct)
    v = decaps_candidates(sk, ct, p)
    return verify_select(v["ss0"], v["ss1"], v["ss2"])


def keygen_random(level) -> KeyPair:
    """KeyGen with randomness drawn from the OS entropy source."""
    return keygen(os.urandom(_p(level).keygen_randomness_len), level)


def encaps_random(pk: bytes, level) -> tuple[bytes, bytes]:
    return encaps(pk, os.urandom(_p(level).encaps_randomness_len), level)
