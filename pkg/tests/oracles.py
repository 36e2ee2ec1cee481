"""Independent reference computations used by the tests.

Matrix arithmetic here is plain int64 numpy, and Decaps verification is the
textbook direct comparison of (B' || C) with the re-encrypted (B'' || C').
"""

import hashlib

import numpy as np

from frodoproc import codec
from frodoproc.params import ParameterSet, ShakeVariant
from frodoproc.sampling import SEP_ENCAPS


def xof(p: ParameterSet, data: bytes, n: int) -> bytes:
    h = hashlib.shake_128 if p.shake_variant is ShakeVariant.SHAKE128 else hashlib.shake_256
    return h(data).digest(n)


def gen_a(p: ParameterSet, seed_a: bytes) -> np.ndarray:
    rows = [np.frombuffer(hashlib.shake_128(i.to_bytes(2, "little") + seed_a).digest(2 * p.n), "<u2")
            for i in range(p.n)]
    return np.stack(rows).astype(np.int64) % p.q


def sample(p: ParameterSet, words: np.ndarray) -> np.ndarray:
    t = words.astype(np.int64) >> 1
    mag = (t[..., None] > np.array(p.cdf_table[:-1])).sum(axis=-1)
    return np.where(words & 1, -mag, mag)


def encode(p: ParameterSet, u: bytes) -> np.ndarray:
    bits = int.from_bytes(u, "little")
    vals = [(bits >> (p.B * i)) & ((1 << p.B) - 1) for i in range(64)]
    return np.array(vals, dtype=np.int64).reshape(8, 8) << (p.D - p.B)


def decode(p: ParameterSet, m: np.ndarray) -> bytes:
    chunks = ((m.astype(np.int64) + (1 << (p.D - p.B - 1))) >> (p.D - p.B)) % (1 << p.B)
    bits = sum(int(v) << (p.B * i) for i, v in enumerate(chunks.reshape(-1)))
    return bits.to_bytes(p.len_u, "little")


def reencrypt(p: ParameterSet, seed_a: bytes, b: np.ndarray, seed_se: bytes, u: bytes):
    nn = p.n * 8
    words = np.frombuffer(xof(p, bytes([SEP_ENCAPS]) + seed_se, 2 * (2 * nn + 64)), "<u2")
    r = sample(p, words)
    sp, ep, epp = r[:nn].reshape(8, p.n), r[nn:2 * nn].reshape(8, p.n), r[2 * nn:].reshape(8, 8)
    a = gen_a(p, seed_a)
    bp = (sp @ a + ep) % p.q
    c = (sp @ b.astype(np.int64) + epp + encode(p, u)) % p.q
    return bp, c


def decaps(p: ParameterSet, sk: bytes, ct: bytes) -> bytes:
    s = sk[:p.len_s]
    pk = sk[p.len_s:p.len_s + p.len_pk]
    off = p.len_s + p.len_pk
    s_t = np.frombuffer(sk[off:off + 2 * p.n * 8], "<i2").astype(np.int64).reshape(8, p.n)
    pkh = sk[off + 2 * p.n * 8:]
    seed_a = pk[:p.len_seed_a]
    b = codec.unpack(pk[p.len_seed_a:], p.n, 8, p)
    bp = codec.unpack(ct[:p.len_b_packed], 8, p.n, p).astype(np.int64)
    c = codec.unpack(ct[p.len_b_packed:p.len_b_packed + p.len_c_packed], 8, 8, p).astype(np.int64)
    salt = ct[p.len_ct - p.len_salt:]
    u = decode(p, (c - bp @ s_t.T) % p.q)
    g = xof(p, pkh + u + salt, p.len_seed_se + p.len_k)
    seed_se, k = g[:p.len_seed_se], g[p.len_seed_se:]
    bpp, cp = reencrypt(p, seed_a, b, seed_se, u)
    same = np.array_equal(bp, bpp) and np.array_equal(c, cp)
    body = ct[:p.len_ct - p.len_salt]
    return xof(p, body + salt + (k if same else s), p.len_ss)
