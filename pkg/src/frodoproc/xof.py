"""KECCAK-f[1600] and the SHAKE128/SHAKE256 sponges.

:class:`Sponge` is a byte-oriented, incremental, pure-Python sponge.  The
module-level :func:`shake` is the bulk path used by the KEM; it runs on
:mod:`hashlib` and is checked against :class:`Sponge` in the test suite.
"""

from __future__ import annotations

import hashlib

from .params import ShakeVariant

_MASK = (1 << 64) - 1

ROUND_CONSTANTS = (
    0x0000000000000001, 0x0000000000008082, 0x800000000000808A, 0x8000000080008000,
    0x000000000000808B, 0x0000000080000001, 0x8000000080008081, 0x8000000000008009,
    0x000000000000008A, 0x0000000000000088, 0x0000000080008009, 0x000000008000000A,
    0x000000008000808B, 0x800000000000008B, 0x8000000000008089, 0x8000000000008003,
    0x8000000000008002, 0x8000000000000080, 0x000000000000800A, 0x800000008000000A,
    0x8000000080008081, 0x8000000000008080, 0x0000000080000001, 0x8000000080008008,
)

# rotation offsets indexed by lane x + 5*y
_RHO = (
    0, 1, 62, 28, 27,
    36, 44, 6, 55, 20,
    3, 10, 43, 25, 39,
    41, 45, 15, 21, 8,
    18, 2, 61, 56, 14,
)

# pi: lane (x, y) moves to (y, 2x + 3y)
_PI_DEST = tuple(y + 5 * ((2 * x + 3 * y) % 5) for y in range(5) for x in range(5))
_PI_SRC = tuple(x + 5 * y for y in range(5) for x in range(5))

NUM_ROUNDS = 24


def _rotl(v: int, r: int) -> int:
    return ((v << r) | (v >> (64 - r))) & _MASK if r else v


def keccak_f(state: list[int] | tuple[int, ...]) -> list[int]:
    """Apply the 24-round KECCAK-p[1600, 24] permutation to 25 64-bit lanes."""
    if len(state) != 25:
        raise ValueError("Keccak state must have 25 lanes")
    a = list(state)
    for rc in ROUND_CONSTANTS:
        # theta
        c = [a[x] ^ a[x + 5] ^ a[x + 10] ^ a[x + 15] ^ a[x + 20] for x in range(5)]
        d = [c[(x - 1) % 5] ^ _rotl(c[(x + 1) % 5], 1) for x in range(5)]
        a = [a[i] ^ d[i % 5] for i in range(25)]
        # rho + pi
        b = [0] * 25
        for src, dst in zip(_PI_SRC, _PI_DEST):
            b[dst] = _rotl(a[src], _RHO[src])
        # chi
        a = [b[i] ^ ((~b[(i % 5 + 1) % 5 + 5 * (i // 5)]) & b[(i % 5 + 2) % 5 + 5 * (i // 5)])
             for i in range(25)]
        # iota
        a[0] ^= rc
    return a


class Sponge:
    """Incremental SHAKE sponge over whole bytes.

    Absorb any number of times, then squeeze any number of times; absorbing
    after the first squeeze raises ``RuntimeError``.
    """

    PAD = 0x1F

    def __init__(self, variant: ShakeVariant, data: bytes = b""):
        self.variant = variant
        self.rate_bytes = variant.rate_bytes
        self.state = [0] * 25
        self._buf = bytearray()   # pending absorb bytes, always < rate
        self._out = b""           # squeezed bytes not yet handed out
        self.squeezing = False
        self.permutations = 0
        if data:
            self.absorb(data)

    @property
    def absorbed_offset(self) -> int:
        return len(self._buf)

    def _xor_block(self, block: bytes) -> None:
        for i in range(self.rate_bytes // 8):
            self.state[i] ^= int.from_bytes(block[8 * i:8 * i + 8], "little")

    def _permute(self) -> None:
        self.state = keccak_f(self.state)
        self.permutations += 1

    def _rate_bytes_out(self) -> bytes:
        return b"".join(lane.to_bytes(8, "little") for lane in self.state[: self.rate_bytes // 8])

    def absorb(self, data: bytes) -> "Sponge":
        if self.squeezing:
            raise RuntimeError("cannot absorb after squeezing has started")
        self._buf += data
        r = self.rate_bytes
        while len(self._buf) >= r:
            self._xor_block(bytes(self._buf[:r]))
            del self._buf[:r]
            self._permute()
        return self

    def _finalize(self) -> None:
        block = bytearray(self._buf) + bytes(self.rate_bytes - len(self._buf))
        block[len(self._buf)] ^= self.PAD
        block[-1] ^= 0x80
        self._xor_block(bytes(block))
        self._buf.clear()
        self._permute()
        self._out = self._rate_bytes_out()
        self.squeezing = True

    def squeeze(self, out_len: int) -> bytes:
        if out_len < 0:
            raise ValueError("out_len must be non-negative")
        if not self.squeezing:
            self._finalize()
        chunks = []
        need = out_len
        while need:
            if not self._out:
                self._permute()
                self._out = self._rate_bytes_out()
            take = self._out[:need]
            self._out = self._out[len(take):]
            chunks.append(take)
            need -= len(take)
        return b"".join(chunks)


def shake(variant: ShakeVariant, data: bytes, out_len: int) -> bytes:
    """One-shot SHAKE digest of ``out_len`` bytes."""
    if out_len < 0:
        raise ValueError("out_len must be non-negative")
    if out_len == 0:
        return b""
    h = hashlib.shake_128(data) if variant is ShakeVariant.SHAKE128 else hashlib.shake_256(data)
    return h.digest(out_len)


def shake_reference(variant: ShakeVariant, data: bytes, out_len: int) -> bytes:
    return Sponge(variant, data).squeeze(out_len)


def permutation_count(variant: ShakeVariant, in_len: int, out_len: int) -> tuple[int, int]:
    """Permutations spent absorbing (incl. the padded final block) and squeezing."""
    r = variant.rate_bytes
    absorb = in_len // r + 1
    squeeze = max(0, -(-out_len // r) - 1)
    return absorb, squeeze
