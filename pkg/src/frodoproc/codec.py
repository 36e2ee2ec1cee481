"""Message Encode/Decode and D-bit matrix packing."""

from __future__ import annotations

import numpy as np

from .params import ParameterSet


def _chunks(message: bytes, p: ParameterSet) -> np.ndarray:
    # B-bit chunks, LSB-first inside each byte, element k = chunk k
    bits = np.unpackbits(np.frombuffer(message, dtype=np.uint8), bitorder="little")
    bits = bits.reshape(-1, p.B).astype(np.uint16)
    weights = (1 << np.arange(p.B)).astype(np.uint16)
    return (bits * weights).sum(axis=1).astype(np.uint16)


def encode(u: bytes, p: ParameterSet) -> np.ndarray:
    """Scale each B-bit chunk of ``u`` by q/2^B into an nbar x nbar matrix."""
    if len(u) != p.len_u:
        raise ValueError(f"message must be {p.len_u} bytes, got {len(u)}")
    return (_chunks(u, p) << (p.D - p.B)).astype(np.uint16).reshape(p.nbar, p.nbar)


def decode(m: np.ndarray, p: ParameterSet) -> bytes:
    """Round every element to its nearest multiple of q/2^B and repack the chunks."""
    m = np.asarray(m).astype(np.uint32).reshape(-1) & (p.q - 1)
    shift = p.D - p.B
    chunks = ((m + (1 << (shift - 1))) >> shift) & ((1 << p.B) - 1)
    bits = ((chunks[:, None] >> np.arange(p.B)) & 1).astype(np.uint8).reshape(-1)
    return np.packbits(bits, bitorder="little").tobytes()


def pack(m: np.ndarray, p: ParameterSet) -> bytes:
    """Concatenate the low D bits of every element, MSB first."""
    m = np.asarray(m)
    if m.size and int(m.max()) >= p.q:
        raise ValueError("element out of range for packing")
    words = m.reshape(-1).astype(">u2")
    bits = np.unpackbits(words.view(np.uint8)).reshape(-1, 16)[:, 16 - p.D:]
    return np.packbits(bits.reshape(-1)).tobytes()


def unpack(data: bytes, rows: int, cols: int, p: ParameterSet) -> np.ndarray:
    if 8 * len(data) != rows * cols * p.D:
        raise ValueError(f"expected {rows * cols * p.D // 8} bytes, got {len(data)}")
    bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8)).reshape(-1, p.D)
    padded = np.zeros((bits.shape[0], 16), dtype=np.uint8)
    padded[:, 16 - p.D:] = bits
    return np.packbits(padded.reshape(-1)).view(">u2").astype(np.uint16).reshape(rows, cols)
