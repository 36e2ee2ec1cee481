"""Row-wise generation of the public matrix A and CDF error sampling."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .params import ParameterSet, ShakeVariant
from .xof import shake

# domain separators for the SHAKE(sep || seed_SE) expansion
SEP_KEYGEN = 0x5F
SEP_ENCAPS = 0x96


def gen_a_row(seed_a: bytes, row: int, p: ParameterSet) -> np.ndarray:
    """Row ``row`` of A: SHAKE128(LE16(row) || seed_A) read as LE 16-bit words mod q."""
    if not 0 <= row < p.n:
        raise IndexError(f"row {row} outside [0, {p.n})")
    stream = shake(ShakeVariant.SHAKE128, row.to_bytes(2, "little") + seed_a, 2 * p.n)
    return np.frombuffer(stream, dtype="<u2").astype(np.uint16) & np.uint16(p.q - 1)


def gen_a(seed_a: bytes, p: ParameterSet) -> np.ndarray:
    return np.stack([gen_a_row(seed_a, i, p) for i in range(p.n)])


@dataclass
class RowStream:
    """Produces rows of A strictly in ascending order."""

    p: ParameterSet
    seed_a: bytes
    next_row: int = 0

    def __iter__(self) -> Iterator[np.ndarray]:
        return self

    def __next__(self) -> np.ndarray:
        if self.next_row >= self.p.n:
            raise StopIteration
        row = gen_a_row(self.seed_a, self.next_row, self.p)
        self.next_row += 1
        return row

    def take(self, count: int) -> np.ndarray:
        """Next ``count`` rows stacked; raises ``StopIteration`` past the last row."""
        if self.next_row + count > self.p.n:
            raise StopIteration(f"A has only {self.p.n} rows")
        return np.stack([next(self) for _ in range(count)])


class ComparisonCounter:
    """Counts table comparisons done by :func:`sample_cdf` (structural constant-time check)."""

    def __init__(self):
        self.count = 0


def sample_cdf(r: int, p: ParameterSet, counter: ComparisonCounter | None = None) -> int:
    """Map one 16-bit word to a signed error sample in [-d, d].

    Every call evaluates exactly ``len(cdf_table) - 1`` comparisons; there is
    no data-dependent exit.
    """
    t = (r & 0xFFFF) >> 1
    sign = r & 1
    e = 0
    for threshold in p.cdf_table[:-1]:
        e += ((threshold - t) & 0xFFFF) >> 15
        if counter is not None:
            counter.count += 1
    # (-sign ^ e) + sign in 16-bit two's complement, read back as a signed int
    v = (((-sign) & 0xFFFF) ^ e) + sign
    v &= 0xFFFF
    return v - 0x10000 if v & 0x8000 else v


def sample_words(words: np.ndarray, p: ParameterSet) -> np.ndarray:
    """Vectorised :func:`sample_cdf` over an array of 16-bit words (int8 result)."""
    w = np.asarray(words, dtype=np.uint16)
    t = (w >> 1).astype(np.int32)
    sign = (w & 1).astype(np.int32)
    e = np.zeros(w.shape, dtype=np.int32)
    for threshold in p.cdf_table[:-1]:
        e += ((threshold - t) & 0xFFFF) >> 15
    return np.where(sign == 1, -e, e).astype(np.int8)


def sample_matrix(seed_se: bytes, sep: int, count: int, p: ParameterSet) -> np.ndarray:
    """``count`` signed samples from SHAKE(sep || seed_SE), in generation order."""
    allowed = {2 * p.n * p.nbar, 2 * p.n * p.nbar + p.nbar * p.nbar}
    if count not in allowed:
        raise ValueError(f"sample count {count} does not match any protocol phase ({sorted(allowed)})")
    if len(seed_se) != p.len_seed_se:
        raise ValueError("seed_SE has the wrong length")
    stream = shake(p.shake_variant, bytes([sep]) + seed_se, 2 * count)
    return sample_words(np.frombuffer(stream, dtype="<u2"), p)


def split_keygen_samples(samples: np.ndarray, p: ParameterSet) -> tuple[np.ndarray, np.ndarray]:
    """Split the KeyGen stream into (S^T as nbar x n, E as n x nbar)."""
    nn = p.n * p.nbar
    return samples[:nn].reshape(p.nbar, p.n), samples[nn:2 * nn].reshape(p.n, p.nbar)


def split_encaps_samples(samples: np.ndarray, p: ParameterSet):
    """Split the Encaps/Decaps stream into (S' nbar x n, E' nbar x n, E'' nbar x nbar)."""
    nn = p.n * p.nbar
    return (samples[:nn].reshape(p.nbar, p.n),
            samples[nn:2 * nn].reshape(p.nbar, p.n),
            samples[2 * nn:].reshape(p.nbar, p.nbar))
