"""Block-structured matrix arithmetic over Z_q, modelled on a 32-way multiplier array.

The array computes one ``2x4 += (2x4)(4x4)`` block product per cycle.  Two
schedules are offered:

* MAC mode (:func:`matmul_mac`): the result block is fixed for a whole phase
  and the k index sweeps the shared dimension; one write-back per phase.
* MA mode (:func:`matmul_ma`): the right-hand 4x4 block is fixed for a phase
  and the result-row index sweeps; partial sums are written back every step.

Every product goes through the sign/magnitude multiplier
(:func:`sign_extract_products`) and every sum is truncated to 16 bits, then
to D bits; truncation *is* the reduction mod q.

Left operands are supplied by a row provider: any object with
``take(count) -> ndarray`` returning the next ``count`` rows.  This lets the
same code consume a fully materialised matrix (:class:`MatrixRows`) or the
streamed A of :class:`frodoproc.sampling.RowStream`.
"""

from __future__ import annotations

from typing import Callable, Protocol

import numpy as np

from .params import ParameterSet

BLOCK_ROWS = 2      # rows of a left/result block
BLOCK_K = 4         # shared-dimension width of a block
BLOCK_COLS = 4      # columns of a right/result block
MAX_MAGNITUDE = 15  # 4-bit magnitude of the signed operand


class RowProvider(Protocol):
    def take(self, count: int) -> np.ndarray: ...


class ProviderExhausted(RuntimeError):
    pass


class MatrixRows:
    """Row provider over an in-memory matrix."""

    def __init__(self, matrix: np.ndarray):
        self.matrix = np.asarray(matrix)
        self.next_row = 0

    def take(self, count: int) -> np.ndarray:
        if self.next_row + count > self.matrix.shape[0]:
            raise ProviderExhausted(
                f"requested rows {self.next_row}..{self.next_row + count - 1} of {self.matrix.shape[0]}")
        rows = self.matrix[self.next_row:self.next_row + count]
        self.next_row += count
        return rows


def _take(source: RowProvider, count: int) -> np.ndarray:
    try:
        return np.asarray(source.take(count))
    except StopIteration as exc:
        raise ProviderExhausted(str(exc)) from None


def mul_sign_extract(x: int, s: int, D: int, subtract: bool = False) -> int:
    """x*s mod 2^D through a 16x4 unsigned product and a conditional negation."""
    if abs(s) > MAX_MAGNITUDE:
        raise ValueError("signed operand must fit in 1 sign bit + 4 magnitude bits")
    neg = (s < 0) != subtract
    prod = ((x & 0xFFFF) * abs(s)) & 0xFFFF
    if neg:
        prod = (-prod) & 0xFFFF
    return prod & ((1 << D) - 1)


def sign_extract_products(x: np.ndarray, s: np.ndarray, subtract: bool = False) -> np.ndarray:
    """Elementwise (broadcasting) sign/magnitude products, 16-bit wrapped, as uint32."""
    x = np.asarray(x).astype(np.uint32) & 0xFFFF
    s = np.asarray(s).astype(np.int32)
    mag = np.abs(s).astype(np.uint32)
    neg = (s < 0) != subtract
    prod = (x * mag) & 0xFFFF
    return np.where(neg, (0x10000 - prod) & 0xFFFF, prod).astype(np.uint32)


def _reduce(acc: np.ndarray, D: int) -> np.ndarray:
    return (acc & 0xFFFF & ((1 << D) - 1)).astype(np.uint16)


def mac_block_product(a_blocks, s_blocks, e_block, D: int, subtract: bool = False) -> np.ndarray:
    """E + sum_k A_k S_k for a stream of 2x4 left blocks and 4x4 right blocks.

    This is the literal one-block-per-cycle loop of the array; each iteration
    uses 32 multipliers and 8 four-input adder trees.
    """
    a_blocks = list(a_blocks)
    s_blocks = list(s_blocks)
    if len(a_blocks) != len(s_blocks):
        raise ValueError(f"stream length mismatch: {len(a_blocks)} left vs {len(s_blocks)} right blocks")
    acc = np.asarray(e_block).astype(np.uint32).reshape(BLOCK_ROWS, BLOCK_COLS) & 0xFFFF
    for a, s in zip(a_blocks, s_blocks):
        a = np.asarray(a).reshape(BLOCK_ROWS, BLOCK_K)
        s = np.asarray(s).reshape(BLOCK_K, BLOCK_COLS)
        prods = sign_extract_products(a[:, :, None], s[None, :, :], subtract)   # 2x4x4 = 32 multipliers
        acc = (acc + prods.sum(axis=1)) & 0xFFFF                                 # 8 adder trees
    return _reduce(acc, D)


def mac_phase(a_rows: np.ndarray, s_cols: np.ndarray, e_block: np.ndarray, D: int,
              subtract: bool = False) -> np.ndarray:
    """One MAC phase (all k at once): same result as :func:`mac_block_product`."""
    prods = sign_extract_products(a_rows[:, :, None], s_cols[None, :, :], subtract)
    acc = np.asarray(e_block).astype(np.uint32) + prods.sum(axis=1, dtype=np.uint64).astype(np.uint32)
    return _reduce(acc, D)


def ma_phase(left: np.ndarray, s_block: np.ndarray, partial: np.ndarray) -> np.ndarray:
    """One MA phase: every 2x4 result block of ``partial`` += its 2x4 slice of ``left`` times ``s_block``.

    Returns the new 16-bit partial sums (not yet reduced to D bits).
    """
    prods = sign_extract_products(np.asarray(left)[:, :, None], np.asarray(s_block)[None, :, :])
    return ((np.asarray(partial).astype(np.uint32) + prods.sum(axis=1, dtype=np.uint32)) & 0xFFFF).astype(np.uint32)


def matmul_mac(a_source: RowProvider, s: np.ndarray, e: np.ndarray, p: ParameterSet | int,
               subtract: bool = False,
               on_block: Callable[[int, int, np.ndarray], None] | None = None) -> np.ndarray:
    """E +/- L*S mod q in MAC mode, where L is streamed two rows at a time.

    ``s`` is the signed right operand (K x cols); ``e`` (rows x cols) fixes the
    result shape.  Each (row pair, 4-column group) is one phase of K/4 cycles
    that ends with a single write-back reported to ``on_block(i, j, block)``.
    """
    D = p.D if isinstance(p, ParameterSet) else int(p)
    s = np.asarray(s)
    e = np.asarray(e)
    rows, cols = e.shape
    K = s.shape[0]
    if rows % BLOCK_ROWS or cols % BLOCK_COLS or K % BLOCK_K or s.shape[1] != cols:
        raise ValueError(f"shapes {e.shape} / {s.shape} do not tile into 2x4 / 4x4 blocks")
    out = np.empty((rows, cols), dtype=np.uint16)
    for i in range(rows // BLOCK_ROWS):
        a_rows = _take(a_source, BLOCK_ROWS)
        if a_rows.shape != (BLOCK_ROWS, K):
            raise ValueError(f"provider returned rows of shape {a_rows.shape}, expected (2, {K})")
        for j in range(cols // BLOCK_COLS):
            r0, c0 = BLOCK_ROWS * i, BLOCK_COLS * j
            block = mac_phase(a_rows, s[:, c0:c0 + BLOCK_COLS], e[r0:r0 + BLOCK_ROWS, c0:c0 + BLOCK_COLS],
                              D, subtract)
            out[r0:r0 + BLOCK_ROWS, c0:c0 + BLOCK_COLS] = block
            if on_block is not None:
                on_block(i, j, block)
    return out


def matmul_ma(a_source: RowProvider, s_t: np.ndarray, e_t: np.ndarray, p: ParameterSet | int,
              on_phase: Callable[[int, int, np.ndarray], None] | None = None,
              write_counts: np.ndarray | None = None) -> np.ndarray:
    """(S'A + E')^T in MA mode with A streamed four rows at a time.

    Computes R = A^T S'^T + E'^T (n x nbar).  Rows 4k..4k+3 of A form the
    column block k of A^T; for each k and each 4-column group j the 4x4 block
    S'^T[k, j] stays in the array while every 2x4 result block receives its
    k-th product term and is written straight back.  ``on_phase(k, j, R)``
    observes the partial sums after each phase.
    """
    D = p.D if isinstance(p, ParameterSet) else int(p)
    s_t = np.asarray(s_t)
    n, cols = np.asarray(e_t).shape
    if n % BLOCK_K or cols % BLOCK_COLS or s_t.shape != (n, cols):
        raise ValueError(f"shapes {np.asarray(e_t).shape} / {s_t.shape} do not tile")
    acc = np.asarray(e_t).astype(np.uint32) & 0xFFFF
    for k in range(n // BLOCK_K):
        a_rows = _take(a_source, BLOCK_K)          # 4 x n: A^T column block k
        if a_rows.shape != (BLOCK_K, n):
            raise ValueError(f"provider returned rows of shape {a_rows.shape}, expected (4, {n})")
        left = a_rows.T                            # n x 4, i.e. n/2 stacked 2x4 blocks
        for j in range(cols // BLOCK_COLS):
            c0 = BLOCK_COLS * j
            s_block = s_t[BLOCK_K * k:BLOCK_K * (k + 1), c0:c0 + BLOCK_COLS]
            acc[:, c0:c0 + BLOCK_COLS] = ma_phase(left, s_block, acc[:, c0:c0 + BLOCK_COLS])
            if write_counts is not None:
                write_counts[:, c0:c0 + BLOCK_COLS] += 1
            if on_phase is not None:
                on_phase(k, j, _reduce(acc, D))
    return _reduce(acc, D)


def mat_sub_mul(c: np.ndarray, bp: np.ndarray, s: np.ndarray, p: ParameterSet | int) -> np.ndarray:
    """M = C - B'S mod q, run as MAC mode with the subtract-enable path."""
    c = np.asarray(c)
    bp = np.asarray(bp)
    s = np.asarray(s)
    if bp.shape[0] != c.shape[0] or s.shape[0] != bp.shape[1] or s.shape[1] != c.shape[1]:
        raise ValueError(f"shape mismatch: C{c.shape} B'{bp.shape} S{s.shape}")
    return matmul_mac(MatrixRows(bp), s, c, p, subtract=True)


def mat_add_blocks(x: np.ndarray, y: np.ndarray, p: ParameterSet | int) -> np.ndarray:
    """Elementwise X + Y mod q, visiting one 2x4 block pair per step."""
    D = p.D if isinstance(p, ParameterSet) else int(p)
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape != y.shape:
        raise ValueError(f"shape mismatch: {x.shape} vs {y.shape}")
    rows, cols = x.shape
    out = np.empty(x.shape, dtype=np.uint16)
    for r0 in range(0, rows, BLOCK_ROWS):
        for c0 in range(0, cols, BLOCK_COLS):
            blk = (x[r0:r0 + BLOCK_ROWS, c0:c0 + BLOCK_COLS].astype(np.uint32)
                   + y[r0:r0 + BLOCK_ROWS, c0:c0 + BLOCK_COLS].astype(np.uint32))
            out[r0:r0 + BLOCK_ROWS, c0:c0 + BLOCK_COLS] = _reduce(blk, D)
    return out


def naive_matmul_add(left, right, addend, D: int, subtract: bool = False) -> list[list[int]]:
    """Plain triple loop over Python ints: addend +/- left*right mod 2^D."""
    q = 1 << D
    left = [[int(v) for v in row] for row in np.asarray(left)]
    right = [[int(v) for v in row] for row in np.asarray(right)]
    out = [[int(v) for v in row] for row in np.asarray(addend)]
    sign = -1 if subtract else 1
    for i in range(len(left)):
        for j in range(len(right[0])):
            acc = out[i][j]
            for k in range(len(right)):
                acc += sign * left[i][k] * right[k][j]
            out[i][j] = acc % q
    return out


def to_zq(m: np.ndarray, D: int) -> np.ndarray:
    """Sign-extend / wrap any integer matrix into D-bit residues."""
    return (np.asarray(m).astype(np.int64) & ((1 << D) - 1)).astype(np.uint16)
