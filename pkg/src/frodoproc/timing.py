"""Cycle costs of the processor's functional units.

Only three numbers are free parameters (:class:`Calibration`); everything else
is a stated latency of the hardware: a 24-cycle Keccak permutation, a 64-bit
hash I/O port, one 2x4 block product per array cycle, 2 cycles per 2x4 block
moved between memory and the array, and fixed ENC/DEC/CMP latencies.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .params import ShakeVariant

PERMUTATION_CYCLES = 24
IO_BITS = 64
HASH_BUFFER_BITS = 1344

BLOCK_TRANSFER_CYCLES = 2     # one 2x4 block of 16-bit words through a memory port
PRELOAD_CYCLES = 4            # one 4x4 block of signed samples into the MA preload registers
MODE_SETUP_CYCLES = 2         # MBR that only configures the array for elementwise addition
ENC_CYCLES = 23
DEC_CYCLES = 23
CMP_CYCLES = 9


@dataclass(frozen=True)
class Calibration:
    """The three fitted timing parameters.

    ``mul_fill``: pipeline fill/drain per MUL phase.
    ``issue_overhead``: cycles a dispatch slot needs after an instruction
    completes before it accepts the next one.
    ``absorb_setup``: fixed cost of starting an HIA (state reset, length
    bookkeeping, first-word latency).
    """

    mul_fill: int = 8
    issue_overhead: int = 4
    absorb_setup: int = 54

    def __post_init__(self):
        for name in ("mul_fill", "issue_overhead", "absorb_setup"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    def with_(self, **changes) -> "Calibration":
        return replace(self, **changes)


DEFAULT_CALIBRATION = Calibration()


def _words(nbytes: int) -> int:
    return -(-nbytes * 8 // IO_BITS)


@dataclass(frozen=True)
class HashUnitModel:
    """Buffered Keccak unit: a 1344-bit I/O buffer in front of the permutation core.

    With ``overlap`` the transfer of block i+1 runs while block i is being
    permuted, so a block costs max(24, io) instead of 24 + io.
    """

    permutation_latency: int = PERMUTATION_CYCLES
    io_bits: int = IO_BITS
    buffer_bits: int = HASH_BUFFER_BITS
    overlap: bool = True
    absorb_setup: int = 0

    def io_latency(self, variant: ShakeVariant) -> int:
        return variant.rate_bytes * 8 // self.io_bits

    def _block_words(self, nbytes: int, variant: ShakeVariant) -> list[int]:
        rate = variant.rate_bytes
        full, rem = divmod(nbytes, rate)
        return [self.io_latency(variant)] * full + [_words(rem)]

    def absorb_cycles(self, nbytes: int, variant: ShakeVariant) -> int:
        """HIA: load every input word and permute every full block.

        The final (padded) block is loaded here but permuted by the first
        squeeze, which is why a zero-length squeeze never pays for it.
        """
        w = self._block_words(nbytes, variant)
        P = self.permutation_latency
        if self.overlap:
            cycles = w[0] + sum(max(P, x) for x in w[1:])
        else:
            cycles = sum(x + P for x in w[:-1]) + w[-1]
        return self.absorb_setup + cycles

    def squeeze_cycles(self, nbytes: int, variant: ShakeVariant) -> int:
        """HOS: the final absorb permutation plus every squeeze block and its transfer."""
        if nbytes <= 0:
            return 0
        rate = variant.rate_bytes
        blocks = -(-nbytes // rate)
        io = self.io_latency(variant)
        u = [io] * (blocks - 1) + [_words(nbytes - (blocks - 1) * rate)]
        P = self.permutation_latency
        if self.overlap:
            return P + sum(max(P, x) for x in u[:-1]) + u[-1]
        return sum(P + x for x in u)

    def hash_cycles(self, bytes_absorbed: int, bytes_squeezed: int, variant: ShakeVariant) -> int:
        return self.absorb_cycles(bytes_absorbed, variant) + self.squeeze_cycles(bytes_squeezed, variant)

    def squeeze_improvement(self, nbytes: int, variant: ShakeVariant) -> float:
        """Throughput gain of overlapped over serial I/O for an ``nbytes`` squeeze."""
        on = replace(self, overlap=True).squeeze_cycles(nbytes, variant)
        off = replace(self, overlap=False).squeeze_cycles(nbytes, variant)
        return off / on


def hash_cycles(bytes_absorbed: int, bytes_squeezed: int, variant: ShakeVariant, overlap: bool = True,
                absorb_setup: int = 0) -> int:
    return HashUnitModel(overlap=overlap, absorb_setup=absorb_setup).hash_cycles(
        bytes_absorbed, bytes_squeezed, variant)


@dataclass(frozen=True)
class MultiplierArrayModel:
    """32 multipliers / 8 adder trees; one 2x4-by-4x4 block product per cycle."""

    multipliers: int = 32
    adder_trees: int = 8
    fill: int = 8

    def mac_phase(self, k: int) -> int:
        # the result block stays put; K/4 blocks stream past it
        return k // 4 + self.fill

    def ma_phase(self, n: int) -> int:
        # n/2 result blocks each read and written back; read and write pipelines both fill
        return n // 2 + 2 * self.fill

    def add_phase(self, blocks: int) -> int:
        # two operand fetches per block, one product-free pass
        return 2 * blocks + self.fill

    def multiplies_per_cycle(self) -> int:
        return 2 * 4 * 4
