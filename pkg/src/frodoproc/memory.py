"""Two memory banks, each split along the word width into four 32-bit RAM blocks.

Bank 0 holds space E (16-bit n x 8 matrices) followed by space S (8-bit
8 x n samples); bank 1 holds space E' followed by small temporaries.  The four
ping-pong partitions for rows of A are overlaid on whichever 16-bit space is
dead while A is being streamed: space E' during KeyGen, space E during
Encaps/Decaps once C has been computed.

Element placement is chosen so that the blocks the multiplier array needs can
be fetched with one word from each RAM:

* 16-bit n x 8 spaces: both a 2x4 block and a 4x2 block (for the transposed
  read of B) touch four distinct RAMs at one address per RAM.
* 8-bit 8 x n space: a 4x4 block of S is one word from each RAM.
* A partitions: a 2x4 block of one partition, and a 4x2 block spanning an
  even/odd partition pair, both hit four distinct RAMs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .params import ParameterSet

RAMS_PER_BANK = 4
BANK_DEPTH = 2048
WIDE_DEPTH = 1344      # space E / space E' for the largest level
NARROW_DEPTH = 672     # space S for the largest level
AUX_BASE = WIDE_DEPTH  # temporaries in bank 1 sit after space E'
PARTITIONS = 4
ROWS_PER_PARTITION = 2


class ResidencyError(RuntimeError):
    pass


@dataclass(frozen=True)
class Access:
    """A word-address range ``[lo, hi)`` of one bank, read or written."""

    bank: int
    lo: int
    hi: int
    write: bool = False

    def overlaps(self, other: "Access") -> bool:
        return self.bank == other.bank and self.lo < other.hi and other.lo < self.hi


@dataclass(frozen=True)
class Layout:
    """Placement of a matrix in a bank: per element, (RAM, address, bit shift)."""

    name: str
    bank: int
    base: int
    depth: int
    shape: tuple[int, int]
    bits: int
    ram: np.ndarray = field(repr=False, compare=False)
    addr: np.ndarray = field(repr=False, compare=False)
    shift: np.ndarray = field(repr=False, compare=False)

    def access(self, write: bool = False) -> Access:
        return Access(self.bank, self.base, self.base + self.depth, write)

    def block_cells(self, r0: int, c0: int, h: int, w: int) -> tuple[np.ndarray, np.ndarray]:
        return (self.ram[r0:r0 + h, c0:c0 + w].reshape(-1), self.addr[r0:r0 + h, c0:c0 + w].reshape(-1))

    def block_access(self, r0: int, c0: int, h: int, w: int, write: bool = False) -> Access:
        _, addr = self.block_cells(r0, c0, h, w)
        return Access(self.bank, int(addr.min()), int(addr.max()) + 1, write)

    def words_per_ram(self, r0: int, c0: int, h: int, w: int) -> dict[int, set[int]]:
        """For a block fetch: the set of word addresses it needs from each RAM."""
        ram, addr = self.block_cells(r0, c0, h, w)
        out: dict[int, set[int]] = {}
        for r, a in zip(ram.tolist(), addr.tolist()):
            out.setdefault(r, set()).add(a)
        return out

    def single_cycle(self, r0: int, c0: int, h: int, w: int) -> bool:
        """True if the block is fetched with at most one word per RAM."""
        return all(len(a) == 1 for a in self.words_per_ram(r0, c0, h, w).values())


def wide_layout(name: str, bank: int, base: int, rows: int, cols: int = 8) -> Layout:
    """16-bit rows x 8 matrix: two elements per word, interleaved over the four RAMs."""
    if cols != 8:
        raise ValueError("wide spaces hold exactly 8 columns")
    r = np.arange(rows)[:, None]
    c = np.arange(cols)[None, :]
    wc = c // 2
    ram = ((wc % 2) ^ ((r // 2) % 2)) + 2 * (r % 2)
    addr = base + 2 * (r // 2) + wc // 2
    shift = 16 * (c % 2) + 0 * r
    return Layout(name, bank, base, rows, (rows, cols), 16, ram, addr, shift)


def narrow_layout(name: str, bank: int, base: int, n: int, rows: int = 8) -> Layout:
    """8-bit rows x n matrix (S^T or S'): four consecutive elements per word, row c in RAM c % 4."""
    c = np.arange(rows)[:, None]
    e = np.arange(n)[None, :]
    ram = c % 4 + 0 * e
    addr = base + (c // 4) * (n // 4) + e // 4
    shift = 8 * (e % 4) + 0 * c
    return Layout(name, bank, base, (rows // 4) * (n // 4), (rows, n), 8, ram, addr, shift)


def partition_layout(bank: int, base: int, part: int, n: int) -> Layout:
    """Two rows of A; the RAM rotation depends on row and partition parity."""
    t = np.arange(ROWS_PER_PARTITION)[:, None]
    e = np.arange(n)[None, :]
    w = e // 2
    ram = (w + 2 * t + part) % 4
    pbase = base + part * (n // 4)
    addr = pbase + t * (n // 8) + w // 4
    shift = 16 * (e % 2) + 0 * t
    return Layout(f"A{part}", bank, pbase, n // 4, (ROWS_PER_PARTITION, n), 16, ram, addr, shift)


AUX_SIZES_WORDS = {
    # byte strings and 8x8 matrices kept in bank-1 temporaries; sizes in words per RAM
    "z": 1, "s": 2, "seed_se": 4, "seed_a": 1, "pkh": 2, "u": 2, "salt": 4, "k": 2,
    "ss0": 2, "ss1": 2, "ss2": 2, "ss": 2,
    "C": 8, "Ct": 8, "M": 8, "U": 8, "Epp": 8, "Eu": 8,
}


def _aux_map() -> dict[str, Access]:
    out = {}
    addr = AUX_BASE
    for name, depth in AUX_SIZES_WORDS.items():
        out[name] = Access(1, addr, addr + depth)
        addr += depth
    if addr > BANK_DEPTH:
        raise AssertionError("temporaries overflow bank 1")
    return out


AUX_REGIONS = _aux_map()


def aux_access(name: str, write: bool = False) -> Access:
    try:
        a = AUX_REGIONS[name]
    except KeyError:
        raise KeyError(f"unknown auxiliary region {name!r}") from None
    return Access(a.bank, a.lo, a.hi, write)


class MemoryModel:
    """Word-level contents of both banks plus the temporaries.

    Partition layouts exist for both banks; which one a program uses is
    encoded in its instructions.  ``partition_rows`` tracks which rows of A
    each partition currently holds, so reading a row that was never
    generated (or was already overwritten) is detected.
    """

    def __init__(self, p: ParameterSet):
        self.p = p
        n = p.n
        self.words = np.zeros((2, RAMS_PER_BANK, BANK_DEPTH), dtype=np.uint32)
        self.space_e = wide_layout("spaceE", 0, 0, n)
        self.space_s = narrow_layout("spaceS", 0, WIDE_DEPTH, n)
        self.space_ep = wide_layout("spaceEp", 1, 0, n)
        self.partitions = {bank: [partition_layout(bank, 0, i, n) for i in range(PARTITIONS)] for bank in (0, 1)}
        self.partition_rows: dict[tuple[int, int], tuple[int, ...]] = {}
        self.aux: dict[str, object] = {}
        if self.space_e.depth + self.space_s.depth > BANK_DEPTH:
            raise AssertionError("space E + space S exceed one bank")

    @property
    def layouts(self) -> dict[str, Layout]:
        return {"spaceE": self.space_e, "spaceS": self.space_s, "spaceEp": self.space_ep}

    # -- word-level matrix access --------------------------------------------------
    def read(self, lay: Layout, r0: int = 0, c0: int = 0, h: int | None = None, w: int | None = None,
             signed: bool = False) -> np.ndarray:
        h = lay.shape[0] - r0 if h is None else h
        w = lay.shape[1] - c0 if w is None else w
        sl = (slice(r0, r0 + h), slice(c0, c0 + w))
        raw = self.words[lay.bank][lay.ram[sl], lay.addr[sl]] >> lay.shift[sl].astype(np.uint32)
        mask = (1 << lay.bits) - 1
        vals = (raw & mask).astype(np.uint16 if lay.bits == 16 else np.uint8)
        if signed:
            return vals.astype(np.int8) if lay.bits == 8 else vals.astype(np.int16)
        return vals

    def write(self, lay: Layout, values: np.ndarray, r0: int = 0, c0: int = 0) -> None:
        values = np.asarray(values)
        h, w = values.shape
        sl = (slice(r0, r0 + h), slice(c0, c0 + w))
        ram, addr, shift = lay.ram[sl], lay.addr[sl], lay.shift[sl].astype(np.uint32)
        mask = np.uint32((1 << lay.bits) - 1)
        vals = (values.astype(np.int64) & int(mask)).astype(np.uint32)
        bank = self.words[lay.bank]
        # one pass per sub-word lane so no word index repeats within a fancy assignment
        for lane in np.unique(shift):
            sel = shift == lane
            r, a = ram[sel], addr[sel]
            bank[r, a] = (bank[r, a] & ~(mask << lane)) | (vals[sel] << lane)
        self._invalidate_overlaid(lay)

    def _invalidate_overlaid(self, lay: Layout) -> None:
        # a write to a 16-bit space destroys any rows of A overlaid on it
        if lay.name.startswith("A"):
            return
        for (bank, part) in list(self.partition_rows):
            pl = self.partitions[bank][part]
            if bank == lay.bank and pl.base < lay.base + lay.depth and lay.base < pl.base + pl.depth:
                del self.partition_rows[(bank, part)]

    # -- partitions ----------------------------------------------------------------
    @staticmethod
    def partition_of(row: int) -> int:
        return (row // ROWS_PER_PARTITION) % PARTITIONS

    def write_a_row(self, row: int, values: np.ndarray, bank: int) -> None:
        part = self.partition_of(row)
        self.write(self.partitions[bank][part], np.asarray(values)[None, :], row % ROWS_PER_PARTITION, 0)
        held = tuple(r for r in self.partition_rows.get((bank, part), ()) if r // 2 == row // 2 and r != row)
        self.partition_rows[(bank, part)] = tuple(sorted(held + (row,)))

    def rows_resident(self, first: int, count: int, bank: int) -> bool:
        return all(r in self.partition_rows.get((bank, self.partition_of(r)), ())
                   for r in range(first, first + count))

    def a_rows(self, first: int, count: int, bank: int) -> np.ndarray:
        if not self.rows_resident(first, count, bank):
            raise ResidencyError(f"rows {first}..{first + count - 1} of A are not all resident in bank {bank}")
        out = []
        for row in range(first, first + count):
            lay = self.partitions[bank][self.partition_of(row)]
            out.append(self.read(lay, row % ROWS_PER_PARTITION, 0, 1, None)[0])
        return np.stack(out)
