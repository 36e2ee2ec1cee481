import numpy as np
import pytest

from frodoproc.memory import (AUX_REGIONS, BANK_DEPTH, MemoryModel, ResidencyError, narrow_layout,
                              partition_layout, wide_layout)
from frodoproc.params import params_for


@pytest.fixture
def mem():
    return MemoryModel(params_for(640))


def test_depths(mem):
    n = 1344
    big = MemoryModel(params_for(n))
    assert big.space_e.depth == 1344 and big.space_s.depth == 672 and big.space_ep.depth == 1344
    assert big.space_e.depth + big.space_s.depth <= BANK_DEPTH


def test_wide_blocks_single_cycle():
    lay = wide_layout("E", 0, 0, 64)
    for r in range(0, 64, 2):
        for c in (0, 4):
            assert lay.single_cycle(r, c, 2, 4)        # 2x4 write of a result block
    for r in range(0, 64, 4):
        for c in range(0, 8, 2):
            assert lay.single_cycle(r, c, 4, 2)        # 4x2 read of a transposed operand


def test_narrow_word_holds_four_elements():
    lay = narrow_layout("S", 0, 0, 64)
    assert lay.single_cycle(0, 0, 4, 4)
    words = lay.words_per_ram(0, 0, 1, 4)
    assert list(words) == [0] and len(words[0]) == 1


def test_partition_rows_fetch_in_one_cycle():
    for part in range(4):
        lay = partition_layout(1, 0, part, 64)
        for e in range(0, 64, 4):
            assert lay.single_cycle(0, e, 2, 2)


def test_roundtrip_all_spaces(mem):
    rng = np.random.default_rng(0)
    e = rng.integers(0, 1 << 15, size=(640, 8)).astype(np.uint16)
    s = rng.integers(-12, 13, size=(8, 640)).astype(np.int8)
    mem.write(mem.space_e, e)
    mem.write(mem.space_s, s)
    mem.write(mem.space_ep, e[::-1])
    assert np.array_equal(mem.read(mem.space_e), e)
    assert np.array_equal(mem.read(mem.space_s, signed=True), s)
    assert np.array_equal(mem.read(mem.space_ep), e[::-1])
    blk = rng.integers(0, 100, size=(2, 4))
    mem.write(mem.space_e, blk, 6, 4)
    assert np.array_equal(mem.read(mem.space_e, 6, 4, 2, 4), blk)


def test_a_rows_residency(mem):
    row = np.arange(640, dtype=np.uint16)
    mem.write_a_row(0, row, 1)
    with pytest.raises(ResidencyError):
        mem.a_rows(0, 2, 1)
    mem.write_a_row(1, row + 1, 1)
    assert np.array_equal(mem.a_rows(0, 2, 1), np.stack([row, row + 1]))
    # the next pair lands in partition 1; partition 0 is untouched
    mem.write_a_row(2, row, 1)
    assert mem.rows_resident(0, 2, 1)
    # overwriting space E' (same bank) evicts rows held there
    mem.write(mem.space_ep, np.zeros((640, 8), dtype=np.uint16))
    assert not mem.rows_resident(0, 2, 1)


def test_aux_regions_fit():
    assert all(a.bank == 1 and a.hi <= BANK_DEPTH for a in AUX_REGIONS.values())
    spans = sorted((a.lo, a.hi) for a in AUX_REGIONS.values())
    assert all(h <= l2 for (_, h), (l2, _) in zip(spans, spans[1:]))
