import pytest

from frodoproc.params import ALL_LEVELS, SecurityLevel, ShakeVariant, params_for
from frodoproc.sampling import sample_words

import numpy as np


def test_exactly_three_levels():
    assert len(ALL_LEVELS) == 3
    assert {params_for(l).n for l in ALL_LEVELS} == {640, 976, 1344}


@pytest.mark.parametrize("level, D, q, B, d", [
    (640, 15, 32768, 2, 12),
    (976, 16, 65536, 3, 10),
    (1344, 16, 65536, 4, 6),
])
def test_table_values(level, D, q, B, d):
    p = params_for(level)
    assert (p.D, p.q, p.B, p.d, p.nbar) == (D, q, B, d, 8)


def test_invariants(p):
    assert p.q == 2 ** p.D and p.D in (15, 16)
    t = p.cdf_table
    assert all(a < b for a, b in zip(t, t[1:]))
    assert t[-1] == 2 ** 15 - 1
    assert len(t) - 1 == p.d
    assert p.len_u == p.nbar * p.nbar * p.B // 8 == 8 * p.B
    assert (p.shake_variant is ShakeVariant.SHAKE128) == (p.n == 640)


def test_976_table_length():
    assert len(params_for(976).cdf_table) == 11


@pytest.mark.parametrize("level, pk, sk, ct", [
    (640, 9616, 19888, 9752),
    (976, 15632, 31296, 15792),
    (1344, 21520, 43088, 21696),
])
def test_official_sizes(level, pk, sk, ct):
    p = params_for(level)
    assert (p.len_pk, p.len_sk, p.len_ct) == (pk, sk, ct)


def test_repeated_calls_identical():
    assert params_for(640) is params_for(SecurityLevel.FRODO640)
    assert params_for("frodo976") == params_for(976)


def test_unknown_level():
    with pytest.raises(ValueError):
        params_for(512)


def test_sample_bound_exhaustive(p):
    s = sample_words(np.arange(1 << 16, dtype=np.uint32).astype(np.uint16), p)
    assert int(np.abs(s).max()) == p.d
