import pytest

from frodoproc.params import ShakeVariant
from frodoproc.timing import Calibration, HashUnitModel, MultiplierArrayModel, hash_cycles

V128, V256 = ShakeVariant.SHAKE128, ShakeVariant.SHAKE256


def test_io_latency():
    h = HashUnitModel()
    assert h.io_latency(V128) == 21
    assert h.io_latency(V256) == 17


def test_single_permutation_serial():
    # one full output block after a short absorb: 24 + 21
    h = HashUnitModel(overlap=False)
    assert h.squeeze_cycles(168, V128) == 45


def test_zero_output_is_absorb_only():
    assert hash_cycles(100, 0, V128) == HashUnitModel().absorb_cycles(100, V128)
    assert HashUnitModel().squeeze_cycles(0, V256) == 0


@pytest.mark.parametrize("variant", [V128, V256])
@pytest.mark.parametrize("n_in, n_out", [(0, 1), (32, 1280), (1000, 5000), (50, 20000)])
def test_overlap_never_slower(variant, n_in, n_out):
    assert hash_cycles(n_in, n_out, variant, True) <= hash_cycles(n_in, n_out, variant, False)


def test_improvement_bounded():
    h = HashUnitModel()
    for variant in (V128, V256):
        io = h.io_latency(variant)
        for n in (168, 1000, 10 ** 5):
            assert 1.0 <= h.squeeze_improvement(n, variant) <= (24 + io) / 24


def test_long_squeeze_improvement():
    assert HashUnitModel().squeeze_improvement(10 ** 6, V128) == pytest.approx(45 / 24, rel=1e-3)


def test_absorb_setup_is_additive():
    assert HashUnitModel(absorb_setup=54).absorb_cycles(40, V128) == HashUnitModel().absorb_cycles(40, V128) + 54


def test_array_phases():
    arr = MultiplierArrayModel(fill=8)
    assert arr.mac_phase(640) == 168
    assert 640 * arr.mac_phase(640) == 107520
    assert arr.ma_phase(640) == 336
    assert arr.multiplies_per_cycle() == 32


def test_calibration_validation():
    assert Calibration().with_(mul_fill=3).mul_fill == 3
    with pytest.raises(ValueError):
        Calibration(issue_overhead=-1)
