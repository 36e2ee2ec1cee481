from collections import Counter

import pytest

from frodoproc.isa import MulMode, Opcode
from frodoproc.params import params_for
from frodoproc.programs import PHASES, build_program, canonical_program, modeled_total, simulate
from frodoproc.simulator import Machine, dependencies
from frodoproc.timing import DEFAULT_CALIBRATION


def test_keygen_640_mac_count():
    prog = build_program(640, "keygen")
    b = [i for i in prog if i.opcode is Opcode.MUL and i.op == "B"]
    assert len(b) == (640 // 2) * (8 // 4) == 640
    assert all(i.mode is MulMode.MAC for i in b)
    assert not any(i.opcode is Opcode.MBW for i in prog if i.op == "Bp")


def test_bp_uses_ma_without_writeback():
    prog = canonical_program(640, "encaps")
    bp = [i for i in prog if i.opcode is Opcode.MUL and i.op == "Bp"]
    assert len(bp) == (640 // 4) * 2 and all(i.mode is MulMode.MA for i in bp)
    assert all(i.opcode is not Opcode.MBW or i.dests != ("spaceEp",) for i in prog)


@pytest.mark.parametrize("phase", ["encaps", "decaps"])
def test_c_before_bp(phase):
    for overlap in (True, False):
        prog = build_program(640, phase, overlap)
        last_c = max(k for k, i in enumerate(prog) if i.opcode is Opcode.MUL and i.op == "Ct")
        first_bp = min(k for k, i in enumerate(prog) if i.opcode is Opcode.MUL and i.op == "Bp")
        assert last_c < first_bp


@pytest.mark.parametrize("n", [640, 976, 1344])
@pytest.mark.parametrize("phase", PHASES)
def test_off_is_topological_order_of_on(n, phase):
    off = build_program(n, phase, False)
    on = build_program(n, phase, True)

    def keyed(prog):
        # identical instructions are told apart by occurrence number
        seen = Counter()
        out = []
        for ins in prog:
            seen[ins] += 1
            out.append((ins, seen[ins]))
        return out

    k_off, k_on = keyed(off), keyed(on)
    assert sorted(map(hash, k_off)) == sorted(map(hash, k_on)) and set(k_off) == set(k_on)
    pos = {k: i for i, k in enumerate(k_on)}
    for i, deps in enumerate(dependencies(off)):
        for j in deps:
            assert pos[k_off[j]] < pos[k_off[i]]


@pytest.mark.parametrize("phase", PHASES)
def test_programs_validate(phase):
    for n in (640, 976, 1344):
        Machine(n).load_program(build_program(n, phase))


def test_pure_function():
    a = build_program(976, "decaps", True)
    b = build_program(976, "decaps", True)
    assert a == b and a is not b
    assert canonical_program(640, "keygen") == canonical_program(640, "keygen")


def test_keygen_prefetches_rows():
    # with overlap the first MUL for B waits only for rows 0 and 1
    prog = build_program(640, "keygen")
    first_mul = next(k for k, i in enumerate(prog) if i.opcode is Opcode.MUL)
    rows_before = [i.index[0] for i in prog[:first_mul] if i.opcode is Opcode.HOS and i.op == "a_row"]
    assert sorted(rows_before)[:2] == [0, 1]


def test_modeled_total_matches_simulation():
    rep = simulate(640, "encaps", True, seed=b"m")
    assert rep.total == modeled_total(640, "encaps", True, DEFAULT_CALIBRATION)
    rep = simulate(640, "encaps", False, seed=b"m")
    assert rep.total == modeled_total(640, "encaps", False, DEFAULT_CALIBRATION)


def test_unknown_phase():
    with pytest.raises(ValueError):
        canonical_program(640, "sign")
