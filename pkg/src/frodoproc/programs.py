"""Instruction sequences for every (level, phase), generated from the loop structure.

Each phase is first written in a canonical serial order (the order used when
overlap is disabled).  With overlap enabled the same instructions are
list-scheduled against the dispatcher model: the hash unit is kept busy
generating rows of A into the ping-pong partitions while the array consumes
earlier rows, which is what pre-generating two (MAC) or four (MA) rows
amounts to.

Phase layouts:

* KeyGen: seed_A, sample S^T/E, then B = AS + E two rows of A at a time
  (A in bank 1, E overwritten by B in place), then pkh.
* Encaps: pkh, (seed_SE, k), sample S'/E'/E'', E_u = E'' + Encode(u),
  C = S'B + E_u first (so B's space can hold A), then B' = S'A + E' in MA
  mode four rows at a time (A in bank 0), then ss.
* Decaps: M = C - B'S, u' = Decode(M), (seed_SE', k'), ss0 and ss1 from the
  received ciphertext, then the same re-encryption as Encaps and ss2 from
  the re-encrypted (B'', C'), then CMP selects ss0 or ss1.
"""

from __future__ import annotations

import functools
import heapq
import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kem
from .codec import unpack
from .isa import HASH_STATE, REG_ACC, REG_ADDEND, REG_PRELOAD, Instruction, MulMode, Opcode, rw
from .memory import Access, MemoryModel, aux_access
from .params import ParameterSet, ShakeVariant, params_for
from .simulator import (CycleReport, Dispatcher, InstructionTiming, Machine, dependencies, source_len)
from .timing import DEFAULT_CALIBRATION, Calibration
from .xof import shake

PHASES = ("keygen", "encaps", "decaps")
A_BANK = {"keygen": 1, "encaps": 0, "decaps": 0}


def _p(level) -> ParameterSet:
    return level if isinstance(level, ParameterSet) else params_for(level)


class _Builder:
    def __init__(self, p: ParameterSet, a_bank: int):
        self.p = p
        self.a_bank = a_bank
        self.mem = MemoryModel(p)
        self.out: list[Instruction] = []

    def _source_access(self, tok: str) -> list[Access]:
        kind, _, arg = tok.partition(":")
        if kind == "aux" or arg in ("C", "Ct"):
            return [aux_access(arg)]
        if arg in ("spaceE", "spaceEp", "spaceS"):
            return [self.mem.layouts[arg].access()]
        return []

    def hash(self, sources: Sequence[str], op: str, out_len: int, variant: ShakeVariant,
             dests: tuple[str, ...] = (), index: tuple[int, ...] = ()) -> None:
        reads = [a for tok in sources for a in self._source_access(tok)]
        length = sum(source_len(self.p, t) for t in sources)
        self.out.append(Instruction(Opcode.HIA, "absorb", (), length, None, tuple(sources), (), variant,
                                    tuple(reads) + (rw(HASH_STATE, True),)))
        if op == "bytes":
            writes = [aux_access(d, True) for d in dests]
        elif op == "a_row":
            row = index[0]
            writes = [self.mem.partitions[self.a_bank][MemoryModel.partition_of(row)].access(True)]
        else:
            writes = [self.mem.layouts[d].access(True) if d.startswith("space") else aux_access(d, True)
                      for d in dests]
        self.out.append(Instruction(Opcode.HOS, op, index, out_len, None, (), dests, variant,
                                    (rw(HASH_STATE, True),) + tuple(writes)))

    def s_rows(self, j: int) -> Access:
        # the four rows of the 8 x n sample space feeding result columns 4j..4j+3
        return self.mem.space_s.block_access(4 * j, 0, 4, self.p.n)

    def mbr(self, op: str, index: tuple[int, ...], source: str) -> None:
        if op == "preload":
            q, j = index
            acc = [self.mem.space_s.block_access(4 * j, 4 * q, 4, 4), rw(REG_PRELOAD, True)]
        elif op == "setup":
            acc = [rw(REG_ADDEND, True)]
        elif source == "mem:spaceE":
            i, j = index
            acc = [self.mem.space_e.block_access(2 * i, 4 * j, 2, 4), rw(REG_ADDEND, True)]
        else:
            acc = [aux_access(source.partition(":")[2]), rw(REG_ADDEND, True)]
        self.out.append(Instruction(Opcode.MBR, op, index, 0, None, (source,) if source else (), (),
                                    None, tuple(acc)))

    def mul_mac(self, op: str, i: int, j: int) -> None:
        p, mem = self.p, self.mem
        if op == "B":
            left = mem.partitions[self.a_bank][i % 4].access()
            index = (i, j, self.a_bank)
        else:
            left = (mem.space_e if op == "Ct" else mem.space_ep).access()
            index = (i, j)
        acc = (left, self.s_rows(j), REG_ADDEND, rw(REG_ACC, True))
        self.out.append(Instruction(Opcode.MUL, op, index, p.n, MulMode.MAC, (), (), None, acc))

    def mul_ma(self, q: int, j: int) -> None:
        parts = self.mem.partitions[self.a_bank]
        acc = (parts[(2 * q) % 4].access(), parts[(2 * q + 1) % 4].access(), REG_PRELOAD,
               self.mem.space_ep.access(), self.mem.space_ep.access(True))
        self.out.append(Instruction(Opcode.MUL, "Bp", (q, j, self.a_bank), self.p.n, MulMode.MA, (), (),
                                    None, acc))

    def mbw(self, i: int, j: int, dest: str) -> None:
        if dest == "spaceE":
            target = self.mem.space_e.block_access(2 * i, 4 * j, 2, 4, True)
        else:
            target = aux_access(dest, True)
        self.out.append(Instruction(Opcode.MBW, "result", (i, j), 0, None, (), (dest,), None, (REG_ACC, target)))

    def simple(self, opcode: Opcode, sources: tuple[str, ...], dest: str) -> None:
        acc = tuple(aux_access(s) for s in sources) + (aux_access(dest, True),)
        self.out.append(Instruction(opcode, opcode.value.lower(), (), 0, None,
                                    tuple("aux:" + s for s in sources), (dest,), None, acc))

    def add_eu(self) -> None:
        self.mbr("setup", (), "")
        acc = (aux_access("Epp"), aux_access("U"), REG_ADDEND, aux_access("Eu", True))
        self.out.append(Instruction(Opcode.MUL, "Eu", (), 0, MulMode.ADD, ("aux:Epp", "aux:U"), ("Eu",),
                                    None, acc))

    def mac_small(self, op: str, addend_kind: str, addend_src: str, dest: str) -> None:
        # 8x8 result: nbar/2 row pairs x nbar/4 column groups, one phase each
        nb = self.p.nbar
        for i in range(nb // 2):
            for j in range(nb // 4):
                self.mbr(addend_kind, (i, j), addend_src)
                self.mul_mac(op, i, j)
                self.mbw(i, j, dest)

    def reencrypt(self, sep_hex: str = "96") -> None:
        p = self.p
        V = p.shake_variant
        self.hash([f"sep:{sep_hex}", "aux:seed_se"], "sample", 2 * (2 * p.n * p.nbar + p.nbar ** 2), V,
                  dests=("spaceS", "spaceEp", "Epp"))
        self.simple(Opcode.ENC, ("u",), "U")
        self.add_eu()
        self.mac_small("Ct", "addendT", "aux:Eu", "Ct")
        for q in range(p.n // 4):
            for r in range(4 * q, 4 * q + 4):
                self.hash([f"le16:{r}", "aux:seed_a"], "a_row", 2 * p.n, ShakeVariant.SHAKE128, index=(r, self.a_bank))
            for j in range(p.nbar // 4):
                self.mbr("preload", (q, j), "mem:spaceS")
                self.mul_ma(q, j)


def canonical_program(level, phase: str) -> list[Instruction]:
    """The serial instruction order for one phase."""
    p = _p(level)
    if phase not in PHASES:
        raise ValueError(f"unknown phase {phase!r}")
    b = _Builder(p, A_BANK[phase])
    V = p.shake_variant
    if phase == "keygen":
        b.hash(["aux:z"], "bytes", p.len_seed_a, V, dests=("seed_a",))
        b.hash(["sep:5f", "aux:seed_se"], "sample", 4 * p.n * p.nbar, V, dests=("spaceS", "spaceE"))
        for i in range(p.n // 2):
            for r in (2 * i, 2 * i + 1):
                b.hash([f"le16:{r}", "aux:seed_a"], "a_row", 2 * p.n, ShakeVariant.SHAKE128, index=(r, b.a_bank))
            for j in range(p.nbar // 4):
                b.mbr("addend", (i, j), "mem:spaceE")
                b.mul_mac("B", i, j)
                b.mbw(i, j, "spaceE")
        b.hash(["aux:seed_a", "pack:spaceE"], "bytes", p.len_pkh, V, dests=("pkh",))
    elif phase == "encaps":
        b.hash(["aux:seed_a", "pack:spaceE"], "bytes", p.len_pkh, V, dests=("pkh",))
        b.hash(["aux:pkh", "aux:u", "aux:salt"], "bytes", p.len_seed_se + p.len_k, V, dests=("seed_se", "k"))
        b.reencrypt()
        b.hash(["packT:spaceEp", "packT:Ct", "aux:salt", "aux:k"], "bytes", p.len_ss, V, dests=("ss",))
    else:
        b.mac_small("M", "addend", "aux:C", "M")
        b.simple(Opcode.DEC, ("M",), "u")
        b.hash(["aux:pkh", "aux:u", "aux:salt"], "bytes", p.len_seed_se + p.len_k, V, dests=("seed_se", "k"))
        b.hash(["packT:spaceEp", "pack:C", "aux:salt", "aux:k"], "bytes", p.len_ss, V, dests=("ss0",))
        b.hash(["packT:spaceEp", "pack:C", "aux:salt", "aux:s"], "bytes", p.len_ss, V, dests=("ss1",))
        b.reencrypt()
        b.hash(["packT:spaceEp", "packT:Ct", "aux:salt", "aux:k"], "bytes", p.len_ss, V, dests=("ss2",))
        b.simple(Opcode.CMP, ("ss0", "ss1", "ss2"), "ss")
    return b.out


def _schedule(program: Sequence[Instruction], timing: InstructionTiming, slots: int) -> tuple[list[int], int]:
    """Greedy list scheduling against the dispatcher; returns (issue order, makespan)."""
    deps = dependencies(program)
    waiting = [len(d) for d in deps]
    users: list[list[int]] = [[] for _ in program]
    for i, d in enumerate(deps):
        for j in d:
            users[j].append(i)
    ready = [i for i in range(len(program)) if waiting[i] == 0]
    heapq.heapify(ready)
    disp = Dispatcher(slots, timing.calibration.issue_overhead)
    latency = [timing.latency(ins) for ins in program]
    now, makespan = 0, 0
    order: list[int] = []
    while len(order) < len(program):
        disp.retire(now)
        while disp.free_slot(now) is not None:
            skipped, chosen = [], None
            while ready:
                i = heapq.heappop(ready)
                if disp.blocker(program[i], now) is None:
                    chosen = i
                    break
                skipped.append(i)
            for i in skipped:
                heapq.heappush(ready, i)
            if chosen is None:
                break
            f = disp.issue(chosen, program[chosen], now, latency[chosen])
            makespan = max(makespan, f.end)
            order.append(chosen)
            for u in users[chosen]:
                waiting[u] -= 1
                if waiting[u] == 0:
                    heapq.heappush(ready, u)
        if len(order) == len(program):
            break
        nxt = disp.next_event(now)
        if nxt is None:
            raise RuntimeError("scheduler stalled")
        now = nxt
    return order, makespan


@functools.lru_cache(maxsize=64)
def _build(n: int, phase: str, overlap: bool, calibration: Calibration) -> tuple[Instruction, ...]:
    prog = canonical_program(n, phase)
    if not overlap:
        return tuple(prog)
    order, _ = _schedule(prog, InstructionTiming(_p(n), calibration), 2)
    return tuple(prog[i] for i in order)


def build_program(level, phase: str, overlap: bool = True,
                  calibration: Calibration = DEFAULT_CALIBRATION) -> list[Instruction]:
    """Instruction ROM content for (level, phase); a pure function of its arguments."""
    return list(_build(_p(level).n, phase, bool(overlap), calibration))


def modeled_total(level, phase: str, overlap: bool, calibration: Calibration = DEFAULT_CALIBRATION) -> int:
    """Cycle total from the timing model alone (no functional execution)."""
    p = _p(level)
    timing = InstructionTiming(p, calibration)
    prog = canonical_program(p, phase)
    if not overlap:
        return sum(timing.latency(i) for i in prog) + calibration.issue_overhead * max(0, len(prog) - 1)
    return _schedule(prog, timing, 2)[1]


# ---------------------------------------------------------------------------------
# running phases

@dataclass(frozen=True)
class PhaseInputs:
    randomness: bytes = b""
    pk: bytes = b""
    sk: bytes = b""
    ct: bytes = b""


def inputs_from_seed(level, phase: str, seed: bytes) -> PhaseInputs:
    """Deterministic inputs for a phase; Encaps/Decaps get their keys from the functional KEM."""
    p = _p(level)
    stream = shake(ShakeVariant.SHAKE256, b"frodoproc-sim" + seed, p.keygen_randomness_len + p.encaps_randomness_len)
    kg, enc = stream[:p.keygen_randomness_len], stream[p.keygen_randomness_len:]
    if phase == "keygen":
        return PhaseInputs(randomness=kg)
    pair = kem.keygen(kg, p)
    if phase == "encaps":
        return PhaseInputs(randomness=enc, pk=pair.pk)
    ct, _ = kem.encaps(pair.pk, enc, p)
    return PhaseInputs(sk=pair.sk, ct=ct)


def load_inputs(m: Machine, phase: str, inputs: PhaseInputs) -> None:
    """Place phase inputs into memory the way the data driver would before cycle 0."""
    p, mem = m.p, m.memory
    aux = mem.aux
    if phase == "keygen":
        r = inputs.randomness
        if len(r) != p.keygen_randomness_len:
            raise kem.KemLengthError("keygen randomness has the wrong length")
        aux["s"], aux["seed_se"], aux["z"] = r[:p.len_s], r[p.len_s:p.len_s + p.len_seed_se], r[p.len_s + p.len_seed_se:]
    elif phase == "encaps":
        if len(inputs.pk) != p.len_pk or len(inputs.randomness) != p.encaps_randomness_len:
            raise kem.KemLengthError("pk or encaps randomness has the wrong length")
        aux["seed_a"] = inputs.pk[:p.len_seed_a]
        mem.write(mem.space_e, unpack(inputs.pk[p.len_seed_a:], p.n, p.nbar, p))
        aux["u"], aux["salt"] = inputs.randomness[:p.len_u], inputs.randomness[p.len_u:]
    elif phase == "decaps":
        key = kem.parse_sk(inputs.sk, p)
        c = kem.parse_ct(inputs.ct, p)
        aux["s"], aux["seed_a"], aux["pkh"] = key.s, key.seed_a, key.pkh
        mem.write(mem.space_e, key.b)
        mem.write(mem.space_s, key.s_t)
        mem.write(mem.space_ep, c.bp.T)
        aux["C"] = c.c.astype(np.uint16)
        aux["salt"] = c.salt
    else:
        raise ValueError(f"unknown phase {phase!r}")


def simulate(level, phase: str, overlap: bool = True, inputs: PhaseInputs | None = None,
             calibration: Calibration = DEFAULT_CALIBRATION, seed: bytes | None = None,
             keep_machine: bool = False):
    """Build, load and run one phase.  Returns the report (and the machine if asked)."""
    p = _p(level)
    if inputs is None:
        inputs = inputs_from_seed(p, phase, seed if seed is not None else os.urandom(16))
    m = Machine(p, calibration, overlap=overlap, phase=phase)
    load_inputs(m, phase, inputs)
    m.load_program(build_program(p, phase, overlap, calibration))
    report = m.run()
    return (report, m) if keep_machine else report


def reference_outputs(level, phase: str, inputs: PhaseInputs) -> dict[str, bytes]:
    """What the functional KEM produces for the same inputs."""
    p = _p(level)
    if phase == "keygen":
        pair = kem.keygen(inputs.randomness, p)
        return {"pk": pair.pk, "sk": pair.sk}
    if phase == "encaps":
        ct, ss = kem.encaps(inputs.pk, inputs.randomness, p)
        return {"ct": ct, "ss": ss}
    return {"ss": kem.decaps(inputs.sk, inputs.ct, p)}


# ---------------------------------------------------------------------------------
# calibration

def calibrate(target_with: int, target_without: int, level=640, phase: str = "keygen",
              mul_target: int | None = None, overheads: range = range(0, 9)) -> Calibration:
    """Fit the three timing parameters on one phase.

    The MUL fill comes from the MUL tally alone.  The serial total is linear
    in (absorb_setup, issue_overhead), so for each candidate overhead the
    setup is solved for directly; the overhead whose overlapped total lands
    closest to ``target_with`` wins.
    """
    p = _p(level)
    base = DEFAULT_CALIBRATION.with_(issue_overhead=0, absorb_setup=0)
    prog = canonical_program(p, phase)
    muls = [i for i in prog if i.opcode is Opcode.MUL and i.mode is MulMode.MAC]
    fill = base.mul_fill
    if mul_target is not None and muls:
        fill = round((mul_target - sum(i.length // 4 for i in muls)) / len(muls))
    base = base.with_(mul_fill=fill)
    timing0 = InstructionTiming(p, base)
    busy0 = sum(timing0.latency(i) for i in prog)
    n_hia = sum(1 for i in prog if i.opcode is Opcode.HIA)
    best = None
    for o in overheads:
        h = max(0, round((target_without - busy0 - o * (len(prog) - 1)) / n_hia))
        cal = base.with_(issue_overhead=o, absorb_setup=h)
        with_total = modeled_total(p, phase, True, cal)
        without_total = modeled_total(p, phase, False, cal)
        err = max(abs(with_total / target_with - 1), abs(without_total / target_without - 1))
        if best is None or err < best[0]:
            best = (err, cal)
    return best[1]
