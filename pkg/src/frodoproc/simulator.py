"""Cycle-approximate model of the processor: dispatcher, hash unit, multiplier array, memory.

Timing and function are decoupled.  When an instruction issues, its effect on
memory is computed immediately with the functional modules (xof, sampling,
matrix_engine, codec); the timing model only decides *when* it may issue and
how long it occupies its unit.  Conflicting instructions never overlap and
issue in program order, so applying effects at issue time is equivalent to
applying them at completion.

Dispatch: a buffer of two slots (one when overlap is disabled).  The head
instruction issues as soon as a slot is free and it does not conflict with any
instruction still executing.  A slot accepts its next instruction
``issue_overhead`` cycles after its previous one completed.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import codec, sampling
from .isa import (Conflict, Instruction, InvalidInstruction, MulMode, Opcode, detect_conflict,
                  disassemble)
from .kem import verify_select
from .matrix_engine import ma_phase, mac_phase, mat_add_blocks, to_zq
from .memory import AUX_REGIONS, MemoryModel, ResidencyError
from .params import ParameterSet, params_for
from .timing import (BLOCK_TRANSFER_CYCLES, CMP_CYCLES, DEC_CYCLES, DEFAULT_CALIBRATION, ENC_CYCLES,
                     MODE_SETUP_CYCLES, PRELOAD_CYCLES, Calibration, HashUnitModel, MultiplierArrayModel)
from .xof import shake

__all__ = [
    "Conflict", "CycleReport", "DeadlockError", "Dispatcher", "Instruction", "InstructionTiming",
    "Machine", "Opcode", "aux_len", "check_hazards", "detect_conflict", "disassemble", "load_program",
    "run", "step",
]


class DeadlockError(RuntimeError):
    """No instruction can ever issue; carries the blocked instruction and its blocker."""

    def __init__(self, message: str, blocked: Instruction | None = None, blocker: Instruction | None = None):
        super().__init__(message)
        self.blocked = blocked
        self.blocker = blocker


def aux_len(p: ParameterSet, name: str) -> int:
    """Byte length of a temporary holding a byte string."""
    table = {
        "z": p.len_z, "s": p.len_s, "seed_se": p.len_seed_se, "seed_a": p.len_seed_a,
        "pkh": p.len_pkh, "u": p.len_u, "salt": p.len_salt, "k": p.len_k,
        "ss0": p.len_ss, "ss1": p.len_ss, "ss2": p.len_ss, "ss": p.len_ss,
    }
    try:
        return table[name]
    except KeyError:
        raise KeyError(f"{name!r} is not a byte-string temporary") from None


def source_len(p: ParameterSet, token: str) -> int:
    kind, _, arg = token.partition(":")
    if kind == "aux":
        return aux_len(p, arg)
    if kind == "le16":
        return 2
    if kind == "sep":
        return len(bytes.fromhex(arg))
    if kind in ("pack", "packT"):
        return p.len_b_packed if arg in ("spaceE", "spaceEp") else p.len_c_packed
    raise KeyError(f"unknown hash source {token!r}")


# ---------------------------------------------------------------------------------
# timing

class InstructionTiming:
    """Busy cycles of each instruction under a calibration."""

    def __init__(self, p: ParameterSet, calibration: Calibration = DEFAULT_CALIBRATION,
                 hash_overlap: bool = True):
        self.p = p
        self.calibration = calibration
        self.hash_unit = HashUnitModel(overlap=hash_overlap, absorb_setup=calibration.absorb_setup)
        self.array = MultiplierArrayModel(fill=calibration.mul_fill)

    def latency(self, ins: Instruction) -> int:
        oc = ins.opcode
        if oc is Opcode.HIA:
            return self.hash_unit.absorb_cycles(ins.length, ins.variant)
        if oc is Opcode.HOS:
            return self.hash_unit.squeeze_cycles(ins.length, ins.variant)
        if oc is Opcode.MUL:
            if ins.mode is MulMode.MAC:
                return self.array.mac_phase(ins.length)
            if ins.mode is MulMode.MA:
                return self.array.ma_phase(ins.length)
            return self.array.add_phase(self.p.nbar * self.p.nbar // 8)
        if oc is Opcode.MBR:
            if ins.op == "preload":
                return PRELOAD_CYCLES
            if ins.op == "setup":
                return MODE_SETUP_CYCLES
            return BLOCK_TRANSFER_CYCLES
        if oc is Opcode.MBW:
            return BLOCK_TRANSFER_CYCLES
        return {Opcode.ENC: ENC_CYCLES, Opcode.DEC: DEC_CYCLES, Opcode.CMP: CMP_CYCLES}[oc]


# ---------------------------------------------------------------------------------
# dispatch

@dataclass
class InFlight:
    index: int
    ins: Instruction
    start: int
    end: int
    slot: int


class Dispatcher:
    """Dual-instruction buffer with a conflict detector.

    ``check_conflicts=False`` disables the detector (used to demonstrate that
    the hazard instrumentation catches what it would have prevented).
    """

    def __init__(self, slots: int, issue_overhead: int, check_conflicts: bool = True):
        if slots not in (1, 2):
            raise ValueError("the dispatcher holds one or two instructions")
        self.slots = slots
        self.issue_overhead = issue_overhead
        self.check_conflicts = check_conflicts
        self.in_flight: list[InFlight] = []
        self.slot_free = [0] * slots

    def retire(self, now: int) -> None:
        self.in_flight = [f for f in self.in_flight if f.end > now]

    def free_slot(self, now: int) -> int | None:
        busy = {f.slot for f in self.in_flight}
        for s in range(self.slots):
            if s not in busy and self.slot_free[s] <= now:
                return s
        return None

    def blocker(self, ins: Instruction, now: int) -> InFlight | None:
        if not self.check_conflicts:
            return None
        for f in self.in_flight:
            if f.end > now and detect_conflict(f.ins, ins) is Conflict.SERIALIZE:
                return f
        return None

    def can_issue(self, ins: Instruction, now: int) -> bool:
        return self.free_slot(now) is not None and self.blocker(ins, now) is None

    def issue(self, index: int, ins: Instruction, now: int, latency: int) -> InFlight:
        slot = self.free_slot(now)
        if slot is None:
            raise RuntimeError("no free dispatch slot")
        f = InFlight(index, ins, now, now + latency, slot)
        self.in_flight.append(f)
        self.slot_free[slot] = f.end + self.issue_overhead
        return f

    def next_event(self, now: int) -> int | None:
        times = [f.end for f in self.in_flight if f.end > now]
        times += [t for t in self.slot_free if t > now]
        return min(times) if times else None


# ---------------------------------------------------------------------------------
# report

TALLY_ORDER = [oc.value for oc in Opcode]


@dataclass
class CycleReport:
    level: int
    phase: str
    overlap: bool
    total: int
    cycles: dict[str, int]
    dispatch: int
    savings: int
    idle: int
    instructions: int
    outputs: dict[str, bytes] = field(default_factory=dict)
    recorded_digest: str | None = None   # set when parsed from text, where outputs are not kept

    @property
    def busy(self) -> int:
        return sum(self.cycles.values())

    @property
    def serial(self) -> int:
        """Sum of every busy and dispatch cycle: the cost with nothing overlapped."""
        return self.busy + self.dispatch

    @property
    def ratio_vs_serial(self) -> float:
        return self.total / self.serial if self.serial else 1.0

    def percent(self, opcode: str) -> float:
        return 100.0 * self.cycles.get(opcode, 0) / self.busy if self.busy else 0.0

    @property
    def output_digest(self) -> str:
        if self.recorded_digest is not None:
            return self.recorded_digest
        h = hashlib.sha256()
        for name in sorted(self.outputs):
            h.update(name.encode() + b"\0" + self.outputs[name])
        return h.hexdigest()

    def conserved(self) -> bool:
        return self.serial - self.savings + self.idle == self.total

    def to_dict(self) -> dict:
        return {
            "level": self.level, "phase": self.phase, "overlap": self.overlap,
            "total": self.total, "serial": self.serial, "ratio_vs_serial": round(self.ratio_vs_serial, 6),
            "dispatch": self.dispatch, "savings": self.savings, "idle": self.idle,
            "instructions": self.instructions,
            "opcodes": {k: {"cycles": v, "percent": round(self.percent(k), 3)} for k, v in self.cycles.items()},
            "outputs": {k: v.hex() for k, v in self.outputs.items()},
            "output_digest": self.output_digest,
        }

    def to_text(self) -> str:
        """Tab-delimited report; the layout is stable so reports can be diffed."""
        lines = [
            "# frodoproc cycle report v1",
            f"level\t{self.level}",
            f"phase\t{self.phase}",
            f"overlap\t{'on' if self.overlap else 'off'}",
            f"instructions\t{self.instructions}",
            "",
            "opcode\tcycles\tpercent",
        ]
        for k in TALLY_ORDER:
            lines.append(f"{k}\t{self.cycles.get(k, 0)}\t{self.percent(k):.2f}")
        lines += [
            "",
            f"busy\t{self.busy}",
            f"dispatch\t{self.dispatch}",
            f"serial\t{self.serial}",
            f"savings\t{self.savings}",
            f"idle\t{self.idle}",
            f"total\t{self.total}",
            f"ratio_vs_serial\t{self.ratio_vs_serial:.4f}",
            f"output_digest\t{self.output_digest}",
        ]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "CycleReport":
        kv: dict[str, str] = {}
        cycles: dict[str, int] = {}
        in_table = False
        for line in text.splitlines():
            if not line or line.startswith("#"):
                in_table = False
                continue
            parts = line.split("\t")
            if parts[0] == "opcode":
                in_table = True
                continue
            if in_table:
                cycles[parts[0]] = int(parts[1])
            else:
                kv[parts[0]] = parts[1]
        return cls(level=int(kv["level"]), phase=kv["phase"], overlap=kv["overlap"] == "on",
                   total=int(kv["total"]), cycles=cycles, dispatch=int(kv["dispatch"]),
                   savings=int(kv["savings"]), idle=int(kv["idle"]), instructions=int(kv["instructions"]),
                   recorded_digest=kv.get("output_digest"))


# ---------------------------------------------------------------------------------
# machine

class Machine:
    """Simulator state: memory, array registers, hash state, dispatcher, cycle counter."""

    def __init__(self, level, calibration: Calibration = DEFAULT_CALIBRATION, overlap: bool = True,
                 hash_overlap: bool = True, check_conflicts: bool = True, phase: str = ""):
        self.p = level if isinstance(level, ParameterSet) else params_for(level)
        self.calibration = calibration
        self.overlap = overlap
        self.phase = phase
        self.timing = InstructionTiming(self.p, calibration, hash_overlap)
        self.memory = MemoryModel(self.p)
        self.dispatcher = Dispatcher(2 if overlap else 1, calibration.issue_overhead, check_conflicts)
        self.program: list[Instruction] = []
        self.pc = 0
        self.cycle = 0
        self.trace: list[InFlight] = []
        # multiplier-array registers
        self.reg_addend: np.ndarray | None = None
        self.reg_acc: np.ndarray | None = None
        self.reg_preload: np.ndarray | None = None
        # hash unit state
        self.hash_input = b""
        self.hash_variant = None
        self.hash_offset = 0

    # -- program control -------------------------------------------------------------
    def load_program(self, program: Sequence[Instruction]) -> "Machine":
        for i, ins in enumerate(program):
            if not isinstance(ins, Instruction):
                raise InvalidInstruction(f"entry {i} is not an instruction")
            ins.validate()
            for tok in ins.sources:
                self._check_source(ins, tok)
            for name in ins.dests:
                if name not in AUX_REGIONS and name not in ("spaceE", "spaceS", "spaceEp"):
                    raise InvalidInstruction(f"{ins.text()}: unknown region {name!r}")
            if ins.opcode is Opcode.HOS and ins.op == "a_row":
                row, bank = ins.index
                if not 0 <= row < self.p.n or bank not in (0, 1):
                    raise InvalidInstruction(f"{ins.text()}: row/bank out of range")
        self.program = list(program)
        self.pc = 0
        self.cycle = 0
        self.trace = []
        return self

    def _check_source(self, ins: Instruction, tok: str) -> None:
        kind, _, arg = tok.partition(":")
        ok = ((kind == "aux" and arg in AUX_REGIONS) or kind in ("le16", "sep")
              or (kind in ("pack", "packT") and arg in ("spaceE", "spaceEp", "C", "Ct"))
              or (kind == "mem" and arg in ("spaceE", "spaceS", "spaceEp")))
        if not ok:
            raise InvalidInstruction(f"{ins.text()}: unknown region {tok!r}")

    @property
    def halted(self) -> bool:
        return self.pc >= len(self.program) and all(f.end <= self.cycle for f in self.dispatcher.in_flight)

    def _data_ready(self, ins: Instruction) -> bool:
        if ins.opcode is Opcode.MUL and ins.op in ("B", "Bp"):
            first, count = (2 * ins.index[0], 2) if ins.op == "B" else (4 * ins.index[0], 4)
            return self.memory.rows_resident(first, count, ins.index[2])
        if ins.opcode is Opcode.HOS and self.hash_variant is None:
            return False
        return all(tok.partition(":")[2] in self.memory.aux
                   for tok in ins.sources if tok.startswith(("aux:", "pack:C", "packT:Ct")))

    def _try_issue(self) -> None:
        d = self.dispatcher
        d.retire(self.cycle)
        while self.pc < len(self.program):
            ins = self.program[self.pc]
            if not d.can_issue(ins, self.cycle):
                return
            if not self._data_ready(ins):
                if not d.in_flight:
                    last = self.trace[-1].ins if self.trace else None
                    raise DeadlockError(f"instruction {self.pc} ({ins.text()}) waits for data that no "
                                        f"instruction in flight will produce", ins, last)
                return
            f = d.issue(self.pc, ins, self.cycle, self.timing.latency(ins))
            self.trace.append(f)
            self._execute(ins)
            self.pc += 1

    def step(self) -> "Machine":
        """Advance one clock cycle."""
        if self.halted:
            raise RuntimeError("machine is halted")
        self._try_issue()
        if self.pc < len(self.program) and not self.dispatcher.in_flight and \
                self.dispatcher.next_event(self.cycle) is None:
            self._deadlock()
        self.cycle += 1
        return self

    def _deadlock(self):
        ins = self.program[self.pc]
        b = self.dispatcher.blocker(ins, self.cycle)
        raise DeadlockError(f"instruction {self.pc} ({ins.text()}) can never issue", ins, b.ins if b else None)

    def run(self) -> CycleReport:
        while True:
            self._try_issue()
            if self.pc >= len(self.program):
                break
            nxt = self.dispatcher.next_event(self.cycle)
            if nxt is None:
                self._deadlock()
            self.cycle = nxt
        self.cycle = max((f.end for f in self.trace), default=0)
        return self.report()

    # -- accounting ------------------------------------------------------------------
    def report(self) -> CycleReport:
        total = max((f.end for f in self.trace), default=0)
        o = self.dispatcher.issue_overhead
        cycles = {k: 0 for k in TALLY_ORDER}
        events: list[tuple[int, int]] = []
        dispatch = 0
        for f in self.trace:
            cycles[f.ins.opcode.value] += f.end - f.start
            gap_end = min(f.end + o, total)
            dispatch += gap_end - f.end
            events += [(f.start, 1), (gap_end, -1)]
        # independent sweep: cycles with >= 2 active intervals are savings, 0 active are idle
        events.sort()
        savings = idle = 0
        active, prev = 0, 0
        for t, delta in events:
            span = t - prev
            if active == 0:
                idle += span
            elif active > 1:
                savings += (active - 1) * span
            active += delta
            prev = t
        idle += max(0, total - prev)
        return CycleReport(self.p.n, self.phase, self.overlap, total, cycles, dispatch, savings, idle,
                           len(self.trace), self.outputs())

    def outputs(self) -> dict[str, bytes]:
        """Protocol outputs assembled from memory, for whichever phase has run."""
        m, p, aux = self.memory, self.p, self.memory.aux
        out: dict[str, bytes] = {}
        if self.phase == "keygen" and "pkh" in aux:
            pk = aux["seed_a"] + codec.pack(m.read(m.space_e), p)
            s_t = m.read(m.space_s, signed=True).astype("<i2").tobytes()
            out = {"pk": pk, "sk": aux["s"] + pk + s_t + aux["pkh"]}
        elif self.phase == "encaps" and "ss" in aux:
            ct = codec.pack(m.read(m.space_ep).T, p) + codec.pack(aux["Ct"].T, p) + aux["salt"]
            out = {"ct": ct, "ss": aux["ss"]}
        elif self.phase == "decaps" and "ss" in aux:
            out = {"ss": aux["ss"]}
        return out

    # -- functional effects ----------------------------------------------------------
    def _source_bytes(self, tok: str) -> bytes:
        kind, _, arg = tok.partition(":")
        m, p = self.memory, self.p
        if kind == "aux":
            return m.aux[arg]
        if kind == "le16":
            return int(arg).to_bytes(2, "little")
        if kind == "sep":
            return bytes.fromhex(arg)
        if kind == "pack":
            mat = m.read(m.layouts[arg]) if arg.startswith("space") else m.aux[arg]
            return codec.pack(mat, p)
        if kind == "packT":
            mat = m.read(m.layouts[arg]) if arg.startswith("space") else m.aux[arg]
            return codec.pack(np.asarray(mat).T, p)
        raise KeyError(tok)

    def _execute(self, ins: Instruction) -> None:
        getattr(self, "_exec_" + ins.opcode.value.lower())(ins)

    def _exec_hia(self, ins: Instruction) -> None:
        data = b"".join(self._source_bytes(t) for t in ins.sources)
        if len(data) != ins.length:
            raise InvalidInstruction(f"{ins.text()}: sources hold {len(data)} bytes")
        self.hash_input, self.hash_variant, self.hash_offset = data, ins.variant, 0

    def _exec_hos(self, ins: Instruction) -> None:
        p, m = self.p, self.memory
        start = self.hash_offset
        out = shake(self.hash_variant, self.hash_input, start + ins.length)[start:]
        self.hash_offset += ins.length
        if ins.op == "bytes":
            off = 0
            for name in ins.dests:
                n = aux_len(p, name)
                m.aux[name] = out[off:off + n]
                off += n
        elif ins.op == "a_row":
            row, bank = ins.index
            m.write_a_row(row, np.frombuffer(out, dtype="<u2") & np.uint16(p.q - 1), bank)
        else:
            samples = sampling.sample_words(np.frombuffer(out, dtype="<u2"), p)
            nn = p.n * p.nbar
            first = samples[:nn].reshape(p.nbar, p.n)
            m.write(m.space_s, first)
            if ins.dests[1] == "spaceE":        # KeyGen: S^T, then E (n x nbar)
                m.write(m.space_e, to_zq(samples[nn:2 * nn].reshape(p.n, p.nbar), p.D))
            else:                               # Encaps/Decaps: S', E' (stored transposed), E''
                m.write(m.space_ep, to_zq(samples[nn:2 * nn].reshape(p.nbar, p.n).T, p.D))
                m.aux["Epp"] = samples[2 * nn:].reshape(p.nbar, p.nbar)

    def _exec_mbr(self, ins: Instruction) -> None:
        m = self.memory
        if ins.op == "setup":
            self.reg_addend = None
            return
        i, j = ins.index[:2]
        src = ins.sources[0].partition(":")[2]
        if ins.op == "preload":
            # S'^T block (i, j) is S' rows 4j.., columns 4i..
            self.reg_preload = m.read(m.space_s, 4 * j, 4 * i, 4, 4, signed=True).T
        elif ins.op == "addend":
            mat = m.read(m.space_e) if src == "spaceE" else m.aux[src]
            self.reg_addend = np.asarray(mat)[2 * i:2 * i + 2, 4 * j:4 * j + 4].copy()
        else:  # addendT
            self.reg_addend = np.asarray(m.aux[src]).T[2 * i:2 * i + 2, 4 * j:4 * j + 4].copy()

    def _s_columns(self, j: int) -> np.ndarray:
        # columns 4j..4j+3 of the n x nbar right operand, from its nbar x n storage
        m = self.memory
        return m.read(m.space_s, 4 * j, 0, 4, None, signed=True).T

    def _exec_mul(self, ins: Instruction) -> None:
        m, p = self.memory, self.p
        if ins.op == "Eu":
            m.aux["Eu"] = mat_add_blocks(to_zq(m.aux["Epp"], p.D), m.aux["U"], p)
            return
        if ins.op == "Bp":
            k, j, bank = ins.index
            left = m.a_rows(4 * k, 4, bank).T
            part = m.read(m.space_ep, 0, 4 * j, None, 4)
            m.write(m.space_ep, ma_phase(left, self.reg_preload, part) & (p.q - 1), 0, 4 * j)
            return
        i, j = ins.index[:2]
        if ins.op == "B":
            left = m.a_rows(2 * i, 2, ins.index[2])
        elif ins.op == "Ct":
            left = m.read(m.space_e, 0, 2 * i, None, 2).T
        else:  # M
            left = m.read(m.space_ep, 0, 2 * i, None, 2).T
        self.reg_acc = mac_phase(left, self._s_columns(j), self.reg_addend, p.D, subtract=ins.op == "M")

    def _exec_mbw(self, ins: Instruction) -> None:
        m = self.memory
        i, j = ins.index
        dst = ins.dests[0]
        if dst == "spaceE":
            m.write(m.space_e, self.reg_acc, 2 * i, 4 * j)
        else:
            mat = m.aux.setdefault(dst, np.zeros((self.p.nbar, self.p.nbar), dtype=np.uint16))
            mat[2 * i:2 * i + 2, 4 * j:4 * j + 4] = self.reg_acc

    def _exec_enc(self, ins: Instruction) -> None:
        self.memory.aux["U"] = codec.encode(self.memory.aux["u"], self.p)

    def _exec_dec(self, ins: Instruction) -> None:
        self.memory.aux["u"] = codec.decode(self.memory.aux["M"], self.p)

    def _exec_cmp(self, ins: Instruction) -> None:
        aux = self.memory.aux
        aux["ss"] = verify_select(aux["ss0"], aux["ss1"], aux["ss2"])


def load_program(m: Machine, prog: Sequence[Instruction]) -> Machine:
    return m.load_program(prog)


def step(m: Machine) -> Machine:
    return m.step()


def run(m: Machine) -> CycleReport:
    return m.run()


# ---------------------------------------------------------------------------------
# ordering constraints (used to schedule overlap-enabled programs)

def dependencies(program: Sequence[Instruction]) -> list[set[int]]:
    """For each instruction, the earlier instructions it must follow (memory / register hazards)."""
    deps: list[set[int]] = [set() for _ in program]
    live: dict[int, list[tuple[int, int, bool, int]]] = {}
    for idx, ins in enumerate(program):
        for a in ins.accesses:
            entries = live.setdefault(a.bank, [])
            for lo, hi, w, j in entries:
                if j != idx and (w or a.write) and lo < a.hi and a.lo < hi:
                    deps[idx].add(j)
        for a in ins.accesses:
            entries = live[a.bank]
            if a.write:
                # anything fully covered by this write is now ordered through it
                entries[:] = [e for e in entries if not (a.lo <= e[0] and e[1] <= a.hi)]
            entries.append((a.lo, a.hi, a.write, idx))
    return deps


# ---------------------------------------------------------------------------------
# instrumentation

@dataclass
class Hazard:
    first: int
    second: int
    kind: str

    def __str__(self) -> str:
        return f"{self.kind}: instruction {self.first} and {self.second}"


def check_hazards(trace: Iterable[InFlight]) -> list[Hazard]:
    """Post-run check independent of the dispatcher.

    For every pair of instructions touching overlapping memory with at least
    one write, the earlier one in program order must finish before the later
    one starts.  This covers concurrent read/write of a ping-pong partition
    and reading a result block before its final write-back.
    """
    rows = []
    for f in trace:
        for a in f.ins.accesses:
            rows.append((f.index, f.start, f.end, a.bank, a.lo, a.hi, a.write))
    if not rows:
        return []
    arr = np.array(rows, dtype=np.int64)
    idx, start, end, bank, lo, hi, wr = arr.T
    hazards: list[Hazard] = []
    seen: set[tuple[int, int]] = set()
    order = np.argsort(idx, kind="stable")
    idx, start, end, bank, lo, hi, wr = (x[order] for x in (idx, start, end, bank, lo, hi, wr))
    for r in range(len(idx)):
        earlier = idx < idx[r]
        clash = (earlier & (bank == bank[r]) & (lo < hi[r]) & (lo[r] < hi) & ((wr == 1) | (wr[r] == 1))
                 & (end > start[r]))
        for e in np.nonzero(clash)[0]:
            key = (int(idx[e]), int(idx[r]))
            if key not in seen:
                seen.add(key)
                kind = "write/write" if wr[e] and wr[r] else ("read-before-write-done" if wr[e] else "write-during-read")
                hazards.append(Hazard(key[0], key[1], kind))
    return hazards


def concurrency_profile(trace: Iterable[InFlight]) -> dict[tuple[str, str], int]:
    """Cycles during which each unordered opcode pair executed together."""
    trace = sorted(trace, key=lambda f: f.start)
    out: dict[tuple[str, str], int] = {}
    for i, a in enumerate(trace):
        for b in trace[i + 1:i + 4]:
            if b.start >= a.end:
                break
            ov = min(a.end, b.end) - b.start
            if ov > 0:
                key = tuple(sorted((a.ins.opcode.value, b.ins.opcode.value)))
                out[key] = out.get(key, 0) + ov
    return out
