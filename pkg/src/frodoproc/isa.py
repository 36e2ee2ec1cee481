"""The eight-opcode instruction set and the dispatcher's conflict rule."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .memory import BANK_DEPTH, Access
from .params import ShakeVariant


class Opcode(str, Enum):
    HIA = "HIA"   # hash input absorb
    HOS = "HOS"   # hash output squeeze (feeds the samplers / A buffer / temporaries)
    MBR = "MBR"   # memory -> multiplier array
    MBW = "MBW"   # multiplier array -> memory
    MUL = "MUL"   # one multiplier-array phase
    ENC = "ENC"
    DEC = "DEC"
    CMP = "CMP"


class MulMode(str, Enum):
    MAC = "MAC"
    MA = "MA"
    ADD = "ADD"


class Conflict(Enum):
    PARALLEL = "parallel"
    SERIALIZE = "serialize"


UNITS: dict[Opcode, frozenset[str]] = {
    Opcode.HIA: frozenset({"hash"}),
    Opcode.HOS: frozenset({"hash"}),
    Opcode.MBR: frozenset({"array"}),
    Opcode.MBW: frozenset({"array"}),
    Opcode.MUL: frozenset({"array"}),
    Opcode.ENC: frozenset({"edu"}),
    Opcode.DEC: frozenset({"edu"}),
    Opcode.CMP: frozenset({"cmp"}),
}

# Pseudo-banks for internal state that orders instructions without living in RAM.
HASH_STATE_BANK = 2
ARRAY_REG_BANK = 3
HASH_STATE = Access(HASH_STATE_BANK, 0, 1)
REG_ADDEND, REG_ACC, REG_PRELOAD = (Access(ARRAY_REG_BANK, i, i + 1) for i in range(3))

HOS_OPS = {"bytes", "a_row", "sample"}
MBR_OPS = {"addend", "addendT", "preload", "setup"}
MUL_OPS = {"B", "Ct", "M", "Bp", "Eu"}


class InvalidInstruction(ValueError):
    pass


def rw(acc: Access, write: bool) -> Access:
    return Access(acc.bank, acc.lo, acc.hi, write)


@dataclass(frozen=True)
class Instruction:
    """One instruction with its operands.

    ``op`` names the data movement (e.g. ``a_row`` for an HOS that fills a row
    of A); ``index`` holds block / row coordinates; ``length`` is a byte count
    for hash instructions and the shared dimension for MUL.  ``accesses``
    lists every memory range (and internal register) touched.
    """

    opcode: Opcode
    op: str = ""
    index: tuple[int, ...] = ()
    length: int = 0
    mode: MulMode | None = None
    sources: tuple[str, ...] = ()
    dests: tuple[str, ...] = ()
    variant: ShakeVariant | None = None
    accesses: tuple[Access, ...] = ()

    @property
    def units(self) -> frozenset[str]:
        return UNITS[self.opcode]

    @property
    def reads(self) -> tuple[Access, ...]:
        return tuple(a for a in self.accesses if not a.write)

    @property
    def writes(self) -> tuple[Access, ...]:
        return tuple(a for a in self.accesses if a.write)

    def validate(self) -> None:
        if not isinstance(self.opcode, Opcode):
            raise InvalidInstruction(f"unknown opcode {self.opcode!r}")
        for a in self.accesses:
            limit = BANK_DEPTH if a.bank in (0, 1) else 3
            if a.bank not in (0, 1, HASH_STATE_BANK, ARRAY_REG_BANK):
                raise InvalidInstruction(f"{self.text()}: no bank {a.bank}")
            if not 0 <= a.lo < a.hi <= limit:
                raise InvalidInstruction(f"{self.text()}: address range [{a.lo}, {a.hi}) outside bank {a.bank}")
        oc = self.opcode
        if oc in (Opcode.HIA, Opcode.HOS):
            if self.variant is None:
                raise InvalidInstruction(f"{self.text()}: hash instruction without a SHAKE variant")
            if self.length < 0 or (oc is Opcode.HOS and self.length == 0):
                raise InvalidInstruction(f"{self.text()}: bad length {self.length}")
        if oc is Opcode.HOS and self.op not in HOS_OPS:
            raise InvalidInstruction(f"{self.text()}: unknown squeeze target {self.op!r}")
        if oc is Opcode.MBR and self.op not in MBR_OPS:
            raise InvalidInstruction(f"{self.text()}: unknown read kind {self.op!r}")
        if oc is Opcode.MUL:
            if self.mode is None or self.op not in MUL_OPS:
                raise InvalidInstruction(f"{self.text()}: MUL needs a mode and a known operation")
            if self.mode is not MulMode.ADD and (self.length <= 0 or self.length % 4):
                raise InvalidInstruction(f"{self.text()}: phase length must be a positive multiple of 4")

    def text(self) -> str:
        parts = [self.opcode.value.ljust(4)]
        if self.mode is not None:
            parts.append(self.mode.value)
        if self.op:
            parts.append(self.op)
        if self.index:
            parts.append("[" + ",".join(map(str, self.index)) + "]")
        if self.length:
            parts.append(f"len={self.length}")
        if self.variant is not None:
            parts.append(self.variant.name.lower())
        if self.sources:
            parts.append("src=" + ",".join(self.sources))
        if self.dests:
            parts.append("dst=" + ",".join(self.dests))
        return " ".join(parts)


def memory_collision(a: Instruction, b: Instruction) -> bool:
    """True if the two touch overlapping ranges and at least one of them writes."""
    for x in a.accesses:
        for y in b.accesses:
            if (x.write or y.write) and x.overlaps(y):
                return True
    return False


def detect_conflict(a: Instruction, b: Instruction) -> Conflict:
    """Serialize on a shared functional unit or a colliding memory range, else run in parallel."""
    if a.units & b.units or memory_collision(a, b):
        return Conflict.SERIALIZE
    return Conflict.PARALLEL


def disassemble(program) -> str:
    return "\n".join(f"{i:5d}  {ins.text()}" for i, ins in enumerate(program))
