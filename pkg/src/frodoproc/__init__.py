"""FrodoKEM (all levels, all phases) and a cycle-approximate model of a FrodoKEM crypto-processor."""

from .kem import decaps, encaps, keygen
from .params import ALL_LEVELS, SecurityLevel, params_for
from .programs import build_program, simulate
from .simulator import CycleReport, Machine

__version__ = "0.1.0"

__all__ = [
    "ALL_LEVELS", "CycleReport", "Machine", "SecurityLevel", "build_program", "decaps", "encaps",
    "keygen", "params_for", "simulate",
]
