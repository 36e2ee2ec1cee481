"""NIST-style .rsp known-answer files and the AES-256-CTR DRBG that expands their seeds.

The DRBG here only exists to replay KAT files; the KEM itself never draws
randomness on its own.
"""

from __future__ import annotations

import gzip
from dataclasses import dataclass, field
from pathlib import Path

from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes

from . import kem
from .params import ParameterSet, params_for

FIELDS = ("seed", "pk", "sk", "ct", "ss")


class RspParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class NistDrbg:
    """AES-256 CTR_DRBG without derivation function, as used by PQCgenKAT."""

    def __init__(self, entropy: bytes):
        if len(entropy) != 48:
            raise ValueError("DRBG entropy input must be 48 bytes")
        self.key = bytes(32)
        self.v = 0
        self._update(entropy)

    def _blocks(self, count: int) -> bytes:
        enc = Cipher(algorithms.AES(self.key), modes.ECB()).encryptor()
        out = []
        for _ in range(count):
            self.v = (self.v + 1) % (1 << 128)
            out.append(enc.update(self.v.to_bytes(16, "big")))
        return b"".join(out)

    def _update(self, provided: bytes | None) -> None:
        temp = self._blocks(3)
        if provided is not None:
            temp = bytes(a ^ b for a, b in zip(temp, provided))
        self.key = temp[:32]
        self.v = int.from_bytes(temp[32:], "big")

    def random_bytes(self, n: int) -> bytes:
        out = self._blocks(-(-n // 16))[:n]
        self._update(None)
        return out


@dataclass
class KatVector:
    count: int
    seed: bytes
    pk: bytes
    sk: bytes
    ct: bytes
    ss: bytes
    line: int = 0


@dataclass
class KatResult:
    count: int
    mismatches: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.mismatches


def _open_text(path: Path) -> str:
    raw = Path(path).read_bytes()
    if raw[:2] == b"\x1f\x8b":
        raw = gzip.decompress(raw)
    return raw.decode("ascii")


def parse_rsp(text: str) -> list[KatVector]:
    """Parse ``count``-delimited blocks of ``key = hexvalue`` lines."""
    vectors: list[KatVector] = []
    current: dict[str, object] | None = None

    def flush(at_line: int) -> None:
        if current is None:
            return
        missing = [f for f in FIELDS if f not in current]
        if missing:
            raise RspParseError(f"vector count={current['count']} lacks {', '.join(missing)}", at_line)
        vectors.append(KatVector(**current))

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise RspParseError(f"expected 'key = value', got {line[:40]!r}", lineno)
        key, _, value = (part.strip() for part in line.partition("="))
        if key == "count":
            flush(lineno)
            try:
                current = {"count": int(value), "line": lineno}
            except ValueError:
                raise RspParseError(f"bad count {value!r}", lineno) from None
            continue
        if current is None:
            raise RspParseError(f"field {key!r} before any 'count'", lineno)
        if key not in FIELDS:
            continue
        try:
            current[key] = bytes.fromhex(value)
        except ValueError:
            raise RspParseError(f"field {key!r} is not valid hex", lineno) from None
    flush(len(text.splitlines()))
    if not vectors:
        raise RspParseError("no test vectors found")
    return vectors


def load_rsp(path) -> list[KatVector]:
    return parse_rsp(_open_text(Path(path)))


def run_vector(vec: KatVector, p: ParameterSet) -> KatResult:
    drbg = NistDrbg(vec.seed)
    result = KatResult(vec.count)
    try:
        pair = kem.keygen(drbg.random_bytes(p.keygen_randomness_len), p)
        ct, ss = kem.encaps(pair.pk, drbg.random_bytes(p.encaps_randomness_len), p)
        ss_dec = kem.decaps(pair.sk, ct, p)
    except kem.KemLengthError as exc:
        result.mismatches.append(f"error: {exc}")
        return result
    for name, got in (("pk", pair.pk), ("sk", pair.sk), ("ct", ct), ("ss", ss)):
        if got != getattr(vec, name):
            result.mismatches.append(name)
    if ss_dec != vec.ss:
        result.mismatches.append("ss(decaps)")
    return result


def replay(vectors: list[KatVector], level) -> list[KatResult]:
    p = params_for(level)
    return [run_vector(v, p) for v in vectors]


def generate_rsp(level, count: int = 100) -> str:
    """Produce a .rsp document for this implementation (same layout as the official files)."""
    p = params_for(level)
    outer = NistDrbg(bytes(range(48)))
    lines = [f"# {p.name}", ""]
    for c in range(count):
        seed = outer.random_bytes(48)
        drbg = NistDrbg(seed)
        pair = kem.keygen(drbg.random_bytes(p.keygen_randomness_len), p)
        ct, ss = kem.encaps(pair.pk, drbg.random_bytes(p.encaps_randomness_len), p)
        lines += [f"count = {c}", f"seed = {seed.hex().upper()}", f"pk = {pair.pk.hex().upper()}",
                  f"sk = {pair.sk.hex().upper()}", f"ct = {ct.hex().upper()}",
                  f"ss = {ss.hex().upper()}", ""]
    return "\n".join(lines) + "\n"
