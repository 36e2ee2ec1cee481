"""Parameter sets for FrodoKEM-640/976/1344 (SHAKE variants).

Every level-dependent constant lives here.  CDF tables and byte lengths follow
the standardized (salted) FrodoKEM; the dimension/modulus/encoding values are
the ones printed in the processor's parameter table.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass


class SecurityLevel(enum.Enum):
    FRODO640 = 640
    FRODO976 = 976
    FRODO1344 = 1344

    @classmethod
    def parse(cls, value: "SecurityLevel | int | str") -> "SecurityLevel":
        if isinstance(value, cls):
            return value
        text = str(value).lower().removeprefix("frodo").removeprefix("kem").strip("-_ ")
        try:
            return cls(int(text))
        except ValueError:
            raise ValueError(f"unknown security level {value!r}") from None


class ShakeVariant(enum.Enum):
    SHAKE128 = 128
    SHAKE256 = 256

    @property
    def rate_bytes(self) -> int:
        return 168 if self is ShakeVariant.SHAKE128 else 136


@dataclass(frozen=True)
class ParameterSet:
    level: SecurityLevel
    n: int
    nbar: int
    D: int
    B: int
    d: int
    shake_variant: ShakeVariant
    cdf_table: tuple[int, ...]
    len_seed_a: int
    len_seed_se: int
    len_s: int
    len_z: int
    len_salt: int
    len_k: int
    len_ss: int
    len_pkh: int

    @property
    def q(self) -> int:
        return 1 << self.D

    @property
    def name(self) -> str:
        return f"FrodoKEM-{self.n}-SHAKE"

    @property
    def len_u(self) -> int:
        return self.nbar * self.nbar * self.B // 8

    @property
    def len_b_packed(self) -> int:
        return self.D * self.n * self.nbar // 8

    @property
    def len_c_packed(self) -> int:
        return self.D * self.nbar * self.nbar // 8

    @property
    def len_pk(self) -> int:
        return self.len_seed_a + self.len_b_packed

    @property
    def len_sk(self) -> int:
        return self.len_s + self.len_pk + 2 * self.n * self.nbar + self.len_pkh

    @property
    def len_ct(self) -> int:
        return self.len_b_packed + self.len_c_packed + self.len_salt

    @property
    def keygen_randomness_len(self) -> int:
        return self.len_s + self.len_seed_se + self.len_z

    @property
    def encaps_randomness_len(self) -> int:
        return self.len_u + self.len_salt


def _make(level, n, D, B, d, variant, cdf, lam):
    # lam: security parameter in bytes (16/24/32); seed_SE and salt are 2*lam.
    return ParameterSet(
        level=level, n=n, nbar=8, D=D, B=B, d=d, shake_variant=variant,
        cdf_table=tuple(cdf),
        len_seed_a=16, len_seed_se=2 * lam, len_s=lam, len_z=16,
        len_salt=2 * lam, len_k=lam, len_ss=lam, len_pkh=lam,
    )


_PARAMS = {
    SecurityLevel.FRODO640: _make(
        SecurityLevel.FRODO640, 640, 15, 2, 12, ShakeVariant.SHAKE128,
        (4643, 13363, 20579, 25843, 29227, 31145, 32103, 32525, 32689,
         32745, 32762, 32766, 32767),
        16),
    SecurityLevel.FRODO976: _make(
        SecurityLevel.FRODO976, 976, 16, 3, 10, ShakeVariant.SHAKE256,
        (5638, 15915, 23689, 28571, 31116, 32217, 32613, 32731, 32760,
         32766, 32767),
        24),
    SecurityLevel.FRODO1344: _make(
        SecurityLevel.FRODO1344, 1344, 16, 4, 6, ShakeVariant.SHAKE256,
        (9142, 23462, 30338, 32361, 32725, 32765, 32767),
        32),
}


def params_for(level: SecurityLevel | int | str) -> ParameterSet:
    """Return the immutable parameter set for ``level`` (640, 976, 1344 or enum)."""
    return _PARAMS[SecurityLevel.parse(level)]


ALL_LEVELS = tuple(SecurityLevel)
