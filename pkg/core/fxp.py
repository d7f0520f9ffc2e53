"""
Bit-exact Q4.27 fixed-point arithmetic.

A word is a 32-bit two's-complement integer (1 sign, 4 integer and 27
fraction bits) whose value is raw / 2**27. The raw-level kernels operate on
plain Python ints so the integrator can run without allocating objects;
the Fx32 value type wraps a raw word for API users and golden files.
"""

import math
from dataclasses import dataclass
from enum import Enum

from .errors import FixedPointOverflow, ValidationError

FRAC_BITS = 27
WORD_BITS = 32
SCALE = 1 << FRAC_BITS
RAW_MIN = -(1 << (WORD_BITS - 1))
RAW_MAX = (1 << (WORD_BITS - 1)) - 1
WORD_MASK = (1 << WORD_BITS) - 1

# Largest and smallest representable reals
MAX_REAL = RAW_MAX / SCALE
MIN_REAL = RAW_MIN / SCALE
RESOLUTION = 1.0 / SCALE


class OverflowPolicy(str, Enum):
    """How an out-of-range raw result is resolved"""

    WRAP = "wrap"
    SATURATE = "saturate"
    TRAP = "trap"


def resolve_raw(raw: int, policy: OverflowPolicy, operation: str = "resolve") -> int:
    """Bring an unbounded integer result back into the 32-bit word range"""
    if RAW_MIN <= raw <= RAW_MAX:
        return raw
    if policy is OverflowPolicy.WRAP:
        return ((raw - RAW_MIN) & WORD_MASK) + RAW_MIN
    if policy is OverflowPolicy.SATURATE:
        return RAW_MAX if raw > 0 else RAW_MIN
    raise FixedPointOverflow(operation, raw)


def from_real_raw(value: float, policy: OverflowPolicy = OverflowPolicy.WRAP) -> int:
    """Convert a real to a raw word, rounding half to even"""
    if not math.isfinite(value):
        raise ValidationError(f"Cannot convert non-finite value {value} to fixed point")
    if policy is OverflowPolicy.TRAP and abs(value) >= 16:
        raise FixedPointOverflow("from_real", int(value * SCALE))
    # Scaling by a power of two is exact, so round() sees the true product.
    return resolve_raw(round(value * SCALE), policy, "from_real")


def add_raw(a: int, b: int, policy: OverflowPolicy = OverflowPolicy.WRAP) -> int:
    return resolve_raw(a + b, policy, "add")


def sub_raw(a: int, b: int, policy: OverflowPolicy = OverflowPolicy.WRAP) -> int:
    return resolve_raw(a - b, policy, "sub")


def mul_raw(a: int, b: int, policy: OverflowPolicy = OverflowPolicy.WRAP) -> int:
    """Full product, arithmetic shift right by 27 (floor), then resolve"""
    return resolve_raw((a * b) >> FRAC_BITS, policy, "mul")


def neg_raw(a: int, policy: OverflowPolicy = OverflowPolicy.WRAP) -> int:
    return resolve_raw(-a, policy, "neg")


def half_raw(a: int) -> int:
    # Never overflows; floor semantics on odd negative words.
    return a >> 1


def raw_to_hex(raw: int) -> str:
    """8-digit two's-complement hexadecimal of a raw word"""
    return f"{raw & WORD_MASK:08X}"


@dataclass(frozen=True, slots=True)
class Fx32:
    """Q4.27 fixed-point scalar"""

    raw: int

    def __post_init__(self):
        if not isinstance(self.raw, int) or not RAW_MIN <= self.raw <= RAW_MAX:
            raise ValidationError(f"Raw word {self.raw!r} outside the 32-bit range")

    @classmethod
    def from_raw(cls, raw: int) -> "Fx32":
        return cls(raw)

    @classmethod
    def from_real(
        cls, value: float, policy: OverflowPolicy = OverflowPolicy.WRAP
    ) -> "Fx32":
        return cls(from_real_raw(value, policy))

    def to_raw(self) -> int:
        return self.raw

    def to_real(self) -> float:
        return self.raw / SCALE

    def hex(self) -> str:
        return raw_to_hex(self.raw)

    def __int__(self) -> int:
        return self.raw

    def __float__(self) -> float:
        return self.to_real()

    def __str__(self) -> str:
        return str(self.raw)

    def __add__(self, other: "Fx32") -> "Fx32":
        return add(self, other)

    def __sub__(self, other: "Fx32") -> "Fx32":
        return sub(self, other)

    def __mul__(self, other: "Fx32") -> "Fx32":
        return mul(self, other)

    def __neg__(self) -> "Fx32":
        return neg(self)


ZERO = Fx32(0)
ONE = Fx32(SCALE)


def from_real(value: float, policy: OverflowPolicy = OverflowPolicy.WRAP) -> Fx32:
    return Fx32.from_real(value, policy)


def add(a: Fx32, b: Fx32, policy: OverflowPolicy = OverflowPolicy.WRAP) -> Fx32:
    return Fx32(add_raw(a.raw, b.raw, policy))


def sub(a: Fx32, b: Fx32, policy: OverflowPolicy = OverflowPolicy.WRAP) -> Fx32:
    return Fx32(sub_raw(a.raw, b.raw, policy))


def mul(a: Fx32, b: Fx32, policy: OverflowPolicy = OverflowPolicy.WRAP) -> Fx32:
    return Fx32(mul_raw(a.raw, b.raw, policy))


def neg(a: Fx32, policy: OverflowPolicy = OverflowPolicy.WRAP) -> Fx32:
    return Fx32(neg_raw(a.raw, policy))


def half(a: Fx32) -> Fx32:
    return Fx32(half_raw(a.raw))
