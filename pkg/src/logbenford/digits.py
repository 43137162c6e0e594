"""Leading-digit strings in base b and exact prefix tests."""
from __future__ import annotations

import math
import string
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

ALPHABET = string.digits + string.ascii_lowercase


class DigitParseError(ValueError):
    pass


class EmptyDigitStringError(DigitParseError):
    pass


class LeadingZeroError(DigitParseError):
    pass


class InvalidDigitError(DigitParseError):
    pass


class BaseError(DigitParseError):
    pass


@dataclass(frozen=True)
class DigitString:
    """Digits a_1 ... a_m of a base-``base`` prefix, most significant first."""

    base: int
    digits: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.base < 2:
            raise BaseError(f"base must be >= 2, got {self.base}")
        if not self.digits:
            raise EmptyDigitStringError("digit string is empty")
        if self.digits[0] == 0:
            raise LeadingZeroError("leading digit must be nonzero")
        for a in self.digits:
            if not 0 <= a < self.base:
                raise InvalidDigitError(f"digit {a} out of range for base {self.base}")

    @classmethod
    def from_value(cls, value: int, base: int) -> "DigitString":
        if base < 2:
            raise BaseError(f"base must be >= 2, got {base}")
        if value < 1:
            raise LeadingZeroError(f"prefix value must be positive, got {value}")
        out = []
        while value:
            value, r = divmod(value, base)
            out.append(r)
        return cls(base, tuple(reversed(out)))

    @property
    def length(self) -> int:
        return len(self.digits)

    @property
    def value(self) -> int:
        v = 0
        for a in self.digits:
            v = v * self.base + a
        return v

    def __str__(self) -> str:
        if self.base > len(ALPHABET):
            return ":".join(map(str, self.digits))
        return "".join(ALPHABET[a] for a in self.digits)


def parse_digit_string(text: str, base: int) -> DigitString:
    if base < 2:
        raise BaseError(f"base must be >= 2, got {base}")
    if base > len(ALPHABET):
        raise BaseError(f"textual digits only defined up to base {len(ALPHABET)}")
    if not text:
        raise EmptyDigitStringError("digit string is empty")
    digits = []
    for ch in text.lower():
        d = ALPHABET.find(ch)
        if d < 0 or d >= base:
            raise InvalidDigitError(f"{ch!r} is not a base-{base} digit")
        digits.append(d)
    if digits[0] == 0:
        raise LeadingZeroError(f"{text!r} has a leading zero")
    return DigitString(base, tuple(digits))


def digit_length(n: int, b: int) -> int:
    """The unique l with b**(l-1) <= n < b**l."""
    if n < 1:
        raise ValueError("n must be positive")
    length, power = 1, b
    while power <= n:
        power *= b
        length += 1
    return length


def begins_with(n: int, ds: DigitString) -> bool:
    shift = digit_length(n, ds.base) - ds.length
    return shift >= 0 and n // ds.base**shift == ds.value


@lru_cache(maxsize=None)
def _powers(b: int) -> np.ndarray:
    out = [1]
    while out[-1] <= (1 << 62) // b:
        out.append(out[-1] * b)
    return np.array(out, dtype=np.int64)


def begins_with_mask(ns: np.ndarray, ds: DigitString) -> np.ndarray:
    """Vectorised :func:`begins_with` for positive int64 arrays; integer ops only."""
    ns = np.asarray(ns, dtype=np.int64)
    pw = _powers(ds.base)
    if ns.size and int(ns.max()) >= int(pw[-1]):
        return np.fromiter((begins_with(int(n), ds) for n in ns), dtype=bool, count=ns.size)
    # number of base-b digits of each n
    lengths = np.searchsorted(pw, ns, side="right")
    shift = lengths - ds.length
    ok = shift >= 0
    out = np.zeros(ns.shape, dtype=bool)
    out[ok] = ns[ok] // pw[shift[ok]] == ds.value
    return out


def expected_density(delta: float, ds: DigitString) -> float:
    """delta * log_b(1 + 1/S)."""
    if delta < 0:
        raise ValueError("delta must be non-negative")
    return delta * math.log1p(1.0 / ds.value) / math.log(ds.base)
