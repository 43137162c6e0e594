"""Odd-only segmented sieve of Eratosthenes with a bit-exact disk cache.

Bit ``k`` of a cache bitmap stands for the odd candidate ``2k + 3``; the prime
2 is handled separately.  The file layout is::

    b"BFPC" | version (u32 LE) | limit (u64 LE) | bitmap (LSB-first bytes)

where the bitmap covers the ``(limit - 1) // 2`` candidates ``3, 5, ...`` up
to ``limit`` and any unused trailing bits of the last byte are zero.
"""
from __future__ import annotations

import math
import os
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator

import numpy as np

MAGIC = b"BFPC"
VERSION = 1
DEFAULT_SEGMENT_SIZE = 1 << 16  # odd candidates per segment

_HEADER = struct.Struct("<4sIQ")


class SieveRangeError(ValueError):
    """Invalid interval handed to :func:`sieve_segment`."""


class CacheError(Exception):
    """Base class for cache file problems."""


class CacheHeaderError(CacheError):
    pass


class CacheVersionError(CacheError):
    pass


class CacheLengthError(CacheError):
    """Bitmap length disagrees with the limit recorded in the header."""


class CacheTruncatedError(CacheLengthError):
    pass


@dataclass(frozen=True)
class IndexedPrime:
    m: int
    p: int


def _small_primes(n: int) -> np.ndarray:
    """All primes <= n by a plain (unsegmented) sieve."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.int64)


def _sieve_odd_block(k0: int, k1: int, base: np.ndarray) -> np.ndarray:
    """Primality of the odd candidates 2k+3 for k in [k0, k1)."""
    mask = np.ones(k1 - k0, dtype=bool)
    if k1 <= k0:
        return mask
    n0 = 2 * k0 + 3
    n_last = 2 * (k1 - 1) + 3
    for p in base.tolist():
        if p == 2:
            continue
        pp = p * p
        if pp > n_last:
            break
        first = -(-n0 // p) * p
        if not first & 1:
            first += p
        start = max(pp, first)
        mask[(start - 3) // 2 - k0 :: p] = False
    return mask


def _odd_count(limit: int) -> int:
    return max(0, (limit - 1) // 2)


def sieve_odd_bitmap(
    limit: int, segment_size: int = DEFAULT_SEGMENT_SIZE, threads: int = 1
) -> np.ndarray:
    """Boolean array ``b`` with ``b[k]`` true iff ``2k+3`` is prime, for ``2k+3 <= limit``.

    The result does not depend on ``segment_size`` or ``threads``.
    """
    if segment_size < 1:
        raise ValueError("segment_size must be positive")
    nbits = _odd_count(limit)
    if nbits == 0:
        return np.zeros(0, dtype=bool)
    base = _small_primes(math.isqrt(limit))
    bounds = [(k, min(k + segment_size, nbits)) for k in range(0, nbits, segment_size)]
    if threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda b: _sieve_odd_block(b[0], b[1], base), bounds))
    else:
        parts = [_sieve_odd_block(k0, k1, base) for k0, k1 in bounds]
    return np.concatenate(parts)


def sieve_segment(lo: int, hi: int, max_span: int | None = None) -> np.ndarray:
    """Primality flags for every integer in ``[lo, hi)``; entry ``i`` is for ``lo + i``."""
    if lo < 2 or hi <= lo:
        raise SieveRangeError(f"need 2 <= lo < hi, got lo={lo}, hi={hi}")
    if max_span is not None and hi - lo > max_span:
        raise SieveRangeError(f"span {hi - lo} exceeds segment size {max_span}")
    out = np.zeros(hi - lo, dtype=bool)
    if lo <= 2 < hi:
        out[2 - lo] = True
    first_odd = max(3, lo | 1)
    if first_odd >= hi:
        return out
    k0 = (first_odd - 3) // 2
    k1 = (hi - 1 - 3) // 2 + 1
    base = _small_primes(math.isqrt(hi - 1))
    odd = _sieve_odd_block(k0, k1, base)
    out[first_odd - lo :: 2] = odd[: len(out[first_odd - lo :: 2])]
    return out


@dataclass(frozen=True, eq=False)
class PrimeCache:
    """Sieved primality of all integers in [2, limit]."""

    limit: int
    bitmap: np.ndarray  # bool, one entry per odd candidate
    version: int = VERSION

    def __post_init__(self) -> None:
        if len(self.bitmap) != _odd_count(self.limit):
            raise CacheLengthError(
                f"bitmap has {len(self.bitmap)} bits, limit {self.limit} needs {_odd_count(self.limit)}"
            )
        self.bitmap.flags.writeable = False

    @classmethod
    def build(
        cls, limit: int, segment_size: int = DEFAULT_SEGMENT_SIZE, threads: int = 1
    ) -> "PrimeCache":
        return cls(limit, sieve_odd_bitmap(limit, segment_size, threads))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PrimeCache):
            return NotImplemented
        return (
            self.limit == other.limit
            and self.version == other.version
            and np.array_equal(self.bitmap, other.bitmap)
        )

    def primes(self, x: int | None = None) -> np.ndarray:
        """Ascending int64 array of primes <= min(x, limit)."""
        x = self.limit if x is None else min(x, self.limit)
        if x < 2:
            return np.zeros(0, dtype=np.int64)
        odd = 2 * np.flatnonzero(self.bitmap[: _odd_count(x)]).astype(np.int64) + 3
        return np.concatenate([np.array([2], dtype=np.int64), odd])

    def count(self, x: int) -> int:
        if x > self.limit:
            raise ValueError(f"x={x} beyond cache limit {self.limit}")
        if x < 2:
            return 0
        return 1 + int(np.count_nonzero(self.bitmap[: _odd_count(x)]))

    def is_prime(self, n: int) -> bool:
        if n < 2:
            return False
        if n > self.limit:
            return bool(sieve_segment(n, n + 1)[0])
        if n == 2:
            return True
        return n % 2 == 1 and bool(self.bitmap[(n - 3) // 2])

    def to_bytes(self) -> bytes:
        packed = np.packbits(self.bitmap, bitorder="little").tobytes()
        return _HEADER.pack(MAGIC, self.version, self.limit) + packed

    @classmethod
    def from_bytes(cls, data: bytes) -> "PrimeCache":
        if len(data) < _HEADER.size:
            raise CacheHeaderError("file shorter than header")
        magic, version, limit = _HEADER.unpack_from(data)
        if magic != MAGIC:
            raise CacheHeaderError(f"bad magic {magic!r}")
        if version != VERSION:
            raise CacheVersionError(f"unsupported cache version {version}")
        nbits = _odd_count(limit)
        want = -(-nbits // 8)
        body = data[_HEADER.size :]
        if len(body) < want:
            raise CacheTruncatedError(f"bitmap truncated: {len(body)} of {want} bytes")
        if len(body) > want:
            raise CacheLengthError(f"{len(body) - want} unexpected trailing bytes")
        raw = np.frombuffer(body, dtype=np.uint8)
        bits = np.unpackbits(raw, bitorder="little")
        if bits[nbits:].any():
            raise CacheLengthError("nonzero padding bits after bitmap")
        return cls(limit, bits[:nbits].astype(bool), version)


def cache_store(cache: PrimeCache, destination: str | os.PathLike) -> None:
    tmp = f"{os.fspath(destination)}.tmp"
    with open(tmp, "wb") as fh:
        fh.write(cache.to_bytes())
    os.replace(tmp, destination)


def cache_load(source: str | os.PathLike) -> PrimeCache:
    with open(source, "rb") as fh:
        return PrimeCache.from_bytes(fh.read())


_shared: PrimeCache | None = None


def shared_cache(limit: int) -> PrimeCache:
    """In-process cache covering at least ``limit``, grown on demand."""
    global _shared
    if _shared is None or _shared.limit < limit:
        _shared = PrimeCache.build(max(limit, 1000))
    return _shared


def _resolve(cache: PrimeCache | None, x: int) -> PrimeCache:
    if cache is not None and cache.limit >= x:
        return cache
    return shared_cache(x)


def primes_up_to(x: int, cache: PrimeCache | None = None) -> Iterator[int]:
    if x < 2:
        return iter(())
    return iter(_resolve(cache, x).primes(x).tolist())


def prime_count(x: int, cache: PrimeCache | None = None) -> int:
    if x < 2:
        return 0
    return _resolve(cache, x).count(x)


def indexed_primes(x: int, cache: PrimeCache | None = None) -> Iterator[IndexedPrime]:
    for m, p in enumerate(primes_up_to(x, cache), start=1):
        yield IndexedPrime(m, p)
