import random
import struct

import numpy as np
import pytest

from logbenford.sieve import (
    CacheHeaderError,
    CacheLengthError,
    CacheTruncatedError,
    CacheVersionError,
    IndexedPrime,
    PrimeCache,
    SieveRangeError,
    cache_load,
    cache_store,
    indexed_primes,
    prime_count,
    primes_up_to,
    sieve_odd_bitmap,
    sieve_segment,
)

from oracles import is_prime_td, primes_td


def test_segment_small_cases():
    assert (np.flatnonzero(sieve_segment(2, 11)) + 2).tolist() == [2, 3, 5, 7]
    assert (np.flatnonzero(sieve_segment(10, 20)) + 10).tolist() == [11, 13, 17, 19]


def test_segment_count_to_million():
    # frozen from the trial-division oracle
    assert int(sieve_segment(2, 10**6 + 1).sum()) == 78498


@pytest.mark.parametrize("lo,hi", [(2, 3), (3, 4), (4, 5), (97, 98), (1000, 1200), (999_983, 1_000_100)])
def test_segment_matches_trial_division(lo, hi):
    flags = sieve_segment(lo, hi)
    assert flags.tolist() == [is_prime_td(n) for n in range(lo, hi)]


@pytest.mark.parametrize("lo,hi", [(1, 10), (0, 5), (10, 10), (12, 11)])
def test_segment_rejects_bad_range(lo, hi):
    with pytest.raises(SieveRangeError):
        sieve_segment(lo, hi)


def test_segment_span_limit():
    with pytest.raises(SieveRangeError):
        sieve_segment(2, 200, max_span=100)
    assert sieve_segment(2, 102, max_span=100).sum() == 26


def test_primes_up_to_small():
    assert list(primes_up_to(10)) == [2, 3, 5, 7]
    assert list(primes_up_to(2)) == [2]
    assert list(primes_up_to(1)) == []
    assert list(primes_up_to(-5)) == []


def test_primes_up_to_length(cache2m):
    assert sum(1 for _ in primes_up_to(2_000_000, cache2m)) == 148933


def test_primes_match_trial_division_to_1e5():
    ref = primes_td(10**5)
    cache = PrimeCache.build(10**5)
    assert cache.primes().tolist() == ref
    # every prefix x agrees, not only the full range
    for x in random.Random(1).sample(range(10**5), 300) + [0, 1, 2, 3, 4]:
        assert list(primes_up_to(x, cache)) == [p for p in ref if p <= x]


def test_prime_count_values():
    assert prime_count(0) == 0
    assert prime_count(1) == 0
    assert prime_count(10) == 4
    assert prime_count(10**5) == 9592


def test_prime_count_equals_stream_length(cache2m):
    rng = random.Random(7)
    for x in [rng.randrange(10**6) for _ in range(100)]:
        assert prime_count(x, cache2m) == len(list(primes_up_to(x, cache2m)))


def test_bitmap_independent_of_segment_size():
    a = sieve_odd_bitmap(300_001, segment_size=1 << 10)
    b = sieve_odd_bitmap(300_001, segment_size=1 << 16)
    c = sieve_odd_bitmap(300_001, segment_size=1 << 16, threads=4)
    assert np.array_equal(a, b) and np.array_equal(b, c)


def test_bitmap_meaning():
    bits = sieve_odd_bitmap(1000)
    assert len(bits) == (1000 - 1) // 2
    for k, flag in enumerate(bits):
        assert flag == is_prime_td(2 * k + 3)


def test_indexed_primes():
    items = list(indexed_primes(100))
    assert items[0] == IndexedPrime(1, 2)
    assert items[24] == IndexedPrime(25, 97)
    assert [ip.p for ip in items if ip.m % 4 == 1][:3] == [2, 11, 23]


def test_indexed_primes_rank_consistency():
    cache = PrimeCache.build(50_000)
    for ip in indexed_primes(50_000, cache):
        if ip.m % 97 == 0:
            assert prime_count(ip.p, cache) == ip.m


def test_is_prime_beyond_limit_sieves_on_demand():
    cache = PrimeCache.build(100)
    assert cache.is_prime(97)
    assert not cache.is_prime(91)
    assert cache.is_prime(1_000_003)
    assert not cache.is_prime(1_000_001)


# -- cache file --

def test_round_trip_limit_100(tmp_path):
    cache = PrimeCache.build(100)
    path = tmp_path / "p.bfpc"
    cache_store(cache, path)
    loaded = cache_load(path)
    assert loaded == cache
    assert loaded.limit == 100
    assert len(loaded.bitmap) == 49  # candidates 3, 5, ..., 99


def test_file_layout_is_bit_exact(tmp_path):
    cache = PrimeCache.build(30)
    path = tmp_path / "p.bfpc"
    cache_store(cache, path)
    data = path.read_bytes()
    # candidates 3..29 -> 14 bits; primes 3,5,7,11,13,17,19,23,29 at k=0,1,2,4,5,7,8,10,13
    bits = sum(1 << k for k in (0, 1, 2, 4, 5, 7, 8, 10, 13))
    assert data == b"BFPC" + struct.pack("<I", 1) + struct.pack("<Q", 30) + bits.to_bytes(2, "little")


@pytest.mark.parametrize("limit", [0, 1, 2, 3, 17, 18, 19, 1000, 65_537])
def test_round_trip_various(tmp_path, limit):
    cache = PrimeCache.build(limit)
    path = tmp_path / "c.bfpc"
    cache_store(cache, path)
    assert cache_load(path) == cache
    assert len(path.read_bytes()) == 16 + -(-max(0, (limit - 1) // 2) // 8)


def test_load_wrong_magic(tmp_path):
    path = tmp_path / "bad.bfpc"
    path.write_bytes(b"XXXX" + PrimeCache.build(100).to_bytes()[4:])
    with pytest.raises(CacheHeaderError):
        cache_load(path)


def test_load_short_header(tmp_path):
    path = tmp_path / "bad.bfpc"
    path.write_bytes(b"BFPC\x01")
    with pytest.raises(CacheHeaderError):
        cache_load(path)


def test_load_truncated(tmp_path):
    path = tmp_path / "bad.bfpc"
    path.write_bytes(PrimeCache.build(1000).to_bytes()[:-10])
    with pytest.raises(CacheTruncatedError):
        cache_load(path)


def test_load_bad_version(tmp_path):
    data = bytearray(PrimeCache.build(100).to_bytes())
    data[4:8] = struct.pack("<I", 2)
    path = tmp_path / "bad.bfpc"
    path.write_bytes(bytes(data))
    with pytest.raises(CacheVersionError):
        cache_load(path)


def test_load_trailing_bytes(tmp_path):
    path = tmp_path / "bad.bfpc"
    path.write_bytes(PrimeCache.build(100).to_bytes() + b"\x00")
    with pytest.raises(CacheLengthError) as info:
        cache_load(path)
    assert not isinstance(info.value, CacheTruncatedError)


def test_load_nonzero_padding(tmp_path):
    data = bytearray(PrimeCache.build(100).to_bytes())
    data[-1] |= 0x80  # bit 55, past the 49 candidate bits
    path = tmp_path / "bad.bfpc"
    path.write_bytes(bytes(data))
    with pytest.raises(CacheLengthError):
        cache_load(path)


def test_distinct_error_types():
    kinds = {CacheHeaderError, CacheVersionError, CacheTruncatedError}
    assert len(kinds) == 3
