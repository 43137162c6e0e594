import math
from fractions import Fraction

import numpy as np
import pytest

from logbenford.density import (
    INTEGERS,
    accumulate,
    fit_line,
    integer_leading_densities,
    mertens_total,
    natural_density_ratio,
    oscillation_scan,
    run_density,
)
from logbenford.digits import DigitString, parse_digit_string
from logbenford.sieve import PrimeCache, indexed_primes
from logbenford.subsets import (
    All,
    APResidue,
    IndexMod,
    PolyIrred,
    QuadIdeals,
    SubsetMismatchError,
    norm_batches,
    quad_norm_stream,
)
from logbenford.summation import CompensatedSum

from oracles import exact_sum, leading_digits, primes_td

ONE = parse_digit_string("1", 10)


@pytest.fixture(scope="module")
def cache():
    return PrimeCache.build(2_000_000)


def test_compensated_sum_beats_naive():
    acc = CompensatedSum()
    for v in [1.0, 1e100, 1.0, -1e100]:
        acc.add(v)
    assert acc.value == 2.0


def test_compensated_merge_order():
    a, b = CompensatedSum(), CompensatedSum()
    a.add_many([0.1] * 10)
    b.add_many([0.2] * 10)
    a.merge(b)
    assert a.value == pytest.approx(3.0, abs=1e-15)


def test_accumulate_small_example():
    rep = run_density(All(), ONE, [20])
    row = rep.rows[0]
    # 1/11 + 1/13 + 1/17 + 1/19 = 12900/46189
    assert row.count == 4
    assert row.raw_sum == pytest.approx(12900 / 46189, abs=1e-15)
    assert row.raw_sum == pytest.approx(0.279287276, abs=1e-9)
    assert row.norm_loglog == pytest.approx(row.raw_sum / math.log(math.log(20)), abs=1e-12)
    assert row.norm_mertens == pytest.approx(row.raw_sum / (1 / 2 + 1 / 3 + 1 / 5 + 1 / 7 + 1 / 11 + 1 / 13 + 1 / 17 + 1 / 19))


def test_accumulate_published_points(cache):
    rep = run_density(APResidue(1, 5), ONE, [100_000], cache)
    assert rep.rows[0].norm_loglog == pytest.approx(0.0683, abs=1e-4)
    rep = run_density(All(), ONE, [1_000_000], cache)
    assert rep.rows[0].norm_loglog == pytest.approx(0.2476, abs=1e-4)


def test_element_streams_agree_with_batches(cache):
    cps = [1000, 5000, 20_000]
    for spec in (All(), APResidue(2, 7), IndexMod(1, 4), PolyIrred((1, 0, 1))):
        fast = run_density(spec, ONE, cps, cache)
        slow = accumulate(indexed_primes(20_000, cache), spec, ONE, cps, cache)
        for a, b in zip(fast.rows, slow.rows):
            assert a.count == b.count
            assert a.raw_sum == pytest.approx(b.raw_sum, rel=1e-14)
    spec = QuadIdeals(-1)
    fast = run_density(spec, ONE, cps, cache)
    slow = accumulate(quad_norm_stream(-1, 20_000, cache=cache), spec, ONE, cps, cache)
    assert [r.count for r in fast.rows] == [r.count for r in slow.rows]
    assert [r.raw_sum for r in fast.rows] == pytest.approx([r.raw_sum for r in slow.rows], rel=1e-14)


def test_stream_spec_mismatch(cache):
    with pytest.raises(SubsetMismatchError):
        accumulate(quad_norm_stream(-1, 100), All(), ONE, [100])
    with pytest.raises(SubsetMismatchError):
        accumulate(indexed_primes(100), QuadIdeals(-1), ONE, [100])
    with pytest.raises(SubsetMismatchError):
        accumulate(norm_batches(All(), 100, cache), APResidue(1, 5), ONE, [100])


@pytest.mark.parametrize("bad", [[], [2], [10, 10], [100, 50]])
def test_checkpoint_validation(bad):
    with pytest.raises(ValueError):
        run_density(All(), ONE, bad)


def test_rows_monotone_and_normalised(cache):
    cps = [10**3, 10**4, 10**5, 10**6, 2 * 10**6]
    rep = run_density(All(), ONE, cps, cache)
    sums = [r.raw_sum for r in rep.rows]
    counts = [r.count for r in rep.rows]
    assert sums == sorted(sums)
    assert counts == sorted(counts)
    for r in rep.rows:
        assert r.norm_loglog == pytest.approx(r.raw_sum / math.log(math.log(r.x)), abs=1e-12)
    assert rep.lower <= rep.upper


def test_exact_rational_oracle_1e4(cache):
    ps = primes_td(10**4)
    for spec, members in [
        (All(), ps),
        (APResidue(1, 5), [p for p in ps if p % 5 == 1]),
        (IndexMod(2, 3), [p for m, p in enumerate(ps, 1) if m % 3 == 2]),
    ]:
        for d in range(1, 10):
            ds = DigitString(10, (d,))
            want = exact_sum(p for p in members if leading_digits(p, 10, 1) == (d,))
            got = run_density(spec, ds, [10**4], cache).rows[0].raw_sum
            assert abs(Fraction(got) - want) <= Fraction(1, 10**13)


def test_digit_class_additivity(cache):
    for spec in (All(), APResidue(3, 10), QuadIdeals(-1)):
        for x in (10**5, 10**6):
            parts = math.fsum(run_density(spec, DigitString(10, (d,)), [x], cache).rows[0].raw_sum for d in range(1, 10))
            whole = run_density(spec, parse_digit_string("1", 2), [x], cache).rows[0].raw_sum
            assert parts == pytest.approx(whole, abs=1e-12)


def test_leading_one_sawtooth(cache):
    # the normalized sum climbs across [10^k, 2*10^k) and sags over the rest of the decade
    xs = [10**4, 2 * 10**4, 10**5, 2 * 10**5, 10**6, 2 * 10**6]
    vals = [r.norm_loglog for r in run_density(All(), ONE, xs, cache).rows]
    for i in range(0, len(vals) - 1, 2):
        assert vals[i + 1] > vals[i]
    for i in range(1, len(vals) - 1, 2):
        assert vals[i + 1] < vals[i]


def test_threads_do_not_change_results(cache):
    cps = [10**4, 10**5, 10**6]
    for spec in (All(), APResidue(1, 5), IndexMod(1, 4), QuadIdeals(-1, "split")):
        one = run_density(spec, ONE, cps, cache, threads=1)
        many = run_density(spec, ONE, cps, cache, threads=6)
        assert one == many


def test_fitted_offset(cache):
    rep = run_density(All(), parse_digit_string("1", 2), [10**3, 10**4, 10**5, 10**6], cache)
    # every prime starts with 1 in binary, so this is Mertens' sum itself
    assert rep.fitted_slope == pytest.approx(1.0, abs=0.02)
    assert rep.fitted_offset == pytest.approx(0.2615, abs=0.02)
    assert run_density(All(), ONE, [100], cache).fitted_offset is None


def test_fit_line_exact():
    slope, intercept = fit_line([1.0, 2.0, 3.0], [5.0, 7.0, 9.0])
    assert slope == pytest.approx(2.0)
    assert intercept == pytest.approx(3.0)


def test_expected_unknown_for_poly_without_delta(cache):
    rep = run_density(PolyIrred((1, 0, 1)), ONE, [1000], cache)
    assert rep.expected is None
    assert run_density(PolyIrred((1, 0, 1), 0.5), ONE, [1000], cache).expected == pytest.approx(0.5 * math.log10(2))


def test_mertens_total():
    assert mertens_total(10) == pytest.approx(247 / 210, abs=1e-15)
    assert mertens_total(2) == 0.5
    assert abs(mertens_total(10**6) - (math.log(math.log(10**6)) + 0.2614972128)) < 0.001


def test_natural_density_ratio(cache):
    assert natural_density_ratio(20, ONE, All(), cache) == 0.5
    assert natural_density_ratio(10, parse_digit_string("9", 10), All(), cache) == 0
    jump = natural_density_ratio(2 * 10**6, ONE, All(), cache) - natural_density_ratio(10**6, ONE, All(), cache)
    assert jump > 0.15


def test_natural_density_ratio_empty_subset(cache):
    # no prime is 0 mod 1... every prime is; use a digit class with no members instead
    assert natural_density_ratio(5, parse_digit_string("7", 10), APResidue(1, 5), cache) == 0.0


def test_integer_leading_densities():
    assert integer_leading_densities(9, ONE)["natural_ratio"] == pytest.approx(1 / 9)
    assert integer_leading_densities(2 * 10**6, ONE)["natural_ratio"] == pytest.approx(5 / 9, abs=0.01)
    for x in (1, 7, 19, 123, 10**4 + 5):
        natural = sum(1 for n in range(1, x + 1) if str(n)[0] == "1") / x
        logsum = math.fsum(1 / n for n in range(1, x + 1) if str(n)[0] == "1")
        got = integer_leading_densities(x, ONE)
        assert got["natural_ratio"] == natural
        if x > 1:
            assert got["log_ratio"] == pytest.approx(logsum / math.log(x), rel=1e-14)


def test_integer_log_ratio_converges_slowly():
    # error is about (1 - ln 2 + ...) / ln x: still ~0.024 high at 10^6
    values = [integer_leading_densities(10**k - 1, ONE)["log_ratio"] for k in (3, 4, 5, 6)]
    gaps = [v - math.log10(2) for v in values]
    assert all(g > 0 for g in gaps)
    assert gaps == sorted(gaps, reverse=True)


def test_oscillation_scan(cache):
    xs = sorted(m * 10**k for k in (4, 5, 6) for m in (1, 2))
    stats = oscillation_scan(xs, ONE, All(), cache)
    assert stats.max_ratio > 0.38
    assert stats.min_ratio < 0.27
    assert all(stats.min_ratio <= r <= stats.max_ratio for r in stats.ratios)
    single = oscillation_scan([1000], ONE, All(), cache)
    assert single.min_ratio == single.max_ratio
    binary = oscillation_scan([10, 100, 1000], parse_digit_string("1", 2), All(), cache)
    assert binary.ratios == (1.0, 1.0, 1.0)


def test_oscillation_integers_boundaries():
    stats = oscillation_scan([9, 99, 999, 9999], ONE, INTEGERS)
    assert all(r == pytest.approx(1 / 9, abs=1e-15) for r in stats.ratios)
    for k in range(0, 6):
        x = 9 * 10**k
        assert oscillation_scan([x], ONE, INTEGERS).ratios[0] == ((10 ** (k + 1) - 1) // 9) / x


def test_ideal_ratios_weight_multiplicity(cache):
    # norms <= 13 in Z[i]: 2, 5, 5, 9, 13, 13 -> one of six starts with 9
    stats = oscillation_scan([13], parse_digit_string("9", 10), QuadIdeals(-1), cache)
    assert stats.ratios[0] == pytest.approx(1 / 6)
