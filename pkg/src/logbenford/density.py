"""Checkpointed logarithmic sums over leading-digit classes, and natural-density ratios."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .digits import DigitString, begins_with, begins_with_mask, expected_density
from .sieve import IndexedPrime, PrimeCache, shared_cache
from .subsets import (
    NormBatch,
    NormEvent,
    QuadIdeals,
    SubsetMismatchError,
    SubsetSpec,
    membership,
    norm_batches,
    theoretical_delta,
)
from .summation import CompensatedSum

INTEGERS = "integers"

StreamItem = Union[NormBatch, NormEvent, IndexedPrime]


@dataclass(frozen=True)
class DensityRow:
    x: int
    count: int
    raw_sum: float
    norm_loglog: float
    norm_mertens: float


@dataclass(frozen=True)
class DensityReport:
    spec: SubsetSpec
    ds: DigitString
    rows: tuple[DensityRow, ...]
    expected: float | None
    fitted_slope: float | None
    fitted_offset: float | None

    @property
    def upper(self) -> float:
        """Largest normalised value seen (finite-x stand-in for the limsup)."""
        return max(r.norm_loglog for r in self.rows)

    @property
    def lower(self) -> float:
        return min(r.norm_loglog for r in self.rows)


@dataclass(frozen=True)
class OscillationStats:
    x_values: tuple[int, ...]
    ratios: tuple[float, ...]
    min_ratio: float
    max_ratio: float


def _check_checkpoints(checkpoints: Sequence[int]) -> list[int]:
    cps = [int(c) for c in checkpoints]
    if not cps:
        raise ValueError("at least one checkpoint is required")
    if any(c < 3 for c in cps):
        raise ValueError("checkpoints must be >= 3")
    if any(b <= a for a, b in zip(cps, cps[1:])):
        raise ValueError("checkpoints must be strictly ascending")
    return cps


def mertens_totals(checkpoints: Sequence[int], cache: PrimeCache | None = None) -> list[float]:
    """Compensated sum of 1/p over primes p <= x, for each ascending x."""
    xs = list(checkpoints)
    if not xs:
        return []
    top = max(xs)
    if cache is None or cache.limit < top:
        cache = shared_cache(max(top, 2))
    primes = cache.primes(top)
    cuts = np.searchsorted(primes, xs, side="right").tolist()
    acc = CompensatedSum()
    out, start = [], 0
    for stop in cuts:
        acc.add_many((1.0 / primes[start:stop]).tolist())
        out.append(acc.value)
        start = stop
    return out


def mertens_total(x: int, cache: PrimeCache | None = None) -> float:
    if x < 2:
        return 0.0
    return mertens_totals([x], cache)[0]


def fit_line(xs: Sequence[float], ys: Sequence[float]) -> tuple[float, float]:
    """Ordinary least squares y = slope * x + intercept."""
    n = len(xs)
    mx = math.fsum(xs) / n
    my = math.fsum(ys) / n
    sxx = math.fsum((x - mx) ** 2 for x in xs)
    sxy = math.fsum((x - mx) * (y - my) for x, y in zip(xs, ys))
    slope = sxy / sxx
    return slope, my - slope * mx


def accumulate(
    stream: Iterable[StreamItem],
    spec: SubsetSpec,
    ds: DigitString,
    checkpoints: Sequence[int],
    cache: PrimeCache | None = None,
) -> DensityReport:
    """Single pass over ``stream`` recording sum(multiplicity / N) for members starting with ``ds``.

    ``stream`` may yield pre-filtered :class:`NormBatch` objects (the fast path),
    :class:`IndexedPrime` witnesses (tested with :func:`membership`), or
    :class:`NormEvent` items from :func:`quad_norm_stream`.  Items must arrive in
    ascending norm order.
    """
    cps = _check_checkpoints(checkpoints)
    acc = CompensatedSum()
    count = 0
    sums: list[tuple[float, int]] = []

    def record_below(norm: int) -> None:
        while len(sums) < len(cps) and cps[len(sums)] < norm:
            sums.append((acc.value, count))

    for item in stream:
        if isinstance(item, NormBatch):
            if item.spec != spec:
                raise SubsetMismatchError(f"batch for {item.spec} fed to report for {spec}")
            keep = begins_with_mask(item.norms, ds)
            norms = item.norms[keep]
            weights = item.weights[keep]
            start = 0
            while len(sums) < len(cps):
                stop = int(np.searchsorted(norms, cps[len(sums)], side="right"))
                if stop == norms.size:
                    break
                acc.add_many((weights[start:stop] / norms[start:stop]).tolist())
                count += int(weights[start:stop].sum())
                start = stop
                sums.append((acc.value, count))
            acc.add_many((weights[start:] / norms[start:]).tolist())
            count += int(weights[start:].sum())
            continue
        if isinstance(item, IndexedPrime):
            norm, mult = item.p, 1
            member = membership(spec, item)
        elif isinstance(item, NormEvent):
            if not isinstance(spec, QuadIdeals):
                raise SubsetMismatchError(f"ideal norm events fed to report for {spec}")
            norm, mult, member = item.norm, item.multiplicity, True
        else:
            raise TypeError(f"unsupported stream item {item!r}")
        record_below(norm)
        if member and begins_with(norm, ds):
            acc.add(mult / norm)
            count += mult
    while len(sums) < len(cps):
        sums.append((acc.value, count))

    mertens = mertens_totals(cps, cache)
    rows = tuple(
        DensityRow(x, c, s, s / math.log(math.log(x)), s / m)
        for x, (s, c), m in zip(cps, sums, mertens)
    )
    delta = theoretical_delta(spec)
    expected = None if delta is None else expected_density(delta, ds)
    slope = offset = None
    tail = rows[len(rows) // 2 :]
    if len(tail) >= 2:
        slope, offset = fit_line([math.log(math.log(r.x)) for r in tail], [r.raw_sum for r in tail])
    return DensityReport(spec, ds, rows, expected, slope, offset)


def run_density(
    spec: SubsetSpec,
    ds: DigitString,
    checkpoints: Sequence[int],
    cache: PrimeCache | None = None,
    threads: int = 1,
) -> DensityReport:
    cps = _check_checkpoints(checkpoints)
    limit = cps[-1]
    if cache is None or cache.limit < limit:
        cache = shared_cache(limit)
    return accumulate(norm_batches(spec, limit, cache, threads), spec, ds, cps, cache)


def _member_arrays(spec: SubsetSpec, x: int, cache: PrimeCache | None) -> tuple[np.ndarray, np.ndarray]:
    batches = list(norm_batches(spec, x, cache))
    norms = np.concatenate([b.norms for b in batches])
    weights = np.concatenate([b.weights for b in batches])
    return norms, weights


def natural_density_ratio(
    x: int, ds: DigitString, spec: SubsetSpec, cache: PrimeCache | None = None
) -> float:
    """Share of members <= x whose norm starts with ``ds``; 0 when there are none."""
    return oscillation_scan([x], ds, spec, cache).ratios[0]


def _integer_prefix_count(x: int, ds: DigitString) -> int:
    """#{1 <= n <= x : n starts with ds}, exactly."""
    S, b, total, scale = ds.value, ds.base, 0, 1
    while S * scale <= x:
        total += min(x, (S + 1) * scale - 1) - S * scale + 1
        scale *= b
    return total


def integer_leading_densities(x: int, ds: DigitString) -> dict[str, float]:
    if x < 1:
        raise ValueError("x must be >= 1")
    S, b, scale = ds.value, ds.base, 1
    acc = CompensatedSum()
    while S * scale <= x:
        hi = min(x, (S + 1) * scale - 1)
        acc.add_many((1.0 / np.arange(S * scale, hi + 1, dtype=np.float64)).tolist())
        scale *= b
    natural = _integer_prefix_count(x, ds) / x
    log_ratio = acc.value / math.log(x) if x > 1 else 0.0
    return {"natural_ratio": natural, "log_ratio": log_ratio}


def oscillation_scan(
    x_values: Sequence[int],
    ds: DigitString,
    spec: SubsetSpec | str,
    cache: PrimeCache | None = None,
) -> OscillationStats:
    """Natural ratios pi_{b,S}(x) / pi(x) at each x (``spec="integers"`` uses all n <= x)."""
    xs = [int(v) for v in x_values]
    if not xs:
        raise ValueError("x_values must be nonempty")
    if any(b < a for a, b in zip(xs, xs[1:])):
        raise ValueError("x_values must be ascending")
    if spec == INTEGERS:
        ratios = [_integer_prefix_count(x, ds) / x if x >= 1 else 0.0 for x in xs]
    else:
        norms, weights = _member_arrays(spec, max(xs[-1], 2), cache)
        hit = np.where(begins_with_mask(norms, ds), weights, 0)
        total_cum = np.concatenate([[0], np.cumsum(weights)])
        hit_cum = np.concatenate([[0], np.cumsum(hit)])
        pos = np.searchsorted(norms, xs, side="right")
        ratios = []
        for k in pos.tolist():
            tot, num = int(total_cum[k]), int(hit_cum[k])
            ratios.append(num / tot if tot else 0.0)
    return OscillationStats(tuple(xs), tuple(ratios), min(ratios), max(ratios))
