"""Numerical checks of the block-sum identity and the Gamma-ratio asymptotic.

All products are evaluated as sums of logarithms; with up to 10^6 factors the
products themselves over- or underflow.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .digits import DigitString, expected_density
from .sieve import PrimeCache, shared_cache
from .subsets import SubsetSpec, norm_batches
from .summation import CompensatedSum


class DomainError(ValueError):
    pass


# Lanczos approximation, g = 7, n = 9 (Godfrey's coefficients).
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _zeta_table(kmax: int) -> list[float]:
    pi2 = math.pi**2
    known = {
        2: pi2 / 6,
        3: 1.2020569031595942,
        4: pi2**2 / 90,
        5: 1.0369277551433699,
        6: pi2**3 / 945,
        7: 1.0083492773819228,
        8: pi2**4 / 9450,
        9: 1.0020083928260822,
        10: pi2**5 / 93555,
    }
    out = [0.0, 0.0]
    for k in range(2, kmax + 1):
        out.append(known.get(k) or math.fsum(n ** -float(k) for n in range(1, 60)))
    return out


_EULER_GAMMA = 0.5772156649015329
_ZETA = _zeta_table(40)
_SERIES_RADIUS = 0.2


def _log_gamma_1p(eps: float) -> float:
    """ln Gamma(1 + eps) by its Taylor series, |eps| <= 0.2."""
    total = -_EULER_GAMMA * eps
    power = -eps
    for k in range(2, len(_ZETA)):
        power *= -eps
        total += _ZETA[k] * power / k
    return total


def _lanczos(x: float) -> float:
    z = x - 1.0
    s = _LANCZOS[0]
    for k in range(1, len(_LANCZOS)):
        s += _LANCZOS[k] / (z + k)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * math.log(t) - t + math.log(s)


def log_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0.

    Lanczos (g=7, 9 terms) away from the zeros at 1 and 2, where a Taylor
    series keeps the error relative rather than absolute; arguments below the
    series window are lifted with Gamma(x) = Gamma(x+1) / x.
    """
    if not x > 0:
        raise DomainError(f"log_gamma needs x > 0, got {x}")
    if abs(x - 1.0) <= _SERIES_RADIUS:
        return _log_gamma_1p(x - 1.0)
    if abs(x - 2.0) <= _SERIES_RADIUS:
        return math.log1p(x - 2.0) + _log_gamma_1p(x - 2.0)
    if x < 1.0:
        return log_gamma(x + 1.0) - math.log(x)
    return _lanczos(x)


def euler_gamma_product(x: float, n: int) -> float:
    """n! n^x / prod_{j=0}^{n} (x + j), built from logarithms."""
    if not x > 0:
        raise DomainError(f"Euler's product needs x > 0, got {x}")
    if n < 1:
        raise ValueError("n must be >= 1")
    j = np.arange(1, n + 1, dtype=np.float64)
    tail = math.fsum(np.log1p(x / j).tolist())
    return math.exp(x * math.log(n) - math.log(x) - tail)


def block_expected(b: int, S: int, t: int, delta: float) -> float:
    """delta * ln(ln((S+1) b^t) / ln(S b^t))."""
    if b < 2 or S < 1 or t < 1:
        raise ValueError("need b >= 2, S >= 1, t >= 1")
    lo = math.log(S) + t * math.log(b)
    hi = math.log(S + 1) + t * math.log(b)
    return delta * math.log(hi / lo)


def block_actual(
    spec: SubsetSpec, b: int, S: int, t: int, cache: PrimeCache | None = None
) -> float:
    """Compensated sum of multiplicity / N over members with S b^t <= N < (S+1) b^t."""
    lo, hi = S * b**t, (S + 1) * b**t
    if cache is None or cache.limit < hi:
        cache = shared_cache(max(hi, 2))
    acc = CompensatedSum()
    for batch in norm_batches(spec, hi - 1, cache):
        if batch.hi <= lo:
            continue
        sel = (batch.norms >= lo) & (batch.norms < hi)
        acc.add_many((batch.weights[sel] / batch.norms[sel]).tolist())
    return acc.value


def _start(S: int) -> int:
    return 1 if S == 1 else 0


def digit_ratio_product(b: int, S: int, n: int) -> float:
    """ln prod_t (log_b(S+1) + t) / (log_b S + t), for t from 0 (or 1 when S = 1) to n."""
    if S < 1:
        raise ValueError("S must be >= 1")
    t0 = _start(S)
    if n < t0:
        raise ValueError(f"n must be >= {t0}")
    lb = math.log(b)
    lo = math.log(S) / lb
    gap = math.log1p(1.0 / S) / lb
    t = np.arange(t0, n + 1, dtype=np.float64)
    return math.fsum(np.log1p(gap / (lo + t)).tolist())


def gamma_asymptote(b: int, S: int, n: int) -> float:
    """ln of Gamma(log_b S) / Gamma(log_b(S+1)) * n^(log_b(1 + 1/S)).

    For S = 1 the Gamma arguments are shifted by one to match the product
    starting at t = 1 (Gamma(0) is a pole).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    lb = math.log(b)
    lo = math.log(S) / lb
    hi = math.log(S + 1) / lb
    shift = _start(S)
    exponent = math.log1p(1.0 / S) / lb
    return log_gamma(lo + shift) - log_gamma(hi + shift) + exponent * math.log(n)


@dataclass(frozen=True)
class AsymptoticCheck:
    b: int
    S: int
    n: int
    lhs_log: float
    rhs_log: float
    exponent: float
    rel_error: float


def asymptotic_check(b: int, S: int, n: int) -> AsymptoticCheck:
    lhs = digit_ratio_product(b, S, n)
    rhs = gamma_asymptote(b, S, n)
    exponent = expected_density(1.0, DigitString.from_value(S, b))
    return AsymptoticCheck(b, S, n, lhs, rhs, exponent, abs(lhs - rhs) / abs(rhs))


def sandwich_limit(b: int, S: int, n: int, m: int, delta: float) -> dict[str, float]:
    """Finite-n versions of the lower and upper bounds on the density.

    lower = delta * ln prod_{t<=n-m-1} / ln ln(S b^n), upper uses n-m factors.
    """
    if n <= m + 1:
        raise ValueError("need n > m + 1")
    denom = math.log(math.log(S) + n * math.log(b))
    if delta == 0:
        return {"lower": 0.0, "upper": 0.0}
    lower = delta * digit_ratio_product(b, S, n - m - 1) / denom
    upper = delta * digit_ratio_product(b, S, n - m) / denom
    return {"lower": lower, "upper": upper}
