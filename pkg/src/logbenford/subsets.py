"""Prime and prime-ideal subsets: descriptors, membership and norm streams."""
from __future__ import annotations

import heapq
import math
import re
from dataclasses import dataclass
from typing import Iterator, Union

import numpy as np

from .sieve import IndexedPrime, PrimeCache, shared_cache


class SpecError(ValueError):
    """Invalid subset descriptor."""


class SpecSyntaxError(SpecError):
    pass


class NotCoprimeError(SpecError):
    pass


class ZeroModulusError(SpecError):
    pass


class NotSquarefreeError(SpecError):
    pass


class InvalidFieldError(SpecError):
    pass


class DegreeError(SpecError):
    pass


class DegenerateReductionError(ValueError):
    """The prime divides the leading coefficient."""


class SubsetMismatchError(TypeError):
    """A stream element does not fit the subset kind."""


CLASS_FILTERS = ("all", "split", "inert", "ramified")


@dataclass(frozen=True)
class All:
    def __str__(self) -> str:
        return "all"


@dataclass(frozen=True)
class APResidue:
    a: int
    q: int

    def __post_init__(self) -> None:
        if self.q < 1:
            raise ZeroModulusError(f"modulus must be >= 1, got {self.q}")
        if not 0 <= self.a < self.q:
            raise SpecError(f"residue {self.a} not in [0, {self.q})")
        if math.gcd(self.a, self.q) != 1:
            raise NotCoprimeError(f"gcd({self.a}, {self.q}) != 1")

    def __str__(self) -> str:
        return f"ap:{self.a},{self.q}"


@dataclass(frozen=True)
class PolyIrred:
    coeffs: tuple[int, ...]  # c0 ... cn, constant term first
    user_delta: float | None = None

    def __post_init__(self) -> None:
        if len(self.coeffs) < 2:
            raise DegreeError("polynomial degree must be >= 1")
        if self.coeffs[-1] == 0:
            raise DegreeError("leading coefficient must be nonzero")
        if self.user_delta is not None and self.user_delta < 0:
            raise SpecError("delta must be non-negative")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __str__(self) -> str:
        s = "poly:" + ",".join(map(str, self.coeffs))
        if self.user_delta is not None:
            s += f";delta={self.user_delta!r}"
        return s


@dataclass(frozen=True)
class IndexMod:
    r: int
    t: int

    def __post_init__(self) -> None:
        if self.t < 1:
            raise ZeroModulusError(f"t must be >= 1, got {self.t}")
        if not 0 <= self.r < self.t:
            raise SpecError(f"residue {self.r} not in [0, {self.t})")

    def __str__(self) -> str:
        return f"index:{self.r},{self.t}"


def is_squarefree(n: int) -> bool:
    n = abs(n)
    if n == 0:
        return False
    k = 2
    while k * k <= n:
        if n % (k * k) == 0:
            return False
        if n % k == 0:
            n //= k
        k += 1
    return True


@dataclass(frozen=True)
class QuadIdeals:
    d: int
    class_filter: str = "all"

    def __post_init__(self) -> None:
        if self.d in (0, 1):
            raise InvalidFieldError(f"d={self.d} does not define a quadratic field")
        if not is_squarefree(self.d):
            raise NotSquarefreeError(f"d={self.d} is not squarefree")
        if self.class_filter not in CLASS_FILTERS:
            raise SpecSyntaxError(f"unknown class filter {self.class_filter!r}")

    @property
    def discriminant(self) -> int:
        return self.d if self.d % 4 == 1 else 4 * self.d

    def __str__(self) -> str:
        return f"qfield:{self.d},{self.class_filter}"


SubsetSpec = Union[All, APResidue, PolyIrred, IndexMod, QuadIdeals]

_INT = r"[+-]?\d+"
_INTS = rf"{_INT}(?:,{_INT})*"
_NUM = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_GRAMMAR = [
    ("all", re.compile(r"all")),
    ("ap", re.compile(rf"ap:({_INT}),({_INT})")),
    ("poly", re.compile(rf"poly:({_INTS})(?:;delta=({_NUM}(?:/{_NUM})?))?")),
    ("index", re.compile(rf"index:({_INT}),({_INT})")),
    ("qfield", re.compile(rf"qfield:({_INT})(?:,(all|split|inert|ramified))?")),
]


def _parse_delta(text: str) -> float:
    num, _, den = text.partition("/")
    return float(num) / float(den) if den else float(num)


def parse_subset_spec(text: str) -> SubsetSpec:
    """Parse ``all | ap:a,q | poly:c0,...,cn[;delta=r] | index:r,t | qfield:d[,class]``."""
    s = text.strip().replace(" ", "")
    for kind, pattern in _GRAMMAR:
        m = pattern.fullmatch(s)
        if not m:
            continue
        if kind == "all":
            return All()
        if kind == "ap":
            a, q = int(m[1]), int(m[2])
            if q < 1:
                raise ZeroModulusError(f"modulus must be >= 1, got {q}")
            if math.gcd(a, q) != 1:
                raise NotCoprimeError(f"gcd({a}, {q}) != 1")
            return APResidue(a % q, q)
        if kind == "poly":
            coeffs = tuple(int(c) for c in m[1].split(","))
            delta = _parse_delta(m[2]) if m[2] else None
            return PolyIrred(coeffs, delta)
        if kind == "index":
            r, t = int(m[1]), int(m[2])
            if t < 1:
                raise ZeroModulusError(f"t must be >= 1, got {t}")
            return IndexMod(r % t, t)
        return QuadIdeals(int(m[1]), m[2] or "all")
    raise SpecSyntaxError(f"cannot parse subset spec {text!r}")


def euler_phi(q: int) -> int:
    result, n, p = q, q, 2
    while p * p <= n:
        if n % p == 0:
            while n % p == 0:
                n //= p
            result -= result // p
        p += 1
    if n > 1:
        result -= result // n
    return result


def theoretical_delta(spec: SubsetSpec) -> float | None:
    """Density delta of the subset among all primes/ideals, or None if unknown."""
    if isinstance(spec, All):
        return 1.0
    if isinstance(spec, APResidue):
        return 1.0 / euler_phi(spec.q)
    if isinstance(spec, IndexMod):
        return 1.0 / spec.t
    if isinstance(spec, PolyIrred):
        return spec.user_delta
    if isinstance(spec, QuadIdeals):
        # split primes carry two ideals of norm p; inert/ramified sums converge
        return 1.0 if spec.class_filter in ("all", "split") else 0.0
    raise TypeError(f"not a subset spec: {spec!r}")


def kronecker_symbol(D: int, n: int) -> int:
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        return 1
    if D % 2 == 0 and n % 2 == 0:
        return 0
    k = 1
    v = (n & -n).bit_length() - 1
    n >>= v
    if v % 2 and D % 8 in (3, 5):
        k = -k
    # Jacobi symbol (D | n) for odd n
    a = D % n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                k = -k
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            k = -k
        a %= n
    return k if n == 1 else 0


# -- polynomials over F_p, coefficient lists with the constant term first --

def _trim(f: list[int]) -> list[int]:
    while f and f[-1] == 0:
        f.pop()
    return f


def _poly_mod(f: list[int], g: list[int], p: int) -> list[int]:
    f = _trim([c % p for c in f])
    dg = len(g) - 1
    inv = pow(g[-1], -1, p)
    while len(f) - 1 >= dg:
        c = f[-1] * inv % p
        shift = len(f) - 1 - dg
        for i, gc in enumerate(g):
            f[shift + i] = (f[shift + i] - c * gc) % p
        _trim(f)
    return f


def _poly_gcd(f: list[int], g: list[int], p: int) -> list[int]:
    f = _trim([c % p for c in f])
    g = _trim([c % p for c in g])
    while g:
        f, g = g, _poly_mod(f, g, p)
    return f


def _prime_factors(n: int) -> list[int]:
    out, k = [], 2
    while k * k <= n:
        if n % k == 0:
            out.append(k)
            while n % k == 0:
                n //= k
        k += 1
    if n > 1:
        out.append(n)
    return out


def _mulmod_monic(a: list[int], b: list[int], f: list[int], p: int) -> list[int]:
    """a * b mod (f, p) for dense length-n residues; f monic of degree n."""
    n = len(f) - 1
    prod = [0] * (2 * n - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] += ai * bj
    for k in range(2 * n - 2, n - 1, -1):
        c = prod[k] % p
        if c:
            base = k - n
            for i in range(n):
                prod[base + i] -= c * f[i]
    return [c % p for c in prod[:n]]


def _times_x(a: list[int], f: list[int], p: int) -> list[int]:
    top = a[-1]
    out = [0] + a[:-1]
    if top:
        out = [(c - top * fc) % p for c, fc in zip(out, f)]
    return out


def poly_irreducible_mod_p(coeffs, p: int) -> bool:
    """Rabin's test for f (constant term first) over the field with p elements.

    f of degree n is irreducible iff X^(p^n) = X mod f and
    gcd(X^(p^(n/l)) - X, f) = 1 for each prime l dividing n.
    """
    f = [c % p for c in coeffs]
    if not f or f[-1] == 0:
        raise DegenerateReductionError(f"{p} divides the leading coefficient")
    n = len(f) - 1
    if n == 0:
        return False
    if n == 1:
        return True
    inv = pow(f[-1], -1, p)
    f = [c * inv % p for c in f]
    x = [0, 1] + [0] * (n - 2)
    # X^p by left-to-right square-and-multiply; multiplying by X is a shift
    xp = [1] + [0] * (n - 1)
    for bit in bin(p)[2:]:
        xp = _mulmod_monic(xp, xp, f, p)
        if bit == "1":
            xp = _times_x(xp, f, p)
    # Frobenius is F_p-linear: (sum c_i X^i)^p = sum c_i X^(ip), so tabulate X^(ip)
    cols = [[1] + [0] * (n - 1), xp]
    for _ in range(2, n):
        cols.append(_mulmod_monic(cols[-1], xp, f, p))
    frob = [x, xp]
    for _ in range(2, n + 1):
        h = frob[-1]
        nxt = [0] * n
        for c, col in zip(h, cols):
            if c:
                for i in range(n):
                    nxt[i] += c * col[i]
        frob.append([v % p for v in nxt])
    if frob[n] != x:
        return False
    for ell in _prime_factors(n):
        diff = list(frob[n // ell])
        diff[1] = (diff[1] - 1) % p
        if len(_poly_gcd(f, diff, p)) != 1:
            return False
    return True


def membership(spec: SubsetSpec, witness: IndexedPrime) -> bool:
    if isinstance(spec, All):
        return True
    if isinstance(spec, APResidue):
        return witness.p % spec.q == spec.a
    if isinstance(spec, IndexMod):
        return witness.m % spec.t == spec.r
    if isinstance(spec, PolyIrred):
        # a prime dividing disc(f) cannot pass: irreducible over a finite field implies separable
        try:
            return poly_irreducible_mod_p(spec.coeffs, witness.p)
        except DegenerateReductionError:
            return False
    if isinstance(spec, QuadIdeals):
        raise SubsetMismatchError("quadratic-field subsets use quad_norm_stream, not rational primes")
    raise TypeError(f"not a subset spec: {spec!r}")


@dataclass(frozen=True)
class NormEvent:
    norm: int
    multiplicity: int


def _character_table(D: int) -> np.ndarray:
    """(D|n) as a function of n mod |D|; valid for fundamental discriminants D."""
    m = abs(D)
    return np.array([kronecker_symbol(D, r if r else m) for r in range(m)], dtype=np.int8)


def prime_splitting(d: int, primes: np.ndarray) -> np.ndarray:
    """Kronecker symbol of the discriminant of Q(sqrt d) at each prime."""
    D = QuadIdeals(d).discriminant
    return _character_table(D)[primes % abs(D)]


def quad_norm_arrays(
    d: int, x: int, class_filter: str = "all", cache: PrimeCache | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Norms <= x of prime ideals of Q(sqrt d) in ascending order, with multiplicities."""
    spec = QuadIdeals(d, class_filter)
    if x < 2:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    if cache is None or cache.limit < x:
        cache = shared_cache(x)
    primes = cache.primes(x)
    chi = prime_splitting(spec.d, primes)
    parts_n, parts_w = [], []
    cf = spec.class_filter
    if cf in ("all", "split"):
        sel = primes[chi == 1]
        parts_n.append(sel)
        parts_w.append(np.full(sel.size, 2, dtype=np.int64))
    if cf in ("all", "ramified"):
        sel = primes[chi == 0]
        parts_n.append(sel)
        parts_w.append(np.ones(sel.size, dtype=np.int64))
    if cf in ("all", "inert"):
        sel = primes[(chi == -1) & (primes <= math.isqrt(x))]
        parts_n.append(sel * sel)
        parts_w.append(np.ones(sel.size, dtype=np.int64))
    norms = np.concatenate(parts_n)
    weights = np.concatenate(parts_w)
    order = np.argsort(norms, kind="stable")
    return norms[order], weights[order]


def quad_norm_stream(
    d: int, x: int, class_filter: str = "all", cache: PrimeCache | None = None
) -> Iterator[NormEvent]:
    spec = QuadIdeals(d, class_filter)
    D = spec.discriminant
    if cache is None or cache.limit < x:
        cache = shared_cache(max(x, 2))
    primes = cache.primes(x).tolist()
    cf = spec.class_filter

    def linear() -> Iterator[NormEvent]:
        for p in primes:
            k = kronecker_symbol(D, p)
            if k == 1 and cf in ("all", "split"):
                yield NormEvent(p, 2)
            elif k == 0 and cf in ("all", "ramified"):
                yield NormEvent(p, 1)

    def squares() -> Iterator[NormEvent]:
        if cf not in ("all", "inert"):
            return
        for p in primes:
            if p * p > x:
                return
            if kronecker_symbol(D, p) == -1:
                yield NormEvent(p * p, 1)

    return heapq.merge(linear(), squares(), key=lambda e: e.norm)


@dataclass(frozen=True, eq=False)
class NormBatch:
    """Members of ``spec`` with norms in [lo, hi), ascending, with multiplicities."""

    spec: SubsetSpec
    lo: int
    hi: int
    norms: np.ndarray
    weights: np.ndarray


DEFAULT_BATCH_SPAN = 1 << 17


def _prime_member_mask(spec: SubsetSpec, primes: np.ndarray, first_index: int) -> np.ndarray:
    if isinstance(spec, All):
        return np.ones(primes.size, dtype=bool)
    if isinstance(spec, APResidue):
        return primes % spec.q == spec.a
    if isinstance(spec, IndexMod):
        m = np.arange(first_index, first_index + primes.size, dtype=np.int64)
        return m % spec.t == spec.r
    if isinstance(spec, PolyIrred):
        return np.fromiter(
            (membership(spec, IndexedPrime(0, p)) for p in primes.tolist()),
            dtype=bool,
            count=primes.size,
        )
    raise SubsetMismatchError(f"{spec} is not a subset of the rational primes")


def norm_batches(
    spec: SubsetSpec,
    limit: int,
    cache: PrimeCache | None = None,
    threads: int = 1,
    span: int = DEFAULT_BATCH_SPAN,
) -> Iterator[NormBatch]:
    """Member norms <= limit in fixed norm ranges of width ``span``.

    Batch boundaries depend only on ``limit`` and ``span``, never on ``threads``.
    """
    if cache is None or cache.limit < limit:
        cache = shared_cache(max(limit, 2))
    ranges = [(lo, min(lo + span, limit + 1)) for lo in range(0, limit + 1, span)]
    if isinstance(spec, QuadIdeals):
        norms, weights = quad_norm_arrays(spec.d, limit, spec.class_filter, cache)
        cuts = np.searchsorted(norms, [hi for _, hi in ranges])
        start = 0
        for (lo, hi), stop in zip(ranges, cuts.tolist()):
            yield NormBatch(spec, lo, hi, norms[start:stop], weights[start:stop])
            start = stop
        return
    primes = cache.primes(limit)
    cuts = np.searchsorted(primes, [hi for _, hi in ranges]).tolist()
    starts = [0] + cuts[:-1]

    def work(i: int) -> NormBatch:
        lo, hi = ranges[i]
        chunk = primes[starts[i] : cuts[i]]
        keep = _prime_member_mask(spec, chunk, starts[i] + 1)
        sel = chunk[keep]
        return NormBatch(spec, lo, hi, sel, np.ones(sel.size, dtype=np.int64))

    if threads > 1 and len(ranges) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            yield from pool.map(work, range(len(ranges)))
    else:
        for i in range(len(ranges)):
            yield work(i)
