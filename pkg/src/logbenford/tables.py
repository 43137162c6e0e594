"""Reproduction of the two published leading-digit tables for primes."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .density import run_density
from .digits import DigitString, expected_density
from .sieve import PrimeCache
from .subsets import All, APResidue, SubsetSpec, theoretical_delta

MODES = ("loglog", "mertens")


@dataclass(frozen=True)
class PublishedTable:
    id: str
    title: str
    spec: SubsetSpec
    checkpoints: tuple[int, ...]
    cells: dict[int, tuple[float, ...]]  # leading digit -> values at checkpoints
    expected: dict[int, float]


EX14A = PublishedTable(
    id="ex14a",
    title="primes p = 1 mod 5 with leading digit 1, base 10",
    spec=APResidue(1, 5),
    checkpoints=(100_000, 500_000, 1_000_000, 1_500_000, 2_000_000),
    cells={1: (0.0683, 0.0705, 0.0691, 0.0711, 0.0724)},
    expected={1: 0.0753},
)

EX14B = PublishedTable(
    id="ex14b",
    title="all primes by leading digit d, base 10",
    spec=All(),
    checkpoints=(200_000, 400_000, 600_000, 800_000, 1_000_000),
    cells={
        1: (0.2598, 0.2542, 0.2511, 0.2491, 0.2476),
        2: (0.2931, 0.2995, 0.2959, 0.2935, 0.2917),
        3: (0.2001, 0.2046, 0.2022, 0.2005, 0.1992),
        4: (0.0616, 0.0603, 0.0662, 0.0656, 0.0652),
        5: (0.1194, 0.1168, 0.1207, 0.1197, 0.1190),
        6: (0.0351, 0.0343, 0.0339, 0.0380, 0.0377),
        7: (0.0912, 0.0893, 0.0882, 0.0913, 0.0907),
        8: (0.0256, 0.0251, 0.0248, 0.0246, 0.0277),
        9: (0.0184, 0.0180, 0.0178, 0.0176, 0.0204),
    },
    expected={
        1: 0.3010, 2: 0.1761, 3: 0.1249, 4: 0.0969, 5: 0.0791,
        6: 0.0669, 7: 0.0579, 8: 0.0511, 9: 0.0457,
    },
)

TABLES = {t.id: t for t in (EX14A, EX14B)}


def truncate4(v: float) -> float:
    return math.floor(v * 10_000) / 10_000


@dataclass(frozen=True)
class Cell:
    d: int
    x: int
    published: float
    loglog: float
    mertens: float

    def value(self, mode: str) -> float:
        return self.loglog if mode == "loglog" else self.mertens

    def truncated_match(self, mode: str) -> bool:
        return abs(truncate4(self.value(mode)) - self.published) < 1e-9

    def deviation(self, mode: str) -> float:
        return abs(self.value(mode) - self.published)


@dataclass(frozen=True)
class TableResult:
    table: PublishedTable
    cells: tuple[Cell, ...]
    expected: dict[int, float]

    def max_deviation(self, mode: str) -> float:
        return max(c.deviation(mode) for c in self.cells)

    def all_truncated(self, mode: str) -> bool:
        return all(c.truncated_match(mode) for c in self.cells)

    @property
    def best_mode(self) -> str:
        """Mode with every cell matching by truncation, else the smallest max deviation."""
        exact = [m for m in MODES if self.all_truncated(m)]
        pool = exact or list(MODES)
        return min(pool, key=self.max_deviation)


def reproduce(table_id: str, cache: PrimeCache | None = None, threads: int = 1) -> TableResult:
    table = TABLES[table_id]
    cells = []
    expected = {}
    for d, printed in table.cells.items():
        ds = DigitString(10, (d,))
        report = run_density(table.spec, ds, table.checkpoints, cache, threads)
        for row, value in zip(report.rows, printed):
            cells.append(Cell(d, row.x, value, row.norm_loglog, row.norm_mertens))
        expected[d] = expected_density(theoretical_delta(table.spec), ds)
    return TableResult(table, tuple(cells), expected)
