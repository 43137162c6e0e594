"""Compensated (Neumaier) accumulation with ordered merging."""
from __future__ import annotations

import math
from typing import Iterable


class CompensatedSum:
    __slots__ = ("total", "comp")

    def __init__(self, total: float = 0.0, comp: float = 0.0) -> None:
        self.total = total
        self.comp = comp

    def add(self, x: float) -> None:
        t = self.total + x
        if abs(self.total) >= abs(x):
            self.comp += (self.total - t) + x
        else:
            self.comp += (x - t) + self.total
        self.total = t

    def add_many(self, values: Iterable[float]) -> None:
        # fsum is correctly rounded, so a chunk costs one rounding at most
        self.add(math.fsum(values))

    def merge(self, other: "CompensatedSum") -> None:
        self.add(other.total)
        self.add(other.comp)

    @property
    def value(self) -> float:
        return self.total + self.comp

    def copy(self) -> "CompensatedSum":
        return CompensatedSum(self.total, self.comp)
