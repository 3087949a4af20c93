"""Partitions and the exact scalars attached to them."""

from __future__ import annotations

import math
from collections import Counter
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable, Iterable

from .errors import ArgumentError, DomainError

__all__ = [
    "ExactScalar",
    "Partition",
    "enumerate_partitions",
    "z_of",
    "hook_lengths",
    "dim_over_dfact",
    "dimension",
    "pochhammer",
    "pochhammer_lambda",
    "content_product",
    "format_fraction",
]

# Arbitrary-precision reduced rationals; the stdlib type already normalizes sign and gcd.
ExactScalar = Fraction


class Partition(tuple):
    """Weakly decreasing tuple of positive parts. Zero parts are dropped on construction."""

    def __new__(cls, parts: Iterable[int] = ()) -> "Partition":
        items = [int(p) for p in parts]
        if any(p < 0 for p in items):
            raise ArgumentError(f"negative part in {items}")
        items = [p for p in items if p > 0]
        if any(items[i] < items[i + 1] for i in range(len(items) - 1)):
            raise ArgumentError(f"parts must be weakly decreasing: {items}")
        return super().__new__(cls, items)

    @classmethod
    def from_unsorted(cls, parts: Iterable[int]) -> "Partition":
        return cls(sorted((int(p) for p in parts), reverse=True))

    @classmethod
    def parse(cls, text: str) -> "Partition":
        """Parse "4,4,1"; "0" or "" is the empty partition."""
        text = text.strip()
        if text in ("", "0", "()", "[]"):
            return cls()
        try:
            parts = [int(t) for t in text.strip("()[]").split(",") if t.strip()]
        except ValueError as exc:
            raise ArgumentError(f"bad partition {text!r}") from exc
        return cls.from_unsorted(parts)

    @property
    def parts(self) -> tuple[int, ...]:
        return tuple(self)

    @property
    def weight(self) -> int:
        return sum(self)

    @property
    def length(self) -> int:
        return len(self)

    def conjugate(self) -> "Partition":
        if not self:
            return Partition()
        return Partition(sum(1 for p in self if p > j) for j in range(self[0]))

    def multiplicities(self) -> dict[int, int]:
        return dict(Counter(self))

    def padded(self, n: int) -> tuple[int, ...]:
        if len(self) > n:
            raise ArgumentError(f"{self} has more than {n} parts")
        return tuple(self) + (0,) * (n - len(self))

    def shifted(self, alpha: int, n: int) -> "Partition":
        """Add alpha to each of the first n parts (zero padded)."""
        return Partition(p + alpha for p in self.padded(n))

    def cells(self) -> Iterable[tuple[int, int]]:
        """1-based (row, column) pairs."""
        for i, row in enumerate(self, start=1):
            for j in range(1, row + 1):
                yield i, j

    def __str__(self) -> str:
        return ",".join(map(str, self)) if self else "0"

    def __repr__(self) -> str:
        return f"Partition({tuple(self)!r})"


@lru_cache(maxsize=None)
def _partitions(d: int, largest: int) -> tuple[Partition, ...]:
    if d == 0:
        return (Partition(),)
    out: list[Partition] = []
    for first in range(min(d, largest), 0, -1):
        for rest in _partitions(d - first, first):
            out.append(Partition((first,) + tuple(rest)))
    return tuple(out)


def enumerate_partitions(d: int) -> list[Partition]:
    """All partitions of d in reverse-lexicographic order."""
    if d < 0:
        raise ArgumentError("weight must be nonnegative")
    return list(_partitions(d, d))


def z_of(lam: Partition) -> int:
    out = 1
    for k, m in Counter(lam).items():
        out *= k**m * math.factorial(m)
    return out


def hook_lengths(lam: Partition) -> list[int]:
    conj = Partition(lam).conjugate()
    return [lam[i - 1] - j + conj[j - 1] - i + 1 for i, j in Partition(lam).cells()]


@lru_cache(maxsize=None)
def _dim_over_dfact(lam: tuple[int, ...]) -> Fraction:
    return Fraction(1, math.prod(hook_lengths(Partition(lam))))


def dim_over_dfact(lam: Partition) -> Fraction:
    """dim(lam)/|lam|!, which is also s_lam at p = (1, 0, 0, ...)."""
    return _dim_over_dfact(tuple(lam))


def dimension(lam: Partition) -> int:
    return int(dim_over_dfact(lam) * math.factorial(sum(lam)))


def pochhammer(a: Any, k: int) -> Any:
    """Rising factorial a(a+1)...(a+k-1)."""
    out: Any = 1
    for i in range(k):
        out = out * (a + i)
    return out


def pochhammer_lambda(a: Any, lam: Partition) -> Any:
    """(a)_lam = prod_i (a - i + 1)_{lam_i}."""
    out: Any = 1
    for i, part in enumerate(lam):
        out = out * pochhammer(a - i, part)
    return out


def content_product(r: Callable[[int], Any], n: int, lam: Partition) -> Any:
    """prod over cells (i, j) of r(n + j - i); raises DomainError naming the cell at a pole."""
    out: Any = 1
    for i, j in Partition(lam).cells():
        try:
            value = r(n + j - i)
        except ZeroDivisionError as exc:
            raise DomainError(f"r has a pole at content {n + j - i} (cell {(i, j)})") from exc
        if isinstance(value, (float, complex)) and not math.isfinite(abs(value)):
            raise DomainError(f"r is not finite at content {n + j - i} (cell {(i, j)})")
        out = out * value
    return out


def format_fraction(x: Fraction | int) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
