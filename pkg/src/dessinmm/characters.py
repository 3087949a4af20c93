"""Symmetric-group characters and Hurwitz numbers."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Sequence

from .errors import ArgumentError, DomainError, ScaleGuardError
from .partitions import (
    Partition,
    dim_over_dfact,
    enumerate_partitions,
    pochhammer_lambda,
    z_of,
)

__all__ = [
    "CharacterTable",
    "character",
    "character_table",
    "character_oracle",
    "phi",
    "hurwitz",
    "hurwitz_weighted",
    "hurwitz_bruteforce",
    "cycle_type",
    "BRUTEFORCE_BOUND",
]

BRUTEFORCE_BOUND = 10**7
ORACLE_MAX_WEIGHT = 6


@lru_cache(maxsize=None)
def _mn(beta: frozenset[int], rest: tuple[int, ...]) -> int:
    # beta is the set of first-column hook numbers (beta numbers) of the current shape
    if not rest:
        return 1
    k, tail = rest[0], rest[1:]
    total = 0
    for b in beta:
        target = b - k
        if target < 0 or target in beta:
            continue
        between = sum(1 for c in beta if target < c < b)
        sign = -1 if between % 2 else 1
        total += sign * _mn((beta - {b}) | {target}, tail)
    return total


def character(lam: Partition, delta: Partition) -> int:
    """chi_lam at the class of cycle type delta, by rim-hook removal."""
    lam, delta = Partition(lam), Partition(delta)
    if lam.weight != delta.weight:
        raise ArgumentError(f"weight mismatch: |{lam}| != |{delta}|")
    ell = len(lam)
    beta = frozenset(part + ell - 1 - i for i, part in enumerate(lam))
    return _mn(beta, tuple(delta))


@dataclass
class CharacterTable:
    d: int
    entries: dict[tuple[Partition, Partition], Fraction] = field(default_factory=dict)

    def __getitem__(self, key: tuple[Partition, Partition]) -> Fraction:
        return self.entries[key]


@lru_cache(maxsize=None)
def character_table(d: int) -> CharacterTable:
    parts = enumerate_partitions(d)
    table = CharacterTable(d)
    for lam in parts:
        for delta in parts:
            table.entries[(lam, delta)] = Fraction(character(lam, delta))
    return table


def phi(lam: Partition, delta: Partition) -> Fraction:
    """Normalized character chi_lam(delta) d! / (dim lam z_delta)."""
    return Fraction(character(lam, delta)) / (dim_over_dfact(lam) * z_of(delta))


def _solve(matrix: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    """Gauss-Jordan elimination over the rationals."""
    n = len(matrix)
    aug = [list(row) + [rhs[i]] for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [aug[i][n] for i in range(n)]


@lru_cache(maxsize=None)
def _oracle_column(delta: Partition) -> dict[Partition, Fraction]:
    from .symfunc import schur_in_p

    d = delta.weight
    basis = enumerate_partitions(d)
    polys = [schur_in_p(mu) for mu in basis]
    # rows: monomials p_Gamma, columns: s_mu; solve sum_mu c_mu s_mu = p_delta
    matrix = [[poly.coefficient(gamma) for poly in polys] for gamma in basis]
    rhs = [Fraction(1 if gamma == delta else 0) for gamma in basis]
    return dict(zip(basis, _solve(matrix, rhs)))


def character_oracle(lam: Partition, delta: Partition) -> Fraction:
    """chi_lam(delta) read off from expanding p_delta in the Schur basis by exact linear algebra."""
    lam, delta = Partition(lam), Partition(delta)
    if lam.weight != delta.weight:
        raise ArgumentError(f"weight mismatch: |{lam}| != |{delta}|")
    if lam.weight > ORACLE_MAX_WEIGHT:
        raise ScaleGuardError(f"oracle limited to weight <= {ORACLE_MAX_WEIGHT}")
    return _oracle_column(delta)[lam]


def _common_weight(profiles: Sequence[Partition], d: int | None) -> int:
    weights = {Partition(p).weight for p in profiles}
    if d is not None:
        weights.add(d)
    if len(weights) > 1:
        raise ArgumentError(f"profiles have different weights: {sorted(weights)}")
    if not weights:
        raise ArgumentError("weight d is required when no profiles are given")
    return weights.pop()


def hurwitz(e: int, profiles: Sequence[Partition], d: int | None = None) -> Fraction:
    """sum over lam of (dim lam/d!)^e prod_i phi_lam(profile_i)."""
    profiles = [Partition(p) for p in profiles]
    d = _common_weight(profiles, d)
    total = Fraction(0)
    for lam in enumerate_partitions(d):
        term = dim_over_dfact(lam) ** e
        for delta in profiles:
            term *= phi(lam, delta)
        total += term
    return total


def hurwitz_weighted(e: int, profiles: Sequence[Partition], m: int, n: Any, d: int | None = None) -> Any:
    """Hurwitz sum with each lam weighted by (N)_lam^{-m}; N may be exact, float or symbolic."""
    profiles = [Partition(p) for p in profiles]
    d = _common_weight(profiles, d)
    total: Any = Fraction(0)
    for lam in enumerate_partitions(d):
        term: Any = dim_over_dfact(lam) ** e
        for delta in profiles:
            term *= phi(lam, delta)
        if m:
            weight = pochhammer_lambda(n, lam)
            if weight == 0:
                raise DomainError(f"(N)_lam vanishes at lam={lam} for N={n}")
            term = term / weight**m
        total = total + term
    return total


def cycle_type(perm: Sequence[int]) -> Partition:
    seen = [False] * len(perm)
    lengths = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        length, j = 0, start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        lengths.append(length)
    return Partition.from_unsorted(lengths)


def _compose(p: tuple[int, ...], q: tuple[int, ...]) -> tuple[int, ...]:
    # (p q)(x) = p(q(x))
    return tuple(p[i] for i in q)


def _inverse(p: tuple[int, ...]) -> tuple[int, ...]:
    out = [0] * len(p)
    for i, v in enumerate(p):
        out[v] = i
    return tuple(out)


def hurwitz_bruteforce(h: int, m: int, profiles: Sequence[Partition], d: int | None = None) -> Fraction:
    """Count solutions of s_1...s_F r_1^2...r_m^2 [a_1,b_1]...[a_h,b_h] = 1 in S_d, divided by d!.

    The s_i range over the classes of the given profiles, the r_j, a_j, b_j over
    all of S_d. The last s_F is solved for rather than enumerated.
    """
    profiles = [Partition(p) for p in profiles]
    d = _common_weight(profiles, d)
    f = len(profiles)
    exponent = max(f - 1, 0) + 2 * m + 2 * h
    bound = math.factorial(d) ** exponent
    if bound > BRUTEFORCE_BOUND:
        raise ScaleGuardError(f"enumeration bound {d}!^{exponent} = {bound} exceeds {BRUTEFORCE_BOUND}")
    group = list(itertools.permutations(range(d)))
    ident = tuple(range(d))
    by_type: dict[Partition, list[tuple[int, ...]]] = {}
    for p in group:
        by_type.setdefault(cycle_type(p), []).append(p)
    pools = [by_type.get(delta, []) for delta in profiles[:-1]]
    pools += [group] * (m + 2 * h)
    target = profiles[-1] if profiles else None
    count = 0
    for combo in itertools.product(*pools):
        sig, free = combo[: max(f - 1, 0)], combo[max(f - 1, 0) :]
        left = ident
        for s in sig:
            left = _compose(left, s)
        right = ident
        for r in free[:m]:
            right = _compose(right, _compose(r, r))
        for j in range(h):
            a, b = free[m + 2 * j], free[m + 2 * j + 1]
            comm = _compose(_compose(a, b), _compose(_inverse(a), _inverse(b)))
            right = _compose(right, comm)
        if target is None:
            count += _compose(left, right) == ident
        else:
            # left * s_F * right = 1  =>  s_F = left^{-1} right^{-1}
            last = _compose(_inverse(left), _inverse(right))
            count += cycle_type(last) == target
    return Fraction(count, math.factorial(d))
