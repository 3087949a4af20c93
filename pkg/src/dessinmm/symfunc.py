"""Symmetric functions in power-sum variables: Schur polynomials, the character map and special points."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable, Iterable, Mapping, Sequence

import numpy as np

from .characters import phi
from .errors import ArgumentError, NumericError
from .partitions import (
    Partition,
    dim_over_dfact,
    enumerate_partitions,
    format_fraction,
    pochhammer_lambda,
    z_of,
)

__all__ = [
    "SymPolynomial",
    "PowerSumPoint",
    "elementary_schur",
    "schur_in_p",
    "schur_eval_matrix",
    "schur_from_power_sums",
    "power_sum_eval",
    "power_sums_of",
    "char_map",
    "schur_special",
    "qt_pochhammer_lambda",
    "is_exact_matrix",
    "DEFAULT_D_MAX",
]

DEFAULT_D_MAX = 8
GAP_TOLERANCE = 1e-8


def _merge(a: Partition, b: Partition) -> Partition:
    return Partition(sorted(a + b, reverse=True))


@dataclass(frozen=True)
class SymPolynomial:
    """Exact polynomial in p_1, p_2, ...; each key is the partition indexing the monomial p_Delta."""

    terms: Mapping[Partition, Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        clean = {Partition(k): Fraction(v) for k, v in self.terms.items() if v != 0}
        object.__setattr__(self, "terms", clean)

    @classmethod
    def one(cls) -> "SymPolynomial":
        return cls({Partition(): Fraction(1)})

    @classmethod
    def zero(cls) -> "SymPolynomial":
        return cls({})

    @classmethod
    def monomial(cls, delta: Partition, coeff: Any = 1) -> "SymPolynomial":
        return cls({Partition(delta): Fraction(coeff)})

    def __add__(self, other: "SymPolynomial") -> "SymPolynomial":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, Fraction(0)) + v
        return SymPolynomial(out)

    def __neg__(self) -> "SymPolynomial":
        return SymPolynomial({k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "SymPolynomial") -> "SymPolynomial":
        return self + (-other)

    def __mul__(self, other: Any) -> "SymPolynomial":
        if not isinstance(other, SymPolynomial):
            c = Fraction(other)
            return SymPolynomial({k: v * c for k, v in self.terms.items()})
        out: dict[Partition, Fraction] = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                k = _merge(k1, k2)
                out[k] = out.get(k, Fraction(0)) + v1 * v2
        return SymPolynomial(out)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if isinstance(other, SymPolynomial):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == SymPolynomial.one() * other
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def coefficient(self, delta: Partition) -> Fraction:
        return self.terms.get(Partition(delta), Fraction(0))

    @property
    def degree(self) -> int:
        return max((k.weight for k in self.terms), default=0)

    @property
    def homogeneous(self) -> bool:
        return len({k.weight for k in self.terms}) <= 1

    def evaluate(self, point: "PowerSumPoint | Sequence[Any]") -> Any:
        """Evaluate at p_m = point[m] (1-based access for PowerSumPoint, 0-based list holding p_1 first)."""
        if not isinstance(point, PowerSumPoint):
            point = PowerSumPoint.from_values(point)
        cache: dict[int, Any] = {}
        total: Any = 0
        for delta, coeff in self.terms.items():
            term: Any = coeff
            for part in delta:
                if part not in cache:
                    cache[part] = point[part]
                term = term * cache[part]
            total = total + term
        return total

    def derivative_p1(self) -> "SymPolynomial":
        out: dict[Partition, Fraction] = {}
        for delta, coeff in self.terms.items():
            ones = delta.count(1)
            if ones:
                k = Partition(delta[:-1])
                out[k] = out.get(k, Fraction(0)) + coeff * ones
        return SymPolynomial(out)

    def negate_variables(self) -> "SymPolynomial":
        """Substitute p_m -> -p_m."""
        return SymPolynomial({k: v * (-1) ** len(k) for k, v in self.terms.items()})

    def to_json(self) -> list[dict[str, Any]]:
        rows = []
        for delta in sorted(self.terms, key=lambda k: (k.weight, tuple(k)), reverse=True):
            top = max(delta, default=0)
            exps = [delta.count(m) for m in range(1, top + 1)]
            rows.append({"exponents": exps, "coeff": format_fraction(self.terms[delta])})
        return rows

    @classmethod
    def from_json(cls, rows: Iterable[Mapping[str, Any]]) -> "SymPolynomial":
        out: dict[Partition, Fraction] = {}
        for row in rows:
            parts: list[int] = []
            for m, e in enumerate(row["exponents"], start=1):
                parts.extend([m] * int(e))
            out[Partition.from_unsorted(parts)] = Fraction(row["coeff"])
        return cls(out)


class PowerSumPoint:
    """A point p = (p_1, p_2, ...) given by a finite list or a rule m -> p_m."""

    def __init__(self, rule: Callable[[int], Any], label: str = "custom") -> None:
        self._rule = rule
        self.label = label
        self._cache: dict[int, Any] = {}

    def __getitem__(self, m: int) -> Any:
        if m < 1:
            raise ArgumentError("power sums are indexed from 1")
        if m not in self._cache:
            self._cache[m] = self._rule(m)
        return self._cache[m]

    @classmethod
    def from_values(cls, values: Sequence[Any]) -> "PowerSumPoint":
        vals = list(values)
        return cls(lambda m: vals[m - 1] if m <= len(vals) else 0, label=f"values{vals!r}")

    @classmethod
    def infinity(cls) -> "PowerSumPoint":
        return cls(lambda m: 1 if m == 1 else 0, label="p_infty")

    @classmethod
    def constant(cls, a: Any) -> "PowerSumPoint":
        """p_m = a for all m, so that s_lam(p) = (a)_lam s_lam(p_infty)."""
        return cls(lambda m: a, label=f"constant({a})")

    @classmethod
    def qt(cls, q: Any, t: Any) -> "PowerSumPoint":
        """p_m = (1 - q^m)/(1 - t^m)."""
        return cls(lambda m: (1 - q**m) / (1 - t**m), label=f"qt({q},{t})")

    @classmethod
    def from_matrix(cls, x: Any) -> "PowerSumPoint":
        mat = np.asarray(x)
        return cls(lambda m: _trace(_matrix_power(mat, m)), label="matrix")

    def scaled(self, z: Any) -> "PowerSumPoint":
        """p_m -> z^m p_m, so that s_lam picks up z^{|lam|}."""
        return PowerSumPoint(lambda m: z**m * self[m], label=f"{self.label}*{z}")

    def __repr__(self) -> str:
        return f"PowerSumPoint({self.label})"


def is_exact_matrix(x: Any) -> bool:
    return isinstance(x, np.ndarray) and x.dtype == object


def _matrix_power(x: np.ndarray, m: int) -> np.ndarray:
    out = x
    for _ in range(m - 1):
        out = out @ x
    return out


def _trace(x: np.ndarray) -> Any:
    if is_exact_matrix(x):
        total: Any = Fraction(0)
        for i in range(x.shape[0]):
            total += x[i, i]
        return total
    return complex(np.trace(x))


def power_sums_of(x: Any, d: int) -> list[Any]:
    """[tr X, tr X^2, ..., tr X^d]."""
    mat = np.asarray(x)
    out = []
    power = mat
    for m in range(1, d + 1):
        if m > 1:
            power = power @ mat
        out.append(_trace(power))
    return out


def power_sum_eval(delta: Partition, x: Any) -> Any:
    """p_Delta(X) = prod_k tr X^{Delta_k}; p_() = 1."""
    delta = Partition(delta)
    if not delta:
        return Fraction(1) if is_exact_matrix(np.asarray(x)) else 1.0 + 0j
    sums = power_sums_of(x, delta[0])
    out: Any = 1
    for part in delta:
        out = out * sums[part - 1]
    return out


@lru_cache(maxsize=None)
def elementary_schur(m: int) -> SymPolynomial:
    """Coefficient of z^m in exp(sum_k p_k z^k / k), i.e. sum over |Delta| = m of p_Delta / z_Delta."""
    if m < 0:
        return SymPolynomial.zero()
    return SymPolynomial({delta: Fraction(1, z_of(delta)) for delta in enumerate_partitions(m)})


def _determinant(entries: Sequence[Sequence[SymPolynomial]]) -> SymPolynomial:
    """Laplace expansion along rows, memoized on the set of remaining columns."""
    size = len(entries)
    memo: dict[tuple[int, ...], SymPolynomial] = {}

    def minor(row: int, cols: tuple[int, ...]) -> SymPolynomial:
        if row == size:
            return SymPolynomial.one()
        if cols in memo:
            return memo[cols]
        total = SymPolynomial.zero()
        for pos, col in enumerate(cols):
            entry = entries[row][col]
            if not entry.terms:
                continue
            rest = minor(row + 1, cols[:pos] + cols[pos + 1 :])
            term = entry * rest
            total = total - term if pos % 2 else total + term
        memo[cols] = total
        return total

    return minor(0, tuple(range(size)))


_SCHUR_CACHE: dict[Partition, SymPolynomial] = {}


def schur_in_p(lam: Partition) -> SymPolynomial:
    """Jacobi-Trudi determinant det[s_(lam_i - i + j)] expanded in power sums."""
    lam = Partition(lam)
    cached = _SCHUR_CACHE.get(lam)
    if cached is not None:
        return cached
    size = len(lam)
    entries = [[elementary_schur(lam[i] - i + j) for j in range(size)] for i in range(size)]
    poly = _determinant(entries) if size else SymPolynomial.one()
    # setdefault keeps the first insertion if two threads race on the same key
    return _SCHUR_CACHE.setdefault(lam, poly)


def schur_from_power_sums(lam: Partition, sums: Sequence[Any]) -> Any:
    """s_lam evaluated from p_1..p_d given as a 0-based list."""
    return schur_in_p(lam).evaluate(list(sums))


def _vandermonde_ratio(lam: Partition, eig: np.ndarray) -> complex:
    n = len(eig)
    h = np.array(lam.padded(n)) + np.arange(n - 1, -1, -1)
    num = np.linalg.det(eig[None, :] ** h[:, None])
    den = np.prod([eig[i] - eig[j] for i in range(n) for j in range(i + 1, n)]) if n > 1 else 1.0
    return complex(num / den)


def schur_eval_matrix(lam: Partition, x: Any) -> Any:
    """s_lam at the eigenvalues of X.

    Uses the bialternant when the spectrum is well separated and the power-sum
    polynomial otherwise. Exact (object dtype) matrices always take the exact
    power-sum route.
    """
    lam = Partition(lam)
    mat = np.asarray(x)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ArgumentError("expected a square matrix")
    n = mat.shape[0]
    if len(lam) > n:
        return Fraction(0) if is_exact_matrix(mat) else 0j
    if not lam:
        return Fraction(1) if is_exact_matrix(mat) else 1 + 0j
    if is_exact_matrix(mat):
        return schur_from_power_sums(lam, power_sums_of(mat, lam.weight))
    mat = mat.astype(complex)
    try:
        eig = np.linalg.eigvals(mat)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigenvalue computation failed (cond={np.linalg.cond(mat):.3g})") from exc
    scale = np.linalg.norm(mat)
    gaps = [abs(eig[i] - eig[j]) for i in range(n) for j in range(i + 1, n)]
    if n == 1 or (scale > 0 and min(gaps) > GAP_TOLERANCE * scale):
        return _vandermonde_ratio(lam, eig)
    return complex(schur_from_power_sums(lam, power_sums_of(mat, lam.weight)))


def char_map(direction: str, arg: Partition) -> Any:
    """Character map between power sums and Schur functions.

    forward: p_Delta as {lam: chi_lam(Delta)} in the Schur basis.
    backward: s_lam as a SymPolynomial, (dim lam / d!) sum_Delta phi_lam(Delta) p_Delta.
    """
    arg = Partition(arg)
    d = arg.weight
    if direction == "forward":
        out = {}
        for lam in enumerate_partitions(d):
            c = dim_over_dfact(lam) * z_of(arg) * phi(lam, arg)
            if c:
                out[lam] = c
        return out
    if direction == "backward":
        scale = dim_over_dfact(arg)
        return SymPolynomial({delta: scale * phi(arg, delta) for delta in enumerate_partitions(d)})
    raise ArgumentError(f"direction must be 'forward' or 'backward', got {direction!r}")


def qt_pochhammer_lambda(q: Any, t: Any, lam: Partition) -> Any:
    """(q;t)_lam = prod over cells (i, j) of (1 - q t^{j - i})."""
    out: Any = 1
    for i, j in Partition(lam).cells():
        out = out * (1 - q * t ** (j - i))
    return out


def schur_special(lam: Partition, kind: str, *params: Any) -> Any:
    """s_lam at a named special point: p_infty, identity(N), rank(N, k), geometric(a), qt(q, t)."""
    lam = Partition(lam)
    base = dim_over_dfact(lam)
    if kind == "p_infty":
        return base
    if kind == "identity":
        (n,) = params
        return pochhammer_lambda(n, lam) * base
    if kind == "rank":
        n, k = params
        if not 0 <= k <= n:
            raise ArgumentError("rank must satisfy 0 <= k <= N")
        return pochhammer_lambda(k, lam) * base
    if kind == "geometric":
        (a,) = params
        return pochhammer_lambda(a, lam) * base
    if kind == "qt":
        q, t = params
        at_zero = schur_in_p(lam).evaluate(PowerSumPoint.qt(0 * q, t))
        return qt_pochhammer_lambda(q, t, lam) * at_zero
    raise ArgumentError(f"unknown special point {kind!r}")
