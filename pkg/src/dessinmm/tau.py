"""Hypergeometric tau functions: partition series and their determinant forms."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterator, Mapping, Sequence

import numpy as np

from .errors import ArgumentError, DomainError
from .partitions import Partition, content_product, enumerate_partitions, pochhammer_lambda
from .symfunc import PowerSumPoint, elementary_schur, schur_in_p

__all__ = [
    "RFunction",
    "TauResult",
    "tau_scalar",
    "tau_XY",
    "tau_pp_det",
    "tau_Xp_det",
    "hciz",
    "hciz_constant",
    "morozov_series",
    "partitions_in_box",
    "complete_homogeneous",
    "schur_jacobi_trudi",
]

GAP_TOLERANCE = 1e-8


@dataclass(frozen=True)
class RFunction:
    """A function on the integer lattice used in content products.

    kinds: "rational" is prod(a_i + x) / (x prod(b_i + x)); "ratio" drops the 1/x;
    "constant", "table" and "custom" are what they say.
    """

    kind: str
    a: tuple[Any, ...] = ()
    b: tuple[Any, ...] = ()
    table: Mapping[int, Any] | None = None
    fn: Callable[[int], Any] | None = None
    value: Any = 1

    @classmethod
    def rational(cls, a: Sequence[Any] = (), b: Sequence[Any] = ()) -> "RFunction":
        return cls("rational", tuple(a), tuple(b))

    @classmethod
    def ratio(cls, a: Sequence[Any] = (), b: Sequence[Any] = ()) -> "RFunction":
        return cls("ratio", tuple(a), tuple(b))

    @classmethod
    def constant(cls, value: Any = 1) -> "RFunction":
        return cls("constant", value=value)

    @classmethod
    def from_table(cls, table: Mapping[int, Any]) -> "RFunction":
        return cls("table", table=dict(table))

    @classmethod
    def custom(cls, fn: Callable[[int], Any]) -> "RFunction":
        return cls("custom", fn=fn)

    @classmethod
    def parse(cls, text: str, kind: str = "rational") -> "RFunction":
        """Parse "p:a1,a2;q:b1" (either part optional)."""
        a: list[Any] = []
        b: list[Any] = []
        for chunk in filter(None, (c.strip() for c in text.split(";"))):
            key, _, vals = chunk.partition(":")
            nums = [_parse_number(v) for v in vals.split(",") if v.strip()]
            if key.strip() == "p":
                a = nums
            elif key.strip() == "q":
                b = nums
            else:
                raise ArgumentError(f"bad r specification {text!r}")
        if kind == "constant":
            return cls.constant(a[0] if a else 1)
        if kind not in ("rational", "ratio"):
            raise ArgumentError(f"unknown r kind {kind!r}")
        return cls(kind, tuple(a), tuple(b))

    def __call__(self, x: int) -> Any:
        if self.kind == "constant":
            return self.value
        if self.kind == "table":
            if x not in self.table:
                raise DomainError(f"r is not tabulated at {x}")
            return self.table[x]
        if self.kind == "custom":
            return self.fn(x)
        num: Any = Fraction(1)
        den: Any = Fraction(x) if self.kind == "rational" else Fraction(1)
        for a in self.a:
            num = num * (a + x)
        for b in self.b:
            den = den * (b + x)
        if den == 0:
            raise ZeroDivisionError(f"r has a pole at {x}")
        return num / den

    def describe(self) -> dict[str, Any]:
        return {"kind": self.kind, "a": [str(v) for v in self.a], "b": [str(v) for v in self.b]}


def _parse_number(text: str) -> Any:
    text = text.strip()
    try:
        return Fraction(text)
    except ValueError:
        return complex(text.replace("i", "j"))


def _r(r: Callable[[int], Any], x: int) -> Any:
    try:
        return r(x)
    except ZeroDivisionError as exc:
        raise DomainError(f"r has a pole at {x}") from exc


@dataclass
class TauResult:
    series: complex
    determinant: complex | None
    diagnostics: list[str] = field(default_factory=list)
    closed: complex | None = None

    @property
    def discrepancy(self) -> float | None:
        if self.determinant is None:
            return None
        return abs(self.series - self.determinant) / (1 + abs(self.series))


def tau_scalar(r: Callable[[int], Any], n: int, x: Any, cap: int) -> Any:
    """1 + sum_{m=1}^{cap} r(n+1) ... r(n+m) x^m."""
    total: Any = 1
    coeff: Any = 1
    power: Any = 1
    for m in range(1, cap + 1):
        coeff = coeff * _r(r, n + m)
        power = power * x
        total = total + coeff * power
    return total


def partitions_in_box(rows: int, cols: int) -> Iterator[Partition]:
    """Partitions with at most `rows` parts, each at most `cols`."""
    if cols < 0:
        return

    def rec(prefix: tuple[int, ...], limit: int) -> Iterator[Partition]:
        yield Partition(prefix)
        if len(prefix) == rows:
            return
        for part in range(1, limit + 1):
            yield from rec(prefix + (part,), part)

    yield from rec((), cols)


def complete_homogeneous(values: Sequence[complex], top: int, from_power_sums: bool = False) -> np.ndarray:
    """h_0..h_top from eigenvalues, or from p_1..p_top by Newton's recursion."""
    h = np.zeros(top + 1, dtype=complex)
    h[0] = 1
    if from_power_sums:
        p = np.asarray(values, dtype=complex)
        for k in range(1, top + 1):
            h[k] = sum(p[i - 1] * h[k - i] for i in range(1, k + 1)) / k
        return h
    for x in values:
        for k in range(1, top + 1):
            h[k] = h[k] + x * h[k - 1]
    return h


def schur_jacobi_trudi(lam: Partition, h: np.ndarray) -> complex:
    ell = len(lam)
    if ell == 0:
        return 1 + 0j
    mat = np.zeros((ell, ell), dtype=complex)
    for i in range(ell):
        for j in range(ell):
            k = lam[i] - i + j
            if 0 <= k < len(h):
                mat[i, j] = h[k]
            elif k >= len(h):
                raise ArgumentError("not enough complete homogeneous values")
    return complex(np.linalg.det(mat))


def _eigs(x: Any) -> np.ndarray:
    return np.linalg.eigvals(np.asarray(x, dtype=complex))


def _vandermonde(x: np.ndarray) -> complex:
    n = len(x)
    return complex(np.prod([x[i] - x[j] for i in range(n) for j in range(i + 1, n)])) if n > 1 else 1 + 0j


def _separated(x: np.ndarray) -> bool:
    n = len(x)
    if n == 1:
        return True
    scale = max(1.0, float(np.max(np.abs(x))))
    return min(abs(x[i] - x[j]) for i in range(n) for j in range(i + 1, n)) > GAP_TOLERANCE * scale


def _point_values(p: PowerSumPoint, top: int) -> list[complex]:
    return [complex(p[m]) for m in range(1, top + 1)]


def _xy_constant(r: Callable[[int], Any], n: int, N: int) -> Any:
    # series = det[tau(n-N, x_i y_j)] / (V(x) V(y) K), K = prod_{t=n-N+1}^{n-1} r(t)^{n-t}
    k: Any = 1
    for t in range(n - N + 1, n):
        k = k * _r(r, t) ** (n - t)
    return k


def tau_XY(r: Callable[[int], Any], n: int, X: Any, Y: Any, cap: int) -> TauResult:
    """sum_lam r_lam(n) s_lam(X) s_lam(Y) and its N x N determinant form.

    Both routes cover exactly the partitions with at most N rows and
    lam_1 + N - 1 <= cap, so they agree without a truncation tail.
    """
    x, y = _eigs(X), _eigs(Y)
    N = len(x)
    if len(y) != N:
        raise ArgumentError("X and Y must have the same size")
    hx, hy = complete_homogeneous(x, cap + N), complete_homogeneous(y, cap + N)
    series = 0j
    for lam in partitions_in_box(N, cap - N + 1):
        series += complex(content_product(r, n, lam)) * schur_jacobi_trudi(lam, hx) * schur_jacobi_trudi(lam, hy)
    diagnostics = [f"partitions with <= {N} rows and first row <= {cap - N + 1}"]
    if not (_separated(x) and _separated(y)):
        return TauResult(series, None, diagnostics + ["degenerate spectrum: determinant route refused"])
    k = complex(_xy_constant(r, n, N))
    if k == 0:
        return TauResult(series, None, diagnostics + ["normalizing constant vanishes: determinant route refused"])
    entries = np.array([[complex(tau_scalar(r, n - N, xi * yj, cap)) for yj in y] for xi in x])
    det = complex(np.linalg.det(entries)) / (_vandermonde(x) * _vandermonde(y) * k)
    return TauResult(series, det, diagnostics)


def tau_pp_det(
    r: Callable[[int], Any], n: int, p1: PowerSumPoint, p2: PowerSumPoint, cap: int
) -> TauResult:
    """sum over lam with at most n rows of r_lam(n) s_lam(p1) s_lam(p2), and the n x n determinant
    c_n det[d^a/dp1_1^a d^b/dp2_1^b tau_r(1, p1, p2)], c_n = prod_{i=1}^{n-1} r(i)^{i-n}."""
    if n < 1:
        raise ArgumentError("n must be at least 1")
    if _r(r, 0) != 0:
        raise ArgumentError("r(0) must vanish")
    top = cap + n
    h1 = complete_homogeneous(_point_values(p1, top), top, from_power_sums=True)
    h2 = complete_homogeneous(_point_values(p2, top), top, from_power_sums=True)
    series = 0j
    for lam in partitions_in_box(n, cap - n + 1):
        series += complex(content_product(r, n, lam)) * schur_jacobi_trudi(lam, h1) * schur_jacobi_trudi(lam, h2)
    diagnostics = [f"partitions with <= {n} rows and first row <= {cap - n + 1}"]
    c: Any = 1
    for i in range(1, n):
        ri = _r(r, i)
        if ri == 0:
            return TauResult(series, None, diagnostics + [f"r({i}) = 0: normalizing constant undefined"])
        c = c * Fraction(1) / ri ** (n - i) if isinstance(ri, (int, Fraction)) else c / ri ** (n - i)
    # derivatives in p_1 taken on the exact polynomials s_(m), then evaluated
    coeffs = [1]
    for m in range(1, cap + 1):
        coeffs.append(coeffs[-1] * _r(r, m))
    derived1 = [[None] * (cap + 1) for _ in range(n)]
    derived2 = [[None] * (cap + 1) for _ in range(n)]
    for m in range(cap + 1):
        poly = elementary_schur(m)
        for a in range(n):
            derived1[a][m] = complex(poly.evaluate(p1))
            derived2[a][m] = complex(poly.evaluate(p2))
            poly = poly.derivative_p1()
    entries = np.zeros((n, n), dtype=complex)
    for a in range(n):
        for b in range(n):
            entries[a, b] = sum(complex(coeffs[m]) * derived1[a][m] * derived2[b][m] for m in range(cap + 1))
    det = complex(c) * complex(np.linalg.det(entries))
    return TauResult(series, det, diagnostics)


def tau_Xp_det(r: Callable[[int], Any], n: int, X: Any, p: PowerSumPoint, cap: int) -> TauResult:
    """sum_lam r_lam(n) s_lam(X) s_lam(p) and det[x_i^{N-k} g_k(x_i)] / V(x), where
    g_k(x) = sum_m r(n-k+1) ... r(n-k+m) x^m s_(m)(p), truncated at x-degree cap."""
    x = _eigs(X)
    N = len(x)
    top = cap + N
    hx = complete_homogeneous(x, top)
    hp = complete_homogeneous(_point_values(p, top), top, from_power_sums=True)
    series = 0j
    for lam in partitions_in_box(N, cap - N + 1):
        series += complex(content_product(r, n, lam)) * schur_jacobi_trudi(lam, hx) * schur_jacobi_trudi(lam, hp)
    diagnostics = [f"partitions with <= {N} rows and first row <= {cap - N + 1}"]
    if not _separated(x):
        return TauResult(series, None, diagnostics + ["degenerate spectrum: determinant route refused"])
    entries = np.zeros((N, N), dtype=complex)
    for k in range(1, N + 1):
        coeff: Any = 1
        row_coeffs = [complex(coeff)]
        for m in range(1, cap - N + k + 1):
            coeff = coeff * _r(r, n - k + m)
            row_coeffs.append(complex(coeff))
        for i, xi in enumerate(x):
            g = sum(c * xi**m * hp[m] for m, c in enumerate(row_coeffs))
            entries[i, k - 1] = xi ** (N - k) * g
    det = complex(np.linalg.det(entries)) / _vandermonde(x)
    return TauResult(series, det, diagnostics)


def hciz_constant(alpha: Any, N: int) -> Any:
    """prod_{p=1}^{N-1} p! / alpha^{N(N-1)/2}."""
    return math.prod(math.factorial(k) for k in range(1, N)) / alpha ** (N * (N - 1) // 2)


def hciz(alpha: Any, A: Any, B: Any, cap: int) -> TauResult:
    """Unitary integral of exp(alpha tr U A U^dag B): the series sum alpha^|lam| / (N)_lam s_lam(A) s_lam(B),
    the determinant with exponentials truncated to match, and the untruncated closed form."""
    a, b = _eigs(A), _eigs(B)
    N = len(a)
    if alpha == 0:
        return TauResult(1 + 0j, 1 + 0j, ["alpha = 0"], closed=1 + 0j)
    r = RFunction.custom(lambda t: alpha / (N + t))
    res = tau_XY(r, 0, A, B, cap)
    if res.determinant is not None:
        c = complex(hciz_constant(alpha, N))
        full = np.exp(alpha * np.outer(a, b))
        res.closed = c * complex(np.linalg.det(full)) / (_vandermonde(a) * _vandermonde(b))
    return res


def morozov_series(p: PowerSumPoint, pbar: PowerSumPoint, N: int, cap: int) -> Any:
    """sum over lam with at most N rows and |lam| <= cap of s_lam(p) s_lam(pbar)."""
    total: Any = 0
    for d in range(cap + 1):
        for lam in enumerate_partitions(d):
            if len(lam) > N:
                continue
            poly = schur_in_p(lam)
            total = total + poly.evaluate(p) * poly.evaluate(pbar)
    return total


def unitary_weight(N: int, lam: Partition) -> Any:
    return Fraction(1) / pochhammer_lambda(N, lam)
