"""Closed forms for expectation values of observables of dressed monodromies."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable, Mapping, Sequence

import numpy as np

from .characters import character, hurwitz_weighted
from .dessin import DessinModel, monodromy_products
from .errors import ArgumentError, DomainError, ScaleGuardError
from .partitions import (
    Partition,
    content_product,
    dim_over_dfact,
    enumerate_partitions,
    pochhammer,
    pochhammer_lambda,
    z_of,
)
from .symfunc import PowerSumPoint, is_exact_matrix, power_sum_eval, schur_eval_matrix, schur_in_p

__all__ = [
    "EnsembleSpec",
    "SourceAssignment",
    "ClosedFormResult",
    "trace_product_expectation",
    "schur_expectation",
    "schur_det_expectation",
    "mixed_expectation",
    "power_expectation",
    "theorem_series",
    "shift_ratio",
    "exact_det",
    "POWER_TUPLE_BOUND",
]

POWER_TUPLE_BOUND = 10**6


@dataclass(frozen=True)
class EnsembleSpec:
    """Per-edge ensemble kinds ('G' Ginibre, 'U' Haar unitary), matrix size and hbar (default 1/N)."""

    kinds: tuple[str, ...]
    N: int
    hbar: Any = None

    def __post_init__(self) -> None:
        kinds = tuple(str(k).upper() for k in self.kinds)
        if any(k not in ("G", "U") for k in kinds):
            raise ArgumentError(f"ensemble kinds must be G or U, got {kinds}")
        if self.N < 1:
            raise ArgumentError("N must be positive")
        object.__setattr__(self, "kinds", kinds)
        hbar = Fraction(1, self.N) if self.hbar is None else self.hbar
        if isinstance(hbar, (int, str)):
            hbar = Fraction(hbar)
        if not hbar > 0:
            raise ArgumentError("hbar must be positive")
        object.__setattr__(self, "hbar", hbar)

    @classmethod
    def parse(cls, text: str, N: int, hbar: Any = None) -> "EnsembleSpec":
        return cls(tuple(t.strip() for t in text.split(",") if t.strip()), N, hbar)

    @classmethod
    def uniform(cls, kind: str, n: int, N: int, hbar: Any = None) -> "EnsembleSpec":
        return cls((kind,) * n, N, hbar)

    @property
    def n(self) -> int:
        return len(self.kinds)

    @property
    def n1(self) -> int:
        return self.kinds.count("G")

    @property
    def n2(self) -> int:
        return self.kinds.count("U")


def _to_exact(value: Any) -> Fraction | None:
    if isinstance(value, bool):
        return None
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except ValueError:
            return None
    return None


def _parse_entry(entry: Any) -> tuple[Any, Any]:
    if isinstance(entry, (list, tuple)):
        if len(entry) != 2:
            raise ArgumentError(f"complex entries are [re, im] pairs, got {entry!r}")
        return entry[0], entry[1]
    return entry, 0


@dataclass
class SourceAssignment:
    """A matrix for every signed letter. Matrices with object dtype hold exact Fractions."""

    matrices: dict[int, np.ndarray]

    def __post_init__(self) -> None:
        shapes = set()
        clean = {}
        for letter, mat in self.matrices.items():
            arr = np.asarray(mat)
            if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
                raise ArgumentError(f"source for letter {letter} is not square")
            shapes.add(arr.shape)
            clean[int(letter)] = arr
        if len(shapes) > 1:
            raise ArgumentError(f"source matrices have different sizes {sorted(shapes)}")
        self.matrices = clean

    @property
    def N(self) -> int:
        return next(iter(self.matrices.values())).shape[0]

    @property
    def exact(self) -> bool:
        return all(is_exact_matrix(m) for m in self.matrices.values())

    def check(self, n: int, N: int | None = None) -> None:
        for i in range(1, n + 1):
            for x in (i, -i):
                if x not in self.matrices:
                    raise ArgumentError(f"no source matrix for letter {x}")
        if N is not None and self.N != N:
            raise ArgumentError(f"sources are {self.N}x{self.N} but N={N}")

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "SourceAssignment":
        """Letter -> row-major matrix of [re, im] pairs (flat or nested by row), or nested rows of reals.

        Integer or "num/den" entries with zero imaginary part give exact matrices.
        """
        out: dict[int, np.ndarray] = {}
        for key, rows in data.items():
            if rows and _is_real_rows(rows):
                flat = list(itertools.chain.from_iterable(rows))
            elif rows and _is_row_list(rows):
                flat = list(itertools.chain.from_iterable(rows))
            else:
                flat = list(rows)
            size = math.isqrt(len(flat))
            if size * size != len(flat) or size == 0:
                raise ArgumentError(f"source {key}: {len(flat)} entries is not a square count")
            pairs = [_parse_entry(e) for e in flat]
            exact = [(_to_exact(re), _to_exact(im)) for re, im in pairs]
            if all(re is not None and im == 0 for re, im in exact):
                arr = np.empty((size, size), dtype=object)
                for k, (re, _) in enumerate(exact):
                    arr[k // size, k % size] = re
            else:
                arr = np.array([complex(float(Fraction(str(re))), float(Fraction(str(im)))) for re, im in pairs])
                arr = arr.reshape(size, size)
            out[int(key)] = arr
        return cls(out)

    def to_json(self) -> dict[str, Any]:
        out = {}
        for letter in sorted(self.matrices, key=lambda x: (abs(x), x < 0)):
            mat = self.matrices[letter]
            rows = []
            for v in mat.reshape(-1):
                if isinstance(v, Fraction):
                    rows.append([_fraction_str(v), 0])
                else:
                    c = complex(v)
                    rows.append([c.real, c.imag])
            out[str(letter)] = rows
        return out


def _is_real_rows(rows: Sequence[Any]) -> bool:
    # [[a, b], [c, d]]: square nesting of scalars; a list of [re, im] pairs never has a square count of 2
    if not all(isinstance(r, (list, tuple)) for r in rows):
        return False
    if any(isinstance(x, (list, tuple)) for r in rows for x in r):
        return False
    return len(rows) >= 2 and all(len(r) == len(rows) for r in rows)


def _is_row_list(rows: Sequence[Any]) -> bool:
    first = rows[0]
    return isinstance(first, (list, tuple)) and len(first) > 0 and isinstance(first[0], (list, tuple))


def _fraction_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass
class ClosedFormResult:
    value: Any
    formula: str
    side: str
    series: list[tuple[Any, Any]] | None = None
    exact: bool = False
    d_max: int | None = None
    diagnostics: list[str] = field(default_factory=list)


def _observed_and_stars(model: DessinModel, side: str) -> tuple[list[tuple[int, ...]], list[tuple[int, ...]]]:
    if side == "faces":
        return model.face_words(), model.vertex_words()
    if side == "vertices":
        return model.vertex_words(), model.face_words()
    raise ArgumentError(f"side must be 'faces' or 'vertices', got {side!r}")


def _prepare(model: DessinModel, sources: SourceAssignment, ens: EnsembleSpec, side: str):
    if ens.n != model.n:
        raise ArgumentError(f"ensemble has {ens.n} edges, model has {model.n}")
    if not isinstance(sources, SourceAssignment):
        sources = SourceAssignment(dict(sources))
    sources.check(model.n, ens.N)
    observed, stars = _observed_and_stars(model, side)
    mats = monodromy_products(stars, sources)
    exact = sources.exact and isinstance(ens.hbar, Fraction)
    return observed, stars, mats, exact


def _zero(exact: bool) -> Any:
    return Fraction(0) if exact else 0j


def _finish(value: Any, exact: bool) -> Any:
    if exact:
        return Fraction(value)
    try:
        return complex(value)
    except TypeError:
        # symbolic parameters stay symbolic
        return value


def trace_product_expectation(
    model: DessinModel, sources: SourceAssignment, ens: EnsembleSpec, side: str = "faces"
) -> ClosedFormResult:
    """E of prod tr over the dressed words on one side = hbar^n1 N^-n2 prod tr over the other side."""
    _, _, mats, exact = _prepare(model, sources, ens, side)
    value: Any = ens.hbar**ens.n1 * Fraction(1, ens.N**ens.n2)
    for w in mats:
        value = value * power_sum_eval(Partition((1,)), w)
    return ClosedFormResult(_finish(value, exact), "trace", side, exact=exact)


def schur_expectation(
    model: DessinModel,
    sources: SourceAssignment,
    ens: EnsembleSpec,
    lams: Sequence[Partition],
    side: str = "faces",
) -> ClosedFormResult:
    """E of prod_i s_{lam_i} over the dressed words of one side."""
    observed, _, mats, exact = _prepare(model, sources, ens, side)
    lams = [Partition(p) for p in lams]
    if len(lams) != len(observed):
        raise ArgumentError(f"need {len(observed)} partitions, got {len(lams)}")
    if len(set(lams)) > 1:
        return ClosedFormResult(_zero(exact), "schur", side, exact=exact, diagnostics=["partitions differ"])
    lam = lams[0]
    if len(lam) > ens.N:
        return ClosedFormResult(_zero(exact), "schur", side, exact=exact, diagnostics=[f"length of {lam} exceeds N"])
    d = lam.weight
    s_inf = dim_over_dfact(lam)
    value: Any = ens.hbar ** (ens.n1 * d) / s_inf**ens.n1 / (pochhammer_lambda(ens.N, lam) * s_inf) ** ens.n2
    for w in mats:
        value = value * schur_eval_matrix(lam, w)
    return ClosedFormResult(_finish(value, exact), "schur", side, exact=exact)


def exact_det(mat: np.ndarray) -> Any:
    """Determinant by elimination; exact for Fraction entries."""
    if not is_exact_matrix(mat):
        return complex(np.linalg.det(np.asarray(mat, dtype=complex)))
    a = [[Fraction(v) for v in row] for row in mat]
    n = len(a)
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = -det
        det *= a[col][col]
        for r in range(col + 1, n):
            f = a[r][col] / a[col][col]
            if f:
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return det


def shift_ratio(lam: Partition, alpha: int, N: int) -> int:
    """s_lam(p_infty) / s_{lam+alpha}(p_infty) with lam padded to N parts.

    Equals prod_i (lam_i - i + N + 1)_alpha; this is (N+alpha)_lam/(N)_lam times
    the lam-independent constant prod_{k=1}^N (k)_alpha.
    """
    out = 1
    for i, part in enumerate(Partition(lam).padded(N), start=1):
        out *= pochhammer(part - i + N + 1, alpha)
    return out


def schur_det_expectation(
    model: DessinModel,
    sources: SourceAssignment,
    ens: EnsembleSpec,
    lams: Sequence[Partition],
    alphas: Sequence[int],
    side: str = "faces",
) -> ClosedFormResult:
    """E of prod_i s_{lam_i}(W_i) det(W_i)^{alpha_i} over the dressed words of one side."""
    observed, stars, mats, exact = _prepare(model, sources, ens, side)
    lams = [Partition(p) for p in lams]
    alphas = [int(a) for a in alphas]
    if len(lams) != len(observed) or len(alphas) != len(observed):
        raise ArgumentError(f"need {len(observed)} partitions and exponents")
    if any(a < 0 for a in alphas):
        raise ArgumentError("determinant exponents must be nonnegative")
    N = ens.N
    if any(len(lam) > N for lam in lams):
        return ClosedFormResult(_zero(exact), "schur-det", side, exact=exact, diagnostics=["a partition is longer than N"])
    shifted = {lam.shifted(a, N) for lam, a in zip(lams, alphas)}
    if len(shifted) > 1:
        return ClosedFormResult(_zero(exact), "schur-det", side, exact=exact, diagnostics=["shifted partitions differ"])
    alpha = max(alphas)
    lam = lams[alphas.index(alpha)]
    if alpha:
        src = sources if isinstance(sources, SourceAssignment) else SourceAssignment(dict(sources))
        for w in monodromy_products(observed, src):
            if exact_det(w) == 0:
                raise DomainError("a source monodromy is singular")
    dets = [exact_det(w) for w in mats]
    if alpha and any(dt == 0 for dt in dets):
        raise DomainError("a star monodromy is singular")
    d = lam.weight
    s_inf = dim_over_dfact(lam)
    s_shift = s_inf / shift_ratio(lam, alpha, N)
    value: Any = ens.hbar ** (ens.n1 * (d + alpha * N)) / s_shift**ens.n1
    value = value / (pochhammer_lambda(N, lam) * s_inf) ** ens.n2
    for w, dt in zip(mats, dets):
        value = value * schur_eval_matrix(lam, w) * dt**alpha
    return ClosedFormResult(_finish(value, exact), "schur-det", side, exact=exact)


def mixed_expectation(
    model: DessinModel,
    sources: SourceAssignment,
    ens: EnsembleSpec,
    deltas: Sequence[Partition],
    mus: Sequence[Partition],
    side: str = "faces",
) -> ClosedFormResult:
    """E of prod_{i<=k} p_{Delta_i} times prod_{i>k} s_{mu_i}, over the observed words in order."""
    observed, _, mats, exact = _prepare(model, sources, ens, side)
    deltas = [Partition(p) for p in deltas]
    mus = [Partition(p) for p in mus]
    if not deltas or not mus or len(deltas) + len(mus) != len(observed):
        raise ArgumentError(f"need 1 <= k < {len(observed)} power-sum words and the rest Schur words")
    weights = {p.weight for p in deltas} | {mu.weight for mu in mus}
    if len(weights) > 1 or len(set(mus)) > 1:
        return ClosedFormResult(_zero(exact), "mixed", side, exact=exact, diagnostics=["weights or partitions differ"])
    mu = mus[0]
    if len(mu) > ens.N:
        return ClosedFormResult(_zero(exact), "mixed", side, exact=exact, diagnostics=[f"length of {mu} exceeds N"])
    d = mu.weight
    s_inf = dim_over_dfact(mu)
    value: Any = ens.hbar ** (ens.n1 * d) / pochhammer_lambda(ens.N, mu) ** ens.n2 / s_inf ** (ens.n1 + ens.n2)
    for delta in deltas:
        value = value * character(mu, delta)
    for w in mats:
        value = value * schur_eval_matrix(mu, w)
    return ClosedFormResult(_finish(value, exact), "mixed", side, exact=exact)


def power_expectation(
    model: DessinModel,
    sources: SourceAssignment,
    ens: EnsembleSpec,
    deltas: Sequence[Partition],
    side: str = "faces",
    max_tuples: int = POWER_TUPLE_BOUND,
) -> ClosedFormResult:
    """E of prod_i p_{Delta_i} over the observed words, as a weighted Hurwitz expansion over the other side."""
    observed, _, mats, exact = _prepare(model, sources, ens, side)
    deltas = [Partition(p) for p in deltas]
    if len(deltas) != len(observed):
        raise ArgumentError(f"need {len(observed)} partitions, got {len(deltas)}")
    if len({p.weight for p in deltas}) > 1:
        return ClosedFormResult(_zero(exact), "power", side, exact=exact, diagnostics=["weights differ"])
    d = deltas[0].weight
    basis = enumerate_partitions(d)
    count = len(basis) ** len(mats)
    if count > max_tuples:
        raise ScaleGuardError(f"{len(basis)}^{len(mats)} = {count} profile tuples exceeds {max_tuples}")
    euler = model.euler
    p_vals = [{g: power_sum_eval(g, w) for g in basis} for w in mats]
    total: Any = 0
    series = []
    for combo in itertools.product(basis, repeat=len(mats)):
        h = hurwitz_weighted(euler, deltas + list(combo), ens.n2, ens.N)
        if h == 0:
            continue
        term: Any = h
        for j, g in enumerate(combo):
            term = term * p_vals[j][g]
        series.append((combo, h))
        total = total + term
    value: Any = ens.hbar ** (ens.n1 * d) * total
    for delta in deltas:
        value = value * z_of(delta)
    return ClosedFormResult(_finish(value, exact), "power", side, series=series, exact=exact)


RLike = Callable[[int], Any] | None


def theorem_series(
    model: DessinModel,
    sources: SourceAssignment,
    ens: EnsembleSpec,
    rs: Sequence[RLike],
    points: Sequence[PowerSumPoint],
    side: str = "faces",
    d_max: int = 8,
) -> ClosedFormResult:
    """E of prod_i tau_{r_i}(p_i, W_i) over the observed words, truncated at |lam| <= d_max.

    Each tau_r(p, W) = sum_lam r_lam(0) s_lam(p) s_lam(W).
    """
    observed, _, mats, exact = _prepare(model, sources, ens, side)
    if len(rs) != len(observed) or len(points) != len(observed):
        raise ArgumentError(f"need {len(observed)} r-functions and power-sum points")
    n = model.n
    total: Any = 0
    series = []
    diagnostics = []
    for d in range(d_max + 1):
        for lam in enumerate_partitions(d):
            if len(lam) > ens.N:
                continue
            coeff: Any = Fraction(1)
            for r in rs:
                if r is not None:
                    coeff = coeff * content_product(r, 0, lam)
            coeff = coeff / pochhammer_lambda(ens.N, lam) ** ens.n2
            coeff = coeff * ens.hbar ** (ens.n1 * d) / dim_over_dfact(lam) ** n
            for p in points:
                coeff = coeff * schur_in_p(lam).evaluate(p)
            term = coeff
            for w in mats:
                term = term * schur_eval_matrix(lam, w)
            series.append((lam, term))
            total = total + term
    value = _finish(total, exact and all(isinstance(t, Fraction) for _, t in series))
    if not isinstance(value, Fraction):
        exact = False
    diagnostics.append(f"truncated at |lam| <= {d_max}")
    return ClosedFormResult(value, "theorem", side, series=series, exact=exact, d_max=d_max, diagnostics=diagnostics)
