from __future__ import annotations

import cmath
import math
import random
from fractions import Fraction

import numpy as np
import pytest
import sympy

from dessinmm.errors import ArgumentError, DomainError
from dessinmm.partitions import Partition, enumerate_partitions
from dessinmm.symfunc import PowerSumPoint, schur_eval_matrix, schur_in_p
from dessinmm.tau import (
    RFunction,
    complete_homogeneous,
    hciz,
    hciz_constant,
    morozov_series,
    partitions_in_box,
    schur_jacobi_trudi,
    tau_pp_det,
    tau_scalar,
    tau_XY,
    tau_Xp_det,
    unitary_weight,
)

TOL = 1e-8


def small_matrix(rng: np.random.Generator, N: int, scale: float = 0.35) -> np.ndarray:
    return scale * (rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))) / math.sqrt(2 * N)


def random_r(rng: random.Random, vanish_at_zero: bool = False) -> RFunction:
    # offsets in (1/7)Z shifted off the integers keep every factor away from zero;
    # no more numerator than denominator factors, so r stays bounded and the series converge
    k = rng.randint(0, 2)
    a = [Fraction(rng.randint(-20, 20), 7) + Fraction(1, 11) for _ in range(k)]
    b = [Fraction(rng.randint(-20, 20), 7) + Fraction(1, 13) for _ in range(k + vanish_at_zero)]
    if vanish_at_zero:
        a = [Fraction(0)] + a
    return RFunction.ratio(a, b)


def test_rfunction_kinds_and_parse() -> None:
    r = RFunction.parse("p:1/2,3;q:2")
    assert r(1) == Fraction(3, 2) * 4 / 3
    assert RFunction.parse("p:2", "constant")(5) == 2
    assert RFunction.ratio([1])(4) == 5
    assert RFunction.from_table({1: 3})(1) == 3
    assert RFunction.custom(lambda x: x * x)(3) == 9
    assert r.describe() == {"kind": "rational", "a": ["1/2", "3"], "b": ["2"]}
    with pytest.raises(ZeroDivisionError):
        RFunction.rational()(0)
    with pytest.raises(DomainError):
        RFunction.from_table({1: 3})(2)
    with pytest.raises(ArgumentError):
        RFunction.parse("z:1")


def test_partitions_in_box_count() -> None:
    for rows in range(4):
        for cols in range(4):
            parts = list(partitions_in_box(rows, cols))
            assert len(parts) == math.comb(rows + cols, rows)
            assert len(set(parts)) == len(parts)


def test_complete_homogeneous_routes() -> None:
    x = [0.3, -0.2 + 0.1j, 0.5]
    direct = complete_homogeneous(x, 6)
    sums = [sum(v**m for v in x) for m in range(1, 7)]
    assert np.allclose(direct, complete_homogeneous(sums, 6, from_power_sums=True))
    lam = Partition((2, 1))
    assert abs(schur_jacobi_trudi(lam, direct) - schur_eval_matrix(lam, np.diag(x))) < 1e-12


def test_tau_scalar_geometric() -> None:
    assert abs(tau_scalar(RFunction.constant(1), 0, 0.5, 80) - 2) < 1e-12
    assert tau_scalar(RFunction.constant(1), 0, Fraction(1, 2), 3) == Fraction(15, 8)


def test_tau_scalar_binomial_series() -> None:
    # r(x) = (a - 1 + x)/x gives sum (a)_m x^m / m! = (1 - x)^{-a}
    for a in (Fraction(5, 2), Fraction(-1, 3), Fraction(2)):
        r = RFunction.rational([a - 1])
        value = tau_scalar(r, 0, 0.3, 30)
        assert abs(value - (1 - 0.3) ** (-float(a))) < 1e-10


def test_tau_scalar_pole() -> None:
    with pytest.raises(DomainError, match="pole at 0"):
        tau_scalar(RFunction.rational(), -1, 0.5, 3)


def test_tau_xy_cauchy_kernel() -> None:
    x = np.array([0.3, -0.2, 0.1j])
    y = np.array([0.25, 0.4, -0.15])
    res = tau_XY(RFunction.constant(1), 0, np.diag(x), np.diag(y), 40)
    closed = np.prod([1 / (1 - xi * yj) for xi in x for yj in y])
    assert abs(res.series - closed) < 1e-10
    assert abs(res.determinant - closed) < 1e-10


def test_tau_xy_random_instances() -> None:
    rng = np.random.default_rng(10)
    prng = random.Random(10)
    worst = 0.0
    for _ in range(50):
        N = prng.randint(1, 3)
        r = random_r(prng)
        n = prng.randint(-2, 3)
        res = tau_XY(r, n, small_matrix(rng, N), small_matrix(rng, N), 12)
        assert res.determinant is not None, res.diagnostics
        worst = max(worst, res.discrepancy)
    assert worst < TOL


def test_tau_xy_degenerate_spectrum_refused() -> None:
    res = tau_XY(RFunction.constant(1), 0, np.eye(2) * 0.3, np.diag([0.1, 0.2]), 8)
    assert res.determinant is None
    assert "degenerate" in res.diagnostics[-1]
    with pytest.raises(ArgumentError):
        tau_XY(RFunction.constant(1), 0, np.eye(2), np.eye(3), 4)


def test_tau_xy_normalization_convention() -> None:
    # det[tau(n-N, x_i y_j)] / (V V K) tracks the series; the alternative with tau(n-N+1)
    # entries is not a constant multiple of it
    rng = np.random.default_rng(12)
    r = RFunction.ratio([Fraction(3, 2)], [Fraction(5, 3)])
    n, N, cap = 1, 2, 14
    ratios = []
    for _ in range(3):
        X, Y = small_matrix(rng, N, 0.6), small_matrix(rng, N, 0.6)
        res = tau_XY(r, n, X, Y, cap)
        assert res.discrepancy < TOL
        x, y = np.linalg.eigvals(X), np.linalg.eigvals(Y)
        alt = np.linalg.det(np.array([[complex(tau_scalar(r, n - N + 1, xi * yj, cap)) for yj in y] for xi in x]))
        alt /= (x[0] - x[1]) * (y[0] - y[1])
        ratios.append(alt / res.series)
    assert max(abs(q - ratios[0]) for q in ratios) > 1e-3


def test_tau_pp_random_instances() -> None:
    prng = random.Random(20)
    worst = 0.0
    for _ in range(50):
        n = prng.randint(1, 3)
        r = random_r(prng, vanish_at_zero=True)
        p1 = PowerSumPoint.from_values([prng.uniform(-0.4, 0.4) for _ in range(20)])
        p2 = PowerSumPoint.from_values([prng.uniform(-0.4, 0.4) for _ in range(20)])
        res = tau_pp_det(r, n, p1, p2, 12)
        assert res.determinant is not None, res.diagnostics
        worst = max(worst, res.discrepancy)
    assert worst < TOL


def test_tau_pp_identity_r() -> None:
    # r(x) = x: r_lam(n) = (n)_lam, so n = 1 keeps only one-row partitions
    r = RFunction.ratio([0])
    p1 = PowerSumPoint.from_values([0.3, -0.1, 0.2])
    p2 = PowerSumPoint.from_values([0.5, 0.2])
    one = tau_pp_det(r, 1, p1, p2, 20)
    expected = sum(math.factorial(m) * complex(schur_in_p(Partition((m,))).evaluate(p1)) * complex(schur_in_p(Partition((m,))).evaluate(p2)) for m in range(21))
    assert abs(one.series - expected) < 1e-12
    assert one.discrepancy < TOL
    two = tau_pp_det(r, 2, p1, p2, 14)
    assert two.discrepancy < TOL


def test_tau_pp_requires_vanishing_r0() -> None:
    with pytest.raises(ArgumentError, match="r\\(0\\)"):
        tau_pp_det(RFunction.constant(1), 2, PowerSumPoint.infinity(), PowerSumPoint.infinity(), 5)
    with pytest.raises(ArgumentError):
        tau_pp_det(RFunction.ratio([0]), 0, PowerSumPoint.infinity(), PowerSumPoint.infinity(), 5)


def test_tau_xp_random_instances() -> None:
    rng = np.random.default_rng(30)
    prng = random.Random(30)
    worst = 0.0
    for _ in range(50):
        N = prng.randint(1, 3)
        r = random_r(prng)
        n = prng.randint(-2, 3)
        p = PowerSumPoint.from_values([prng.uniform(-0.5, 0.5) for _ in range(20)])
        res = tau_Xp_det(r, n, small_matrix(rng, N), p, 12)
        assert res.determinant is not None, res.diagnostics
        worst = max(worst, res.discrepancy)
    assert worst < TOL


def test_tau_xp_exponential_of_trace() -> None:
    rng = np.random.default_rng(31)
    X = small_matrix(rng, 3, 1.0)
    res = tau_Xp_det(RFunction.constant(1), 0, X, PowerSumPoint.infinity(), 30)
    closed = cmath.exp(np.trace(X))
    assert abs(res.series - closed) < 1e-10
    assert abs(res.determinant - closed) < 1e-10


def test_tau_xp_scalar_case() -> None:
    r = RFunction.rational([Fraction(1, 2)])
    res = tau_Xp_det(r, 2, np.array([[0.4]]), PowerSumPoint.constant(1), 25)
    assert abs(res.series - tau_scalar(r, 1, 0.4, 25)) < 1e-12


def test_tau_xy_degenerates_to_xp() -> None:
    rng = np.random.default_rng(32)
    r = RFunction.ratio([Fraction(2, 3)], [Fraction(7, 5)])
    X = small_matrix(rng, 2, 0.5)
    y = 0.45
    xy = tau_XY(r, 1, X, np.diag([y, 0.0]), 14)
    xp = tau_Xp_det(r, 1, X, PowerSumPoint(lambda m: y**m), 14)
    assert abs(xy.series - xp.series) < 1e-12
    assert abs(xy.determinant - xp.determinant) < TOL


def test_hciz_random_instances() -> None:
    rng = np.random.default_rng(40)
    worst = 0.0
    for _ in range(50):
        N = int(rng.integers(1, 4))
        alpha = float(rng.uniform(0.05, 0.5))
        A = np.diag(rng.uniform(-1, 1, N))
        B = np.diag(rng.uniform(-1, 1, N))
        res = hciz(alpha, A, B, 24)
        assert res.determinant is not None
        worst = max(worst, res.discrepancy, abs(res.series - res.closed) / abs(res.closed))
    assert worst < TOL


def test_hciz_special_cases() -> None:
    res = hciz(0.7, np.array([[0.5]]), np.array([[-0.3]]), 30)
    assert abs(res.series - cmath.exp(0.7 * 0.5 * -0.3)) < 1e-12
    assert hciz(0, np.eye(2), np.eye(2), 5).series == 1
    value = hciz(0.1, np.diag([1.0, 2.0]), np.diag([3.0, 5.0]), 40)
    assert abs(value.closed - 3.3256532183) < 1e-9
    assert abs(value.series - value.closed) < 1e-9
    assert hciz_constant(1, 3) == 2
    assert unitary_weight(2, Partition((1, 1))) == Fraction(1, 2)


def test_hciz_small_alpha_limit() -> None:
    res = hciz(1e-4, np.diag([1.0, 2.0]), np.diag([3.0, 5.0]), 10)
    assert abs(res.closed - 1) < 1e-2
    assert abs(res.series - 1) < 1e-2


def test_morozov_zero_couplings() -> None:
    zero = PowerSumPoint.from_values([])
    assert morozov_series(zero, PowerSumPoint.from_values([0.3]), 2, 8) == 1


def test_morozov_large_n_is_cauchy_kernel() -> None:
    t = sympy.Symbol("t")
    p = [Fraction(1, 2), Fraction(-1, 3), Fraction(1, 5)]
    q = [Fraction(1, 4), Fraction(2, 3), Fraction(-1, 2)]
    cap = 5
    gen = sympy.exp(sum(sympy.Rational(p[m - 1] * q[m - 1]) * t**m / m for m in range(1, 4)))
    series = sympy.series(gen, t, 0, cap + 1).removeO().subs(t, 1)
    value = morozov_series(PowerSumPoint.from_values(p), PowerSumPoint.from_values(q), cap, cap)
    assert sympy.Rational(value) == sympy.nsimplify(series)


def test_morozov_row_restriction() -> None:
    p = PowerSumPoint.from_values([Fraction(1, 2), Fraction(1, 3)])
    full = morozov_series(p, p, 4, 4)
    one_row = morozov_series(p, p, 1, 4)
    dropped = sum(schur_in_p(lam).evaluate(p) ** 2 for d in range(5) for lam in enumerate_partitions(d) if len(lam) > 1)
    assert full - one_row == dropped
