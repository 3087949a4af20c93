from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from dessinmm.partitions import Partition, dim_over_dfact, enumerate_partitions, pochhammer, pochhammer_lambda
from dessinmm.symfunc import (
    PowerSumPoint,
    SymPolynomial,
    char_map,
    elementary_schur,
    power_sum_eval,
    power_sums_of,
    qt_pochhammer_lambda,
    schur_eval_matrix,
    schur_in_p,
    schur_special,
)

P = sympy.symbols("p1:9")
Q = sympy.symbols("q1:9")
T = sympy.Symbol("t")


def to_sympy(poly: SymPolynomial, symbols=P) -> sympy.Expr:
    return sum(
        (sympy.Rational(c.numerator, c.denominator) * sympy.prod([symbols[k - 1] for k in delta]) for delta, c in poly.terms.items()),
        sympy.Integer(0),
    )


def test_elementary_schur_examples() -> None:
    assert elementary_schur(0) == SymPolynomial.one()
    assert to_sympy(elementary_schur(2)) == (P[0] ** 2 + P[1]) / 2
    assert sympy.expand(to_sympy(elementary_schur(3)) - (P[0] ** 3 + 3 * P[0] * P[1] + 2 * P[2]) / 6) == 0
    assert elementary_schur(-1) == SymPolynomial.zero()


def test_elementary_schur_matches_exponential_series() -> None:
    gen = sympy.exp(sum(P[k - 1] * T**k / k for k in range(1, 7)))
    series = sympy.expand(sympy.series(gen, T, 0, 7).removeO())
    for m in range(7):
        assert sympy.expand(series.coeff(T, m) - to_sympy(elementary_schur(m))) == 0


def test_schur_in_p_examples() -> None:
    assert schur_in_p(Partition((1,))) == SymPolynomial.monomial(Partition((1,)))
    assert to_sympy(schur_in_p(Partition((1, 1)))) == (P[0] ** 2 - P[1]) / 2
    for d in range(7):
        for lam in enumerate_partitions(d):
            poly = schur_in_p(lam)
            assert poly.homogeneous
            assert poly.degree == d


def test_schur_in_p_matches_bialternant_symbolically() -> None:
    # oracle: sympy bialternant in three variables vs schur_in_p at symbolic power sums
    x = sympy.symbols("x1:4")
    n = 3
    vand = sympy.prod([x[i] - x[j] for i in range(n) for j in range(i + 1, n)])
    sums = [sum(v**m for v in x) for m in range(1, 6)]
    for d in range(5):
        for lam in enumerate_partitions(d):
            if len(lam) > n:
                continue
            h = [p + n - 1 - i for i, p in enumerate(lam.padded(n))]
            num = sympy.Matrix(n, n, lambda i, j: x[j] ** h[i]).det()
            bialt = sympy.cancel(num / vand)
            ours = sympy.expand(to_sympy(schur_in_p(lam)).subs({P[k]: sums[k] for k in range(5)}))
            assert sympy.expand(bialt - ours) == 0


def test_conjugation_sign_rule() -> None:
    for d in range(7):
        for lam in enumerate_partitions(d):
            lhs = schur_in_p(lam)
            rhs = schur_in_p(lam.conjugate()).negate_variables() * (-1) ** d
            assert lhs == rhs


def test_schur_eval_matrix_examples() -> None:
    x = np.array([[1.0, 2.0], [0.5, -1.0]])
    assert schur_eval_matrix(Partition((1,)), x) == pytest.approx(np.trace(x))
    assert schur_eval_matrix(Partition((1, 1)), np.array([[2.0]])) == 0
    bialt = schur_eval_matrix(Partition((2, 1)), np.diag([1.0, 2.0, 3.0]))
    p_route = schur_in_p(Partition((2, 1))).evaluate([6, 14, 36])
    assert abs(bialt - p_route) < 1e-10


def test_schur_eval_routes_agree_on_random_matrices() -> None:
    rng = np.random.default_rng(11)
    parts = [lam for d in range(1, 7) for lam in enumerate_partitions(d) if len(lam) <= 4]
    for _ in range(100):
        x = (rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))) / 2
        sums = power_sums_of(x, 6)
        for lam in parts:
            a = schur_eval_matrix(lam, x)
            b = schur_in_p(lam).evaluate(sums)
            assert abs(a - b) <= 1e-9 * max(1.0, abs(b))


def test_degenerate_spectrum_falls_back() -> None:
    x = np.eye(3)
    assert schur_eval_matrix(Partition((2, 1)), x) == pytest.approx(complex(pochhammer_lambda(3, Partition((2, 1))) * dim_over_dfact(Partition((2, 1)))))


def test_exact_matrix_stays_exact() -> None:
    x = np.empty((2, 2), dtype=object)
    x[0, 0], x[0, 1], x[1, 0], x[1, 1] = Fraction(1, 2), Fraction(1), Fraction(0), Fraction(3)
    value = schur_eval_matrix(Partition((1, 1)), x)
    assert value == Fraction(3, 2)


def test_power_sum_eval_examples() -> None:
    x = np.diag([1.0, 2.0])
    assert power_sum_eval(Partition(), x) == 1
    assert power_sum_eval(Partition((2,)), x) == pytest.approx(5)
    assert power_sum_eval(Partition((2, 1)), x) == pytest.approx(15)


def test_char_map_small_cases() -> None:
    assert char_map("forward", Partition((1,))) == {Partition((1,)): 1}
    assert char_map("backward", Partition((1,))) == SymPolynomial.monomial(Partition((1,)))
    assert char_map("forward", Partition((2,))) == {Partition((2,)): 1, Partition((1, 1)): -1}


def test_char_map_round_trip() -> None:
    for d in range(7):
        basis = enumerate_partitions(d)
        for delta in basis:
            expansion = char_map("forward", delta)
            total = SymPolynomial.zero()
            for lam, c in expansion.items():
                total = total + char_map("backward", lam) * c
            assert total == SymPolynomial.monomial(delta)
        for lam in basis:
            assert char_map("backward", lam) == schur_in_p(lam)


def test_schur_special_points() -> None:
    N, a = sympy.symbols("N a")
    assert sympy.expand(schur_special(Partition((1,)), "identity", N)) == N
    two = schur_special(Partition((2,)), "geometric", a)
    assert sympy.expand(two - a * (a + 1) / 2) == 0
    assert sympy.expand(schur_in_p(Partition((2,))).evaluate([a, a]) - two) == 0
    assert schur_special(Partition((1, 1)), "rank", 5, 1) == 0
    assert schur_special(Partition((3, 1)), "p_infty") == dim_over_dfact(Partition((3, 1)))


def test_identity_and_rank_points_match_matrices() -> None:
    for lam in enumerate_partitions(4):
        ident = schur_eval_matrix(lam, np.eye(3))
        assert abs(ident - float(schur_special(lam, "identity", 3))) < 1e-9
        proj = np.diag([1.0, 1.0, 0.0, 0.0])
        assert abs(schur_eval_matrix(lam, proj) - float(schur_special(lam, "rank", 4, 2))) < 1e-9


def test_qt_specialization() -> None:
    q, t = Fraction(1, 3), Fraction(1, 2)
    point = PowerSumPoint.qt(q, t)
    for d in range(5):
        for lam in enumerate_partitions(d):
            direct = schur_in_p(lam).evaluate(point)
            assert direct == schur_special(lam, "qt", q, t)
    assert qt_pochhammer_lambda(q, t, Partition()) == 1


def test_qt_specialization_at_q_power_of_t() -> None:
    # q = t^k: p_m = 1 + t^m + ... + t^{(k-1)m}, i.e. the point (1, t, ..., t^{k-1})
    t = Fraction(1, 3)
    k = 2
    lam = Partition((2, 1))
    direct = schur_in_p(lam).evaluate([sum(t ** (m * j) for j in range(k)) for m in range(1, 4)])
    assert direct == schur_special(lam, "qt", t**k, t)


def test_determinant_shift_property() -> None:
    rng = np.random.default_rng(3)
    for _ in range(10):
        x = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)) + 2 * np.eye(3)
        det = np.linalg.det(x)
        for d in range(5):
            for lam in enumerate_partitions(d):
                if len(lam) > 3:
                    continue
                for alpha in (1, 2):
                    lhs = schur_eval_matrix(lam, x) * det**alpha
                    rhs = schur_eval_matrix(lam.shifted(alpha, 3), x)
                    assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(rhs))


def test_shift_ratio_of_dimensions() -> None:
    # s_lam(p_infty)/s_{lam+alpha}(p_infty) = prod_i (lam_i - i + N + 1)_alpha, which is
    # (N+alpha)_lam/(N)_lam times prod_{k=1}^N (k)_alpha
    for N in (1, 2, 3):
        for alpha in (1, 2):
            const = math.prod(pochhammer(k, alpha) for k in range(1, N + 1))
            for d in range(5):
                for lam in enumerate_partitions(d):
                    if len(lam) > N:
                        continue
                    ratio = dim_over_dfact(lam) / dim_over_dfact(lam.shifted(alpha, N))
                    gamma_form = math.prod(pochhammer(p - i + N + 1, alpha) for i, p in enumerate(lam.padded(N), start=1))
                    assert ratio == gamma_form
                    printed = Fraction(pochhammer_lambda(N + alpha, lam), pochhammer_lambda(N, lam))
                    assert ratio == printed * const


def test_cauchy_identity_through_degree_six() -> None:
    gen = sympy.exp(sum(P[m - 1] * Q[m - 1] * T**m / m for m in range(1, 7)))
    series = sympy.expand(sympy.series(gen, T, 0, 7).removeO())
    for d in range(7):
        total = sum((to_sympy(schur_in_p(lam), P) * to_sympy(schur_in_p(lam), Q) for lam in enumerate_partitions(d)), sympy.Integer(0))
        assert sympy.expand(series.coeff(T, d) - total) == 0


def test_derivative_p1_lowers_one_row_schur() -> None:
    for m in range(1, 8):
        assert elementary_schur(m).derivative_p1() == elementary_schur(m - 1)


def test_json_round_trip() -> None:
    for lam in enumerate_partitions(5):
        poly = schur_in_p(lam)
        assert SymPolynomial.from_json(poly.to_json()) == poly
    rows = schur_in_p(Partition((1, 1))).to_json()
    assert {"exponents": [2], "coeff": "1/2"} in rows
    assert {"exponents": [0, 1], "coeff": "-1/2"} in rows


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(min_value=1, max_value=4), min_size=1, max_size=3), st.integers(min_value=-5, max_value=5))
def test_scaled_point_picks_up_weight(parts: list[int], z: int) -> None:
    lam = Partition.from_unsorted(parts)
    base = PowerSumPoint.from_values([Fraction(1, 2), Fraction(-1, 3), Fraction(2), Fraction(1, 5), 1, 1, 1, 1, 1, 1, 1, 1])
    poly = schur_in_p(lam)
    assert poly.evaluate(base.scaled(z)) == z**lam.weight * poly.evaluate(base)
