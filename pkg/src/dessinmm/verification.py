"""Named suites comparing closed forms with Monte Carlo estimates."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Sequence

import numpy as np

from .dessin import DessinModel, from_faces
from .errors import ArgumentError
from .expectation import (
    EnsembleSpec,
    SourceAssignment,
    mixed_expectation,
    power_expectation,
    schur_det_expectation,
    schur_expectation,
    trace_product_expectation,
)
from .mc import (
    McConfig,
    Observable,
    Z_THRESHOLD,
    coupling_exp,
    estimate,
    exp_trace,
    mixed_product,
    power_product,
    schur_det_product,
    schur_product,
    trace_product,
    z_scores,
)
from .partitions import Partition, enumerate_partitions, pochhammer_lambda
from .symfunc import PowerSumPoint
from .tau import hciz, morozov_series

__all__ = [
    "CaseSpec",
    "CaseReport",
    "verify",
    "run_suite",
    "build_suite",
    "SUITES",
    "FIGURE1",
    "EXAMPLE1",
    "random_sources",
]

# The five connected two-edge maps of the first figure, as face word sets.
FIGURE1 = {
    "a": [(1, 2, -1, -2)],
    "b": [(1, -1, 2, -2)],
    "c": [(-1, -2), (1,), (2,)],
    "d": [(1, 2), (-2, -1)],
    "e": [(1, 2, -1), (-2,)],
}
EXAMPLE1 = [(1,), (-1,)]


@dataclass
class CaseSpec:
    name: str
    model: DessinModel
    kinds: tuple[str, ...]
    sources: SourceAssignment
    observable: Observable
    closed: Callable[[], Any]
    side: str = "faces"
    N: int | None = None
    expect: str = "agree"
    note: str = ""


@dataclass
class CaseReport:
    name: str
    closed: complex
    mean: complex
    stderr: tuple[float, float]
    z: tuple[float, float]
    agrees: bool
    passed: bool
    expect: str
    samples: int
    N: int
    note: str = ""

    def to_json(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "closed": [self.closed.real, self.closed.imag],
            "mean": [self.mean.real, self.mean.imag],
            "stderr": list(self.stderr),
            "z": list(self.z),
            "expect": self.expect,
            "agrees": self.agrees,
            "pass": self.passed,
            "samples": self.samples,
            "N": self.N,
            "note": self.note,
        }


def verify(case: CaseSpec, cfg: McConfig, threshold: float = Z_THRESHOLD) -> CaseReport:
    """Closed form vs Monte Carlo; agreement means z <= threshold on both components."""
    if case.N is not None and case.N != cfg.N:
        cfg = dataclasses.replace(cfg, N=case.N)
    closed = complex(case.closed())
    est = estimate(case.model, case.sources, case.kinds, case.observable, cfg, case.side)
    z = z_scores(closed, est)
    agrees = max(z) <= threshold
    passed = agrees if case.expect == "agree" else not agrees
    return CaseReport(case.name, closed, est.mean, est.stderr, z, agrees, passed, case.expect, est.samples, cfg.N, case.note)


def random_sources(n: int, N: int, rng: np.random.Generator, exact: bool = False) -> SourceAssignment:
    """Identity plus a random matrix with entries in (1/4)Z (+ i(1/4)Z unless exact)."""
    out = {}
    for i in range(1, n + 1):
        for x in (i, -i):
            re = rng.integers(-3, 4, (N, N))
            if exact:
                mat = np.empty((N, N), dtype=object)
                for a in range(N):
                    for b in range(N):
                        mat[a, b] = Fraction(int(re[a, b]), 4) + (1 if a == b else 0)
            else:
                im = rng.integers(-3, 4, (N, N))
                mat = np.eye(N) + (re + 1j * im) / 4
            out[x] = mat
    return SourceAssignment(out)


def _parts(max_weight: int) -> list[Partition]:
    return [lam for d in range(1, max_weight + 1) for lam in enumerate_partitions(d)]


def _ens(kinds: Sequence[str], N: int, hbar: Any) -> EnsembleSpec:
    return EnsembleSpec(tuple(kinds), N, hbar)


def _lemma_cases(N: int, hbar: Any, rng: np.random.Generator) -> list[CaseSpec]:
    model = from_faces(EXAMPLE1)
    src = random_sources(1, N, rng)
    g, u = _ens("G", N, hbar), _ens("U", N, hbar)
    cases = []
    # the single word (1,-1) is the vertices side of this model
    for lam in _parts(3):
        cases.append(CaseSpec(
            f"lemma-s(ZAZB) lam={lam}", model, ("G",), src, schur_product([lam]),
            lambda lam=lam: schur_expectation(model, src, g, [lam], "vertices").value, "vertices"))
    A, B = src.matrices[1], src.matrices[-1]
    h = float(hbar) if hbar is not None else 1 / N
    tr = np.trace
    cases.append(CaseSpec(
        "lemma-p(ZAZB) delta=2 printed identity", model, ("G",), src, power_product([(2,)]),
        lambda: h * h * (tr(A @ A) * tr(B) ** 2 + tr(A) ** 2 * tr(B @ B)), "vertices"))
    for delta in ((2,), (1, 1), (3,), (2, 1), (1, 1, 1)):
        cases.append(CaseSpec(
            f"lemma-p(ZAZB) delta={Partition(delta)}", model, ("G",), src, power_product([delta]),
            lambda delta=delta: power_expectation(model, src, g, [delta], "vertices").value, "vertices"))
    for lam, alpha in (((), 1), ((1,), 1), ((2,), 1)):
        cases.append(CaseSpec(
            f"lemma-s(ZAZB)det^{alpha} lam={Partition(lam)}", model, ("G",), src, schur_det_product([lam], [alpha]),
            lambda lam=lam, alpha=alpha: schur_det_expectation(model, src, g, [lam], [alpha], "vertices").value,
            "vertices"))
    pairs = [((1,), (1,)), ((2,), (2,)), ((1, 1), (1, 1)), ((2, 1), (2, 1)), ((2,), (1, 1)), ((1,), (2,))]
    for lam, nu in pairs:
        cases.append(CaseSpec(
            f"lemma-s(ZA)s(ZB) lam={Partition(lam)} nu={Partition(nu)}", model, ("G",), src, schur_product([lam, nu]),
            lambda lam=lam, nu=nu: schur_expectation(model, src, g, [lam, nu], "faces").value))
    for lam in _parts(3):
        cases.append(CaseSpec(
            f"lemma-s(UAUB) lam={lam}", model, ("U",), src, schur_product([lam]),
            lambda lam=lam: schur_expectation(model, src, u, [lam], "vertices").value, "vertices"))
    small = _parts(2)
    for mu in small:
        for lam in small:
            cases.append(CaseSpec(
                f"lemma-s(UA)s(UB) mu={mu} lam={lam}", model, ("U",), src, schur_product([mu, lam]),
                lambda mu=mu, lam=lam: schur_expectation(model, src, u, [mu, lam], "faces").value))
    return cases


def _prop1_cases(N: int, hbar: Any, rng: np.random.Generator) -> list[CaseSpec]:
    cases = []
    for label, faces in FIGURE1.items():
        model = from_faces(faces)
        src = random_sources(2, N, rng)
        for kinds in (("G", "G"), ("G", "U"), ("U", "U")):
            ens = _ens(kinds, N, hbar)
            for side in ("faces", "vertices"):
                cases.append(CaseSpec(
                    f"prop1 graph={label} {''.join(kinds)} {side}", model, kinds, src, trace_product(),
                    lambda model=model, src=src, ens=ens, side=side: trace_product_expectation(model, src, ens, side).value,
                    side))
    return cases


def _prop2_cases(N: int, hbar: Any, rng: np.random.Generator) -> list[CaseSpec]:
    cases = []
    for label, faces in FIGURE1.items():
        model = from_faces(faces)
        src = random_sources(2, N, rng)
        for kinds in (("G", "G"), ("G", "U")):
            ens = _ens(kinds, N, hbar)
            for lam in ((2,), (1, 1)):
                lams = [lam] * model.F
                cases.append(CaseSpec(
                    f"prop2 graph={label} {''.join(kinds)} lam={Partition(lam)}", model, kinds, src, schur_product(lams),
                    lambda model=model, src=src, ens=ens, lams=lams: schur_expectation(model, src, ens, lams).value))
    model = from_faces(FIGURE1["d"])
    src = random_sources(2, N, rng)
    ens = _ens(("G", "G"), N, hbar)
    for delta in ((2,), (1, 1)):
        for mu in ((2,), (1, 1)):
            cases.append(CaseSpec(
                f"prop3 graph=d GG delta={Partition(delta)} mu={Partition(mu)}", model, ("G", "G"), src,
                mixed_product([delta], [mu]),
                lambda delta=delta, mu=mu: mixed_expectation(model, src, ens, [delta], [mu]).value))
    return cases


def _prop4_cases(N: int, hbar: Any, rng: np.random.Generator) -> list[CaseSpec]:
    model = from_faces(EXAMPLE1)
    src = random_sources(1, N, rng)
    g = _ens("G", N, hbar)
    cases = []
    for d in range(1, 4):
        basis = enumerate_partitions(d)
        for da in basis:
            for db in basis:
                cases.append(CaseSpec(
                    f"prop4 faces delta={da}|{db}", model, ("G",), src, power_product([da, db]),
                    lambda da=da, db=db: power_expectation(model, src, g, [da, db], "faces").value))
        for delta in basis:
            cases.append(CaseSpec(
                f"prop4 vertices delta={delta}", model, ("G",), src, power_product([delta]),
                lambda delta=delta: power_expectation(model, src, g, [delta], "vertices").value, "vertices"))
    return cases


def _hciz_cases(N: int, hbar: Any, rng: np.random.Generator) -> list[CaseSpec]:
    model = from_faces([(1, -1)])
    A, B = np.diag([1.0, 2.0]), np.diag([3.0, 5.0])
    src = SourceAssignment({1: A, -1: B})
    cases = []
    for alpha in (0.1, 0.3):
        cases.append(CaseSpec(
            f"hciz N=2 alpha={alpha}", model, ("U",), src, exp_trace(alpha),
            lambda alpha=alpha: hciz(alpha, A, B, 30).closed, N=2))
    return cases


def _morozov_cases(N: int, hbar: Any, rng: np.random.Generator) -> list[CaseSpec]:
    cases = []
    model = from_faces(EXAMPLE1)
    settings = [
        (1, [0.5], [0.5]),
        (2, [0.4, 0.2], [0.3, -0.1]),
    ]
    for size, c, cbar in settings:
        src = SourceAssignment({1: np.eye(size), -1: np.eye(size)})
        p, pbar = PowerSumPoint.from_values(c), PowerSumPoint.from_values(cbar)
        cases.append(CaseSpec(
            f"morozov N={size} p={c} pbar={cbar}", model, ("U",), src, coupling_exp([c, cbar]),
            lambda p=p, pbar=pbar, size=size: morozov_series(p, pbar, size, 12), N=size))
    return cases


def _control_cases(N: int, hbar: Any, rng: np.random.Generator) -> list[CaseSpec]:
    """Cases that must disagree with Monte Carlo."""
    model = from_faces(EXAMPLE1)
    src = random_sources(1, N, rng)
    g = _ens("G", N, hbar)
    A, B = src.matrices[1], src.matrices[-1]
    h = float(hbar) if hbar is not None else 1 / N
    tr = np.trace
    lam = Partition((2,))
    cases = [
        CaseSpec("control: closed form times 1.1", model, ("G",), src, schur_product([lam]),
                 lambda: 1.1 * schur_expectation(model, src, g, [lam], "vertices").value, "vertices", expect="disagree",
                 note="negative control"),
        CaseSpec("control: printed (tr ZAZB)^2 identity", model, ("G",), src, power_product([(1, 1)]),
                 lambda: h * h * tr(A @ A) * tr(B @ B), "vertices", expect="disagree",
                 note="omits the (trA)^2 (trB)^2 term"),
    ]
    detA, detB = np.linalg.det(A), np.linalg.det(B)
    lam1 = Partition((1,))
    cases.append(CaseSpec(
        "control: printed determinant-insertion ratio", model, ("G",), src, schur_det_product([lam1], [1]),
        lambda: h ** (1 + N) * tr(A) * tr(B) * float(pochhammer_lambda(N + 1, lam1) / pochhammer_lambda(N, lam1))
        * detA * detB,
        "vertices", expect="disagree", note="ratio lacks the constant prod_k (k)_alpha"))
    return cases


SUITES: dict[str, Callable[[int, Any, np.random.Generator], list[CaseSpec]]] = {
    "lemmas": _lemma_cases,
    "prop1": _prop1_cases,
    "prop2": _prop2_cases,
    "prop4": _prop4_cases,
    "hciz": _hciz_cases,
    "morozov": _morozov_cases,
    "controls": _control_cases,
}
ALL = ("lemmas", "prop1", "prop2", "prop4", "hciz", "morozov")


def build_suite(name: str, N: int = 3, hbar: Any = None, source_seed: int = 2024) -> list[CaseSpec]:
    names = ALL if name == "all" else (name,)
    cases = []
    for part in names:
        if part not in SUITES:
            raise ArgumentError(f"unknown suite {part!r}; choose from {sorted(SUITES) + ['all']}")
        cases.extend(SUITES[part](N, hbar, np.random.default_rng([source_seed, list(SUITES).index(part)])))
    return cases


def run_suite(name: str, cfg: McConfig, threshold: float = Z_THRESHOLD, source_seed: int = 2024) -> list[CaseReport]:
    hbar = None if cfg.hbar is None else Fraction(cfg.hbar).limit_denominator(10**9)
    return [verify(case, cfg, threshold) for case in build_suite(name, cfg.N, hbar, source_seed)]
