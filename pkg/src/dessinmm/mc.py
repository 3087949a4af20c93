"""Monte Carlo estimation over Ginibre and Haar-unitary edges."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np

from .dessin import DessinModel
from .errors import ArgumentError
from .partitions import Partition
from .symfunc import schur_in_p

__all__ = [
    "McConfig",
    "McEstimate",
    "sample_ginibre",
    "sample_haar_unitary",
    "estimate",
    "z_scores",
    "Observable",
    "constant_one",
    "trace_product",
    "power_product",
    "schur_product",
    "schur_det_product",
    "mixed_product",
    "exp_trace",
    "coupling_exp",
    "default_workers",
    "BLOCK_SIZE",
    "Z_THRESHOLD",
]

BLOCK_SIZE = 4096
Z_THRESHOLD = 4.0
ROUNDOFF = 1e-10
WORKERS_ENV = "DESSINMM_WORKERS"

# An observable maps the list of dressed monodromy batches, each of shape (B, N, N), to shape (B,).
Observable = Callable[[list[np.ndarray]], np.ndarray]


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class McConfig:
    samples: int = 200_000
    seed: int = 0
    workers: int = 0
    N: int = 3
    hbar: float | None = None

    def __post_init__(self) -> None:
        if self.samples < 2:
            raise ArgumentError("need at least 2 samples")
        if self.workers <= 0:
            object.__setattr__(self, "workers", default_workers())

    @property
    def hbar_value(self) -> float:
        return 1.0 / self.N if self.hbar is None else float(self.hbar)


@dataclass(frozen=True)
class McEstimate:
    mean: complex
    stderr: tuple[float, float]
    samples: int


def sample_ginibre(N: int, hbar: float, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Complex Gaussian entries with E|z|^2 = hbar (variance hbar/2 per real component)."""
    shape = (N, N) if size is None else (size, N, N)
    scale = math.sqrt(hbar / 2)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def sample_haar_unitary(N: int, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """QR of a Ginibre matrix with the phases of diag(R) moved into Q."""
    z = sample_ginibre(N, 1.0, rng, size)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    phases = diag / np.abs(diag)
    return q * phases[..., None, :]


def _block_rng(seed: int, block: int, edge: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(block, edge))))


def _dag(x: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(x, -1, -2))


def _dressed(words: Sequence[tuple[int, ...]], draws: dict[int, np.ndarray], sources: dict[int, np.ndarray]) -> list[np.ndarray]:
    out = []
    for word in words:
        prod = None
        for x in word:
            e = draws[abs(x)]
            factor = (e if x > 0 else _dag(e)) @ sources[x]
            prod = factor if prod is None else prod @ factor
        out.append(prod)
    return out


def _block_stats(values: np.ndarray) -> tuple[int, float, float, float, float]:
    re, im = values.real, values.imag
    mr, mi = float(np.mean(re)), float(np.mean(im))
    return len(values), mr, mi, float(np.sum((re - mr) ** 2)), float(np.sum((im - mi) ** 2))


def _merge(a: tuple, b: tuple) -> tuple:
    # Chan et al. pairwise combination of (count, mean, M2) per component
    na, mra, mia, m2ra, m2ia = a
    nb, mrb, mib, m2rb, m2ib = b
    n = na + nb
    dr, di = mrb - mra, mib - mia
    return (
        n,
        mra + dr * nb / n,
        mia + di * nb / n,
        m2ra + m2rb + dr * dr * na * nb / n,
        m2ia + m2ib + di * di * na * nb / n,
    )


def _source_arrays(sources: Any) -> dict[int, np.ndarray]:
    mats = getattr(sources, "matrices", sources)
    return {int(k): np.asarray(v, dtype=complex) for k, v in mats.items()}


def estimate(
    model: DessinModel,
    sources: Any,
    kinds: Sequence[str],
    observable: Observable,
    cfg: McConfig,
    side: str = "faces",
) -> McEstimate:
    """Sample mean and standard error of observable(dressed monodromies).

    Random numbers come from streams keyed by (seed, block, edge) with a fixed
    block size, so the result does not depend on the number of workers.
    """
    kinds = [str(k).upper() for k in kinds]
    if len(kinds) != model.n:
        raise ArgumentError(f"need {model.n} ensemble kinds, got {len(kinds)}")
    words = model.face_words() if side == "faces" else model.vertex_words()
    if side not in ("faces", "vertices"):
        raise ArgumentError(f"side must be 'faces' or 'vertices', got {side!r}")
    src = _source_arrays(sources)
    for i in range(1, model.n + 1):
        for x in (i, -i):
            if x not in src:
                raise ArgumentError(f"no source matrix for letter {x}")
            if src[x].shape != (cfg.N, cfg.N):
                raise ArgumentError(f"source {x} has shape {src[x].shape}, expected {(cfg.N, cfg.N)}")
    hbar = cfg.hbar_value
    n_blocks = -(-cfg.samples // BLOCK_SIZE)

    def run(block: int) -> tuple:
        size = min(BLOCK_SIZE, cfg.samples - block * BLOCK_SIZE)
        draws = {}
        for e, kind in enumerate(kinds, start=1):
            rng = _block_rng(cfg.seed, block, e)
            draws[e] = sample_ginibre(cfg.N, hbar, rng, size) if kind == "G" else sample_haar_unitary(cfg.N, rng, size)
        values = np.asarray(observable(_dressed(words, draws, src)), dtype=complex)
        if values.shape != (size,):
            values = np.broadcast_to(values, (size,))
        return _block_stats(values)

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            stats = list(pool.map(run, range(n_blocks)))
    else:
        stats = [run(b) for b in range(n_blocks)]
    total = stats[0]
    for s in stats[1:]:
        total = _merge(total, s)
    n, mr, mi, m2r, m2i = total
    se = (math.sqrt(m2r / (n - 1) / n), math.sqrt(m2i / (n - 1) / n))
    return McEstimate(complex(mr, mi), se, n)


def z_scores(closed: complex, est: McEstimate) -> tuple[float, float]:
    """|closed - mean| / stderr per component; the stderr is floored at round-off level
    so observables that are constant across samples compare cleanly."""
    closed = complex(closed)
    floor = ROUNDOFF * (1 + abs(closed))
    out = []
    for diff, se in ((closed.real - est.mean.real, est.stderr[0]), (closed.imag - est.mean.imag, est.stderr[1])):
        out.append(abs(diff) / max(se, floor))
    return out[0], out[1]


# observables


def _power_sums(w: np.ndarray, d: int) -> list[np.ndarray]:
    out = []
    power = w
    for m in range(1, d + 1):
        if m > 1:
            power = power @ w
        out.append(np.trace(power, axis1=-2, axis2=-1))
    return out


def _poly_eval(delta_coeffs: list[tuple[Partition, float]], sums: list[np.ndarray]) -> np.ndarray:
    total = np.zeros_like(sums[0]) if sums else np.ones(1, dtype=complex)
    for delta, c in delta_coeffs:
        term = np.full_like(total, c)
        for part in delta:
            term = term * sums[part - 1]
        total = total + term
    return total


def _schur_batch(lam: Partition, w: np.ndarray) -> np.ndarray:
    lam = Partition(lam)
    if not lam:
        return np.ones(w.shape[0], dtype=complex)
    if len(lam) > w.shape[-1]:
        return np.zeros(w.shape[0], dtype=complex)
    coeffs = [(k, float(v)) for k, v in schur_in_p(lam).terms.items()]
    return _poly_eval(coeffs, _power_sums(w, lam.weight))


def _power_batch(delta: Partition, w: np.ndarray) -> np.ndarray:
    delta = Partition(delta)
    if not delta:
        return np.ones(w.shape[0], dtype=complex)
    sums = _power_sums(w, delta[0])
    out = np.ones(w.shape[0], dtype=complex)
    for part in delta:
        out = out * sums[part - 1]
    return out


def constant_one() -> Observable:
    return lambda ws: np.ones(ws[0].shape[0], dtype=complex)


def trace_product() -> Observable:
    def f(ws: list[np.ndarray]) -> np.ndarray:
        out = np.ones(ws[0].shape[0], dtype=complex)
        for w in ws:
            out = out * np.trace(w, axis1=-2, axis2=-1)
        return out

    return f


def power_product(deltas: Sequence[Partition]) -> Observable:
    deltas = [Partition(p) for p in deltas]

    def f(ws: list[np.ndarray]) -> np.ndarray:
        out = np.ones(ws[0].shape[0], dtype=complex)
        for delta, w in zip(deltas, ws, strict=True):
            out = out * _power_batch(delta, w)
        return out

    return f


def schur_product(lams: Sequence[Partition]) -> Observable:
    lams = [Partition(p) for p in lams]

    def f(ws: list[np.ndarray]) -> np.ndarray:
        out = np.ones(ws[0].shape[0], dtype=complex)
        for lam, w in zip(lams, ws, strict=True):
            out = out * _schur_batch(lam, w)
        return out

    return f


def schur_det_product(lams: Sequence[Partition], alphas: Sequence[int]) -> Observable:
    lams = [Partition(p) for p in lams]

    def f(ws: list[np.ndarray]) -> np.ndarray:
        out = np.ones(ws[0].shape[0], dtype=complex)
        for lam, a, w in zip(lams, alphas, ws, strict=True):
            out = out * _schur_batch(lam, w) * np.linalg.det(w) ** a
        return out

    return f


def mixed_product(deltas: Sequence[Partition], mus: Sequence[Partition]) -> Observable:
    k = len(deltas)
    pw, sc = power_product(deltas), schur_product(mus)
    return lambda ws: pw(ws[:k]) * sc(ws[k:])


def exp_trace(alpha: complex, index: int = 0) -> Observable:
    return lambda ws: np.exp(alpha * np.trace(ws[index], axis1=-2, axis2=-1))


def coupling_exp(couplings: Sequence[Sequence[complex]]) -> Observable:
    """exp(sum_i sum_m c_{i,m} tr W_i^m / m) with couplings[i] = [c_{i,1}, c_{i,2}, ...]."""

    def f(ws: list[np.ndarray]) -> np.ndarray:
        expo = np.zeros(ws[0].shape[0], dtype=complex)
        for c, w in zip(couplings, ws, strict=True):
            if not len(c):
                continue
            sums = _power_sums(w, len(c))
            for m, cm in enumerate(c, start=1):
                expo = expo + cm * sums[m - 1] / m
        return np.exp(expo)

    return f

