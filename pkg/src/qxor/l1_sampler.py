"""Fourier l1-sampling and sparsification of l1-bounded approximators.

Drawing ``M`` characters with probability ``|g^(a)| / ||g^||_1`` and
averaging their signed characters gives a function ``h`` with at most ``M``
nonzero coefficients that is uniformly ``delta``-close to ``g`` except with
probability ``lambda``, once ``M`` is large enough for a Hoeffding tail bound
union-bounded over all ``2**n`` points.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .boolean_core import RealFunction
from .fourier import FourierSpectrum, inverse_wht, wht

MAX_SAMPLES = 2**31


def hoeffding_tail(num_vars: int, t: float) -> float:
    """Two-sided tail bound for a sum of ``num_vars`` variables in [-1, 1]."""
    if num_vars < 1 or t < 0:
        raise ValueError("need num_vars >= 1 and t >= 0")
    return 2.0 * math.exp(-t * t / (4.0 * num_vars))


def _failure_bound(m: int, l1: float, n: int, delta: float) -> float:
    return 2.0 ** (n + 1) * math.exp(-delta * delta * m / (4.0 * l1 * l1))


def required_samples(l1: float, n: int, delta: float, lam: float) -> int:
    """Smallest ``M`` with ``2**(n+1) exp(-delta**2 M / (4 l1**2)) <= lam``."""
    if not (l1 > 0 and delta > 0 and 0 < lam < 1):
        raise ValueError("need l1 > 0, delta > 0 and 0 < lambda < 1")
    m = math.ceil(4.0 * l1 * l1 / (delta * delta) * ((n + 1) * math.log(2.0) - math.log(lam)))
    m = max(m, 1)
    # guard the closed form against rounding at the boundary
    while _failure_bound(m, l1, n, delta) > lam:
        m += 1
    while m > 1 and _failure_bound(m - 1, l1, n, delta) <= lam:
        m -= 1
    if m > MAX_SAMPLES:
        raise OverflowError(f"required sample count {m} exceeds {MAX_SAMPLES}")
    return m


@dataclass(frozen=True)
class SparsifierParams:
    delta: float
    lam: float
    sample_count: int

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        if not 0 < self.lam < 1:
            raise ValueError("lambda must lie in (0, 1)")
        if self.sample_count < 1:
            raise ValueError("sample_count must be at least 1")

    @classmethod
    def for_norm(cls, l1: float, n: int, delta: float, lam: float) -> "SparsifierParams":
        return cls(delta, lam, required_samples(l1, n, delta, lam))


def _sampling_table(s: FourierSpectrum):
    support = np.flatnonzero(s.coeffs)
    if support.size == 0:
        raise ValueError("cannot l1-sample from an empty spectrum")
    weights = np.abs(s.coeffs[support])
    return support, weights / weights.sum()


def l1_sample(s: FourierSpectrum, rng: np.random.Generator) -> int:
    """One character drawn by inverse CDF over the sorted support."""
    support, probs = _sampling_table(s)
    cdf = np.cumsum(probs)
    i = int(np.searchsorted(cdf, rng.random(), side="right"))
    return int(support[min(i, support.size - 1)])


def l1_samples(s: FourierSpectrum, count: int, rng: np.random.Generator) -> np.ndarray:
    support, probs = _sampling_table(s)
    cdf = np.cumsum(probs)
    idx = np.searchsorted(cdf, rng.random(count), side="right")
    return support[np.minimum(idx, support.size - 1)]


def sparsify(g: RealFunction, params: SparsifierParams, rng: np.random.Generator) -> RealFunction:
    """``h = (||g^||_1 / M) sum_i sign(g^(a_i)) chi_{a_i}`` for M l1-samples.

    Repeated characters are merged. The sample counts are drawn jointly from
    the multinomial law of ``M`` independent draws, so huge ``M`` costs
    nothing extra.
    """
    s = wht(g)
    support, probs = _sampling_table(s)
    m = params.sample_count
    counts = rng.multinomial(m, probs)
    coeffs = np.zeros(1 << g.n)
    coeffs[support] = s.l1 / m * np.sign(s.coeffs[support]) * counts
    return inverse_wht(FourierSpectrum(g.n, coeffs))


def sup_distance(a, b) -> float:
    if a.n != b.n:
        raise ValueError("sup distance between functions of different arity")
    return float(np.max(np.abs(np.asarray(a.values, float) - np.asarray(b.values, float))))
