"""Walsh-Hadamard analysis: spectra, norms, supports and sumsets.

Coefficients follow the normalisation ``f^(a) = 2**-n sum_x f(x) chi_a(x)``,
so ``f = sum_a f^(a) chi_a`` and a +-1 function has unit l2 spectrum norm.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np

from .boolean_core import BooleanFunction, RealFunction, chi, int_to_bits
from .simplex import solve_lp

ZERO_TOL = 1e-9


def fwht(a, axis: int = -1) -> np.ndarray:
    """Unnormalised fast Walsh-Hadamard butterfly along ``axis``.

    ``out[alpha] = sum_x a[x] (-1)**popcount(alpha & x)``; O(n 2**n).
    """
    a = np.moveaxis(np.array(a, dtype=np.float64, copy=True), axis, -1)
    size = a.shape[-1]
    if size & (size - 1):
        raise ValueError(f"length {size} is not a power of two")
    lead = a.shape[:-1]
    h = 1
    while h < size:
        a = a.reshape(*lead, -1, 2, h)
        lo, hi = a[..., 0, :], a[..., 1, :]
        a = np.stack((lo + hi, lo - hi), axis=-2)
        h *= 2
    return np.moveaxis(a.reshape(*lead, size), -1, axis)


@dataclass(frozen=True)
class SupportSet:
    """A sorted, duplicate-free set of characters in {0,1}^n."""

    n: int
    elements: tuple

    def __post_init__(self):
        els = tuple(sorted({int(e) for e in self.elements}))
        if els and not (0 <= els[0] and els[-1] < (1 << self.n)):
            raise ValueError(f"support elements out of range for n={self.n}")
        object.__setattr__(self, "elements", els)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, alpha):
        return alpha in self._lookup

    @property
    def _lookup(self) -> frozenset:
        cached = self.__dict__.get("_set")
        if cached is None:
            cached = frozenset(self.elements)
            object.__setattr__(self, "_set", cached)
        return cached

    def as_array(self) -> np.ndarray:
        return np.array(self.elements, dtype=np.int64)

    def indicator(self) -> np.ndarray:
        ind = np.zeros(1 << self.n, dtype=bool)
        ind[self.as_array()] = True
        return ind

    def issubset(self, other: "SupportSet") -> bool:
        return self._lookup <= other._lookup

    @classmethod
    def from_indicator(cls, n: int, mask) -> "SupportSet":
        return cls(n, tuple(np.flatnonzero(mask).tolist()))


@dataclass(frozen=True, eq=False)
class FourierSpectrum:
    """Dense Fourier coefficient table with sub-tolerance entries zeroed."""

    n: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=np.float64, copy=True)
        if c.shape != (1 << self.n,):
            raise ValueError(f"spectrum must have length {1 << self.n}")
        c[np.abs(c) < ZERO_TOL] = 0.0
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_dict(cls, n: int, coeffs: dict) -> "FourierSpectrum":
        dense = np.zeros(1 << n)
        for alpha, v in coeffs.items():
            dense[alpha] = v
        return cls(n, dense)

    def __getitem__(self, alpha: int) -> float:
        return float(self.coeffs[alpha])

    def as_dict(self) -> dict:
        nz = np.flatnonzero(self.coeffs)
        return {int(a): float(self.coeffs[a]) for a in nz}

    @property
    def support(self) -> SupportSet:
        return SupportSet.from_indicator(self.n, self.coeffs != 0)

    @property
    def l0(self) -> int:
        return int(np.count_nonzero(self.coeffs))

    @property
    def l1(self) -> float:
        return float(np.abs(self.coeffs).sum())

    @property
    def l2(self) -> float:
        return float(np.sqrt(np.square(self.coeffs).sum()))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("alpha_bits,coefficient\n")
        for a, v in self.as_dict().items():
            buf.write(f"{int_to_bits(a, self.n)},{v!r}\n")
        return buf.getvalue()


def wht(f: BooleanFunction | RealFunction) -> FourierSpectrum:
    return FourierSpectrum(f.n, fwht(f.values) / (1 << f.n))


def inverse_wht(s: FourierSpectrum) -> RealFunction:
    return RealFunction(s.n, fwht(s.coeffs))


def characters_matrix(n: int) -> np.ndarray:
    """``H[alpha, x] = chi_alpha(x)`` as a dense +-1 matrix."""
    idx = np.arange(1 << n)
    return chi(idx[:, None], idx[None, :]).astype(np.float64)


# --- sumsets ----------------------------------------------------------------

def sumset(a: SupportSet, b: SupportSet) -> SupportSet:
    """``{alpha xor beta : alpha in a, beta in b}``."""
    if a.n != b.n:
        raise ValueError("sumset of supports with different n")
    n = a.n
    if not len(a) or not len(b):
        return SupportSet(n, ())
    if len(a) * len(b) <= 4 << n:
        xa, xb = a.as_array(), b.as_array()
        return SupportSet(n, tuple(np.unique(xa[:, None] ^ xb[None, :]).tolist()))
    # XOR-convolution of the two indicators; counts are integers >= 1 on the sumset.
    conv = fwht(fwht(a.indicator()) * fwht(b.indicator())) / (1 << n)
    return SupportSet.from_indicator(n, conv > 0.5)


def iterated_sumset(a: SupportSet, k: int) -> SupportSet:
    """The 2**k-fold sumset, by k doublings ``S <- S + S``."""
    if k < 0:
        raise ValueError("k must be non-negative")
    s = a
    for _ in range(k):
        nxt = sumset(s, s)
        if nxt == s:
            break
        s = nxt
    return s


def ceil_log2_power(size: int, k: int) -> int:
    """``ceil(2**k * log2(size))``, exact for powers of two and small k."""
    if size < 1:
        raise ValueError("size must be at least 1")
    if size & (size - 1) == 0:
        return (size.bit_length() - 1) << k
    if k <= 6:
        return (size ** (1 << k) - 1).bit_length()
    # log2(size) is irrational here, so the product is never an integer
    return math.ceil((1 << k) * math.log2(size))


# --- approximate l1 norm ----------------------------------------------------

class LPError(RuntimeError):
    pass


def approx_l1(f: BooleanFunction, eps: float, max_n: int = 8):
    """Minimum spectral l1 norm over all ``g`` with ``||f - g||_inf <= eps``.

    Solves ``min sum(p + q)`` s.t. ``|H^T (p - q) - f| <= eps``, ``p, q >= 0``
    with :func:`qxor.simplex.solve_lp`. Returns ``(g, value)``.
    """
    if not 0 <= eps < 1:
        raise ValueError("eps must lie in [0, 1)")
    if f.n > max_n:
        raise ValueError(f"approx_l1 supports n <= {max_n}, got {f.n}")
    if eps == 0:
        g = f.as_real()
        return g, wht(g).l1

    n, size = f.n, 1 << f.n
    chars = characters_matrix(n)            # symmetric: chars[a, x] == chars[x, a]
    fv = f.values.astype(np.float64)
    # rows x: sum_a c_a chi_a(x) <= f(x) + eps  and  -sum_a c_a chi_a(x) <= eps - f(x)
    block = np.hstack([chars, -chars])
    a_ub = np.vstack([block, -block])
    b_ub = np.concatenate([fv + eps, eps - fv])
    res = solve_lp(np.ones(2 * size), a_ub, b_ub)
    if res.status != "optimal":
        raise LPError(f"LP for approx_l1 did not converge: {res.status}")
    c = res.x[:size] - res.x[size:]
    g = RealFunction(n, chars.T @ c)
    viol = np.max(np.abs(g.values - fv))
    if viol > eps + 1e-7:
        raise LPError(f"LP solution violates the sup-norm constraint by {viol - eps:.3g}")
    return g, float(res.fun)


def parseval_gap(f: BooleanFunction | RealFunction) -> float:
    """``sum f^(a)**2 - E[f**2]``; zero up to rounding."""
    raw = fwht(f.values) / (1 << f.n)
    return float(np.square(raw).sum() - np.mean(np.square(f.values)))
