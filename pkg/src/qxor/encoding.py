"""Round-k codebooks shared by both parties ahead of time.

Round ``k`` only ever needs to address characters in the ``2**k``-fold
sumset of the base support ``A``. Both parties enumerate that sumset in
increasing order and number it from 0, so they agree on the codebook without
talking. Codewords live in the low ``m_k`` bits of the n-qubit register;
the high bits stay |0>.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .fourier import SupportSet, ceil_log2_power, iterated_sumset


class EncodingError(ValueError):
    pass


def codeword_width(support_size: int, k: int, n: int) -> int:
    """``min(n, ceil(2**k log2 |A|))``."""
    if support_size == 1:
        return 0
    if k >= n.bit_length() + 1:
        return n
    return min(n, ceil_log2_power(support_size, k))


@dataclass(frozen=True, eq=False)
class SumsetEncoding:
    k: int
    n: int
    domain: SupportSet
    codeword_width: int
    alpha_of: np.ndarray

    @property
    def identity(self) -> bool:
        return self.codeword_width == self.n

    @property
    def size(self) -> int:
        """Number of register slots the codewords range over."""
        return 1 << self.codeword_width

    @property
    def index_of(self) -> dict:
        return {int(a): i for i, a in enumerate(self.alpha_of)}

    def slot_alphas(self) -> tuple[np.ndarray, np.ndarray]:
        """``(codewords, alphas)`` for every slot that may carry amplitude."""
        if self.identity:
            slots = np.arange(self.size)
            return slots, slots
        return np.arange(self.alpha_of.size), self.alpha_of


def build_encoding(a: SupportSet, k: int, n: int | None = None) -> SumsetEncoding:
    n = a.n if n is None else n
    if not len(a):
        raise EncodingError("cannot encode an empty support")
    if k < 0:
        raise EncodingError("round index must be non-negative")
    return _build(a, k, n)


@lru_cache(maxsize=256)
def _build(a: SupportSet, k: int, n: int) -> SumsetEncoding:
    domain = iterated_sumset(a, k)
    width = codeword_width(len(a), k, n)
    if len(domain) > 1 << width:
        raise EncodingError(f"|2^k A| = {len(domain)} does not fit {width} qubits")
    alpha_of = domain.as_array()
    alpha_of.setflags(write=False)
    return SumsetEncoding(k, n, domain, width, alpha_of)


def encode(e: SumsetEncoding, alpha) -> int | np.ndarray:
    """Codeword of ``alpha``; scalar or array input."""
    arr = np.asarray(alpha, dtype=np.int64)
    idx = np.searchsorted(e.alpha_of, arr)
    ok = (idx < e.alpha_of.size) & (e.alpha_of[np.minimum(idx, e.alpha_of.size - 1)] == arr)
    if not np.all(ok):
        bad = arr[~ok] if arr.ndim else arr
        raise EncodingError(f"character(s) {np.atleast_1d(bad)[:4].tolist()} outside 2^{e.k}A")
    out = arr if e.identity else idx
    return int(out) if out.ndim == 0 else out


def decode(e: SumsetEncoding, codeword) -> int | np.ndarray:
    arr = np.asarray(codeword, dtype=np.int64)
    limit = e.size if e.identity else e.alpha_of.size
    if np.any((arr < 0) | (arr >= limit)):
        raise EncodingError(f"codeword out of range [0, {limit})")
    out = arr if e.identity else e.alpha_of[arr]
    return int(out) if out.ndim == 0 else out
