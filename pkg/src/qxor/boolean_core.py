"""Boolean functions on {0,1}^n, GF(2) degree and the derivative calculus.

Bit strings are stored as plain integers. The canonical index order puts
``z1`` in the most significant bit, so the string ``"100"`` (n=3) is index 4.
Truth tables are numpy arrays of length ``2**n`` in that index order.

The protocol-facing representation is the multiplicative one: a Boolean
function takes values in {+1, -1} and TRUE maps to -1. The 0/1 view exists
for GF(2) algebra only (``b = (1 - v) / 2``).
"""
from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

MAX_ARITY = 24


class FunctionSpecError(ValueError):
    """Raised for malformed function descriptions."""


def bits_to_int(bits: str) -> int:
    """``"z1 z2 ... zn"`` as a bit string, z1 first, to its integer index."""
    bits = bits.strip()
    if not bits or set(bits) - {"0", "1"}:
        raise FunctionSpecError(f"not a bit string: {bits!r}")
    return int(bits, 2)


def int_to_bits(value: int, n: int) -> str:
    return format(value, f"0{n}b") if n else ""


def parse_bitvector(bits: str, n: int) -> int:
    if len(bits.strip()) != n:
        raise FunctionSpecError(f"expected {n} bits, got {bits!r}")
    return bits_to_int(bits)


def popcount(a):
    return np.bitwise_count(np.asarray(a, dtype=np.int64))


def chi(alpha, x):
    """Character ``(-1)**(alpha . x)``, vectorised over numpy arrays."""
    par = popcount(np.bitwise_and(alpha, x)) & 1
    return (1 - 2 * par).astype(np.int8) if np.ndim(par) else int(1 - 2 * par)


def _check_arity(n: int) -> None:
    if not 0 <= n <= MAX_ARITY:
        raise FunctionSpecError(f"arity must be in [0, {MAX_ARITY}], got {n}")


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class RealFunction:
    """A real-valued function on {0,1}^n given by its full value table."""

    n: int
    values: np.ndarray

    def __post_init__(self):
        _check_arity(self.n)
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.shape != (1 << self.n,):
            raise FunctionSpecError(
                f"value table must have length {1 << self.n}, got {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise FunctionSpecError("real function values must be finite")
        object.__setattr__(self, "values", _frozen(vals))

    def __call__(self, z: int) -> float:
        return float(self.values[z])

    def __eq__(self, other):
        return (type(other) is type(self) and other.n == self.n
                and np.array_equal(other.values, self.values))

    def __hash__(self):
        return hash((self.n, self.values.tobytes()))

    def __mul__(self, c: float) -> "RealFunction":
        return RealFunction(self.n, self.values * float(c))

    __rmul__ = __mul__

    def key(self) -> bytes:
        return self.values.tobytes()


@dataclass(frozen=True, eq=False)
class BooleanFunction:
    """A total function {0,1}^n -> {+1, -1}."""

    n: int
    values: np.ndarray

    def __post_init__(self):
        _check_arity(self.n)
        vals = np.asarray(self.values)
        if vals.shape != (1 << self.n,):
            raise FunctionSpecError(
                f"truth table must have length {1 << self.n}, got {vals.shape}")
        if not np.all((vals == 1) | (vals == -1)):
            raise FunctionSpecError("Boolean function values must be +1 or -1")
        object.__setattr__(self, "values", _frozen(vals.astype(np.int8)))

    @classmethod
    def from_zero_one(cls, n: int, bits) -> "BooleanFunction":
        bits = np.asarray(bits, dtype=np.int8)
        if not np.all((bits == 0) | (bits == 1)):
            raise FunctionSpecError("0/1 table must contain only 0 and 1")
        return cls(n, 1 - 2 * bits)

    @property
    def zero_one_view(self) -> np.ndarray:
        return ((1 - self.values) // 2).astype(np.uint8)

    def __call__(self, z: int) -> int:
        return int(self.values[z])

    def __eq__(self, other):
        return (type(other) is type(self) and other.n == self.n
                and np.array_equal(other.values, self.values))

    def __hash__(self):
        return hash((self.n, self.values.tobytes()))

    def is_constant(self) -> bool:
        return bool(np.all(self.values == self.values[0]))

    def as_real(self) -> RealFunction:
        return RealFunction(self.n, self.values.astype(np.float64))

    def key(self) -> bytes:
        return self.values.tobytes()


def mobius(table: np.ndarray) -> np.ndarray:
    """GF(2) Moebius transform along the last axis (an involution).

    Maps a 0/1 truth table to its algebraic normal form coefficients, where
    coefficient ``S`` belongs to the monomial over the set bits of ``S``.
    """
    a = np.array(table, dtype=np.uint8, copy=True)
    size = a.shape[-1]
    lead = a.shape[:-1]
    h = 1
    while h < size:
        a = a.reshape(*lead, -1, 2, h)
        a[..., 1, :] ^= a[..., 0, :]
        h *= 2
    return a.reshape(*lead, size)


def anf(f: BooleanFunction) -> np.ndarray:
    return mobius(f.zero_one_view)


def gf2_degree(f: BooleanFunction) -> int:
    coeffs = anf(f)
    nz = np.flatnonzero(coeffs)
    if nz.size == 0:
        return 0
    return int(popcount(nz).max())


def _shift_index(n: int, t: int) -> np.ndarray:
    return np.arange(1 << n, dtype=np.int64) ^ t


def shift(f, t: int):
    """``x -> f(x xor t)``."""
    return type(f)(f.n, f.values[_shift_index(f.n, t)])


def derivative(f, t: int):
    """Multiplicative derivative ``x -> f(x) f(x xor t)``.

    Works for both :class:`BooleanFunction` and :class:`RealFunction` and
    returns the same kind.
    """
    if not 0 <= t < (1 << f.n):
        raise FunctionSpecError(f"direction {t} out of range for n={f.n}")
    out = type(f)(f.n, f.values * f.values[_shift_index(f.n, t)])
    if isinstance(f, BooleanFunction) and t and not f.is_constant():
        assert gf2_degree(out) < gf2_degree(f), "derivative did not lower degree"
    return out


def iterated_derivative(f, ts):
    for t in ts:
        f = derivative(f, t)
    return f


def evaluate_xor(f: BooleanFunction, x: int, y: int) -> int:
    return f(x ^ y)


# --- construction -----------------------------------------------------------

def constant(n: int, value: int = 1) -> BooleanFunction:
    return BooleanFunction(n, np.full(1 << n, value, dtype=np.int8))


def from_table(n: int, values) -> BooleanFunction:
    return BooleanFunction(n, np.asarray(values))


def character(n: int, alpha: int) -> BooleanFunction:
    return BooleanFunction(n, chi(alpha, np.arange(1 << n)))


def _subset_mask(n: int, indices) -> int:
    mask = 0
    for i in indices:
        if not 1 <= i <= n:
            raise FunctionSpecError(f"variable index z{i} out of range for n={n}")
        mask |= 1 << (n - i)
    return mask


def from_anf(n: int, expr: str) -> BooleanFunction:
    """Parse a GF(2) polynomial like ``"z1*z3 + z2 + 1"`` (0/1 view)."""
    _check_arity(n)
    z = np.arange(1 << n, dtype=np.int64)
    table = np.zeros(1 << n, dtype=np.uint8)
    expr = expr.strip()
    if not expr:
        raise FunctionSpecError("empty ANF expression")
    for term in expr.split("+"):
        term = term.strip()
        if term == "0":
            continue
        if term == "1":
            table ^= 1
            continue
        factors = [p.strip() for p in term.split("*")]
        idx = []
        for p in factors:
            m = re.fullmatch(r"z(\d+)", p)
            if not m:
                raise FunctionSpecError(f"bad ANF factor {p!r} in term {term!r}")
            idx.append(int(m.group(1)))
        mask = _subset_mask(n, idx)
        table ^= ((z & mask) == mask).astype(np.uint8)
    return BooleanFunction.from_zero_one(n, table)


def parity(n: int, subset) -> BooleanFunction:
    return character(n, _subset_mask(n, subset))


def and_n(n: int) -> BooleanFunction:
    full = (1 << n) - 1
    z = np.arange(1 << n)
    return BooleanFunction.from_zero_one(n, (z == full).astype(np.int8))


def equality_n(n: int) -> BooleanFunction:
    z = np.arange(1 << n)
    return BooleanFunction.from_zero_one(n, (z == 0).astype(np.int8))


def hamming_le(n: int, d: int) -> BooleanFunction:
    w = popcount(np.arange(1 << n))
    return BooleanFunction.from_zero_one(n, (w <= d).astype(np.int8))


_FAMILY_RE = re.compile(r"^\s*([a-z_]+?)(?:_(\d+))?\s*(?:\((.*)\))?\s*$")


def named_function(expr: str, n: int | None = None) -> BooleanFunction:
    """Build a member of the named-family catalog.

    Accepted forms: ``parity({1,2,3})``, ``and_n`` / ``and(n)``,
    ``equality_n`` / ``equality(n)``, ``hamming_le(n,d)``, ``const(+1)``.
    ``n`` is required when the expression does not fix the arity.
    """
    m = _FAMILY_RE.match(expr)
    if not m:
        raise FunctionSpecError(f"bad family expression {expr!r}")
    name, suffix, args = m.group(1), m.group(2), m.group(3)
    args = (args or "").strip()

    def arity(default=None):
        k = int(suffix) if suffix is not None else default
        if k is None:
            k = n
        if k is None:
            raise FunctionSpecError(f"arity not given for {expr!r}")
        if n is not None and k != n:
            raise FunctionSpecError(f"arity mismatch: {expr!r} vs n={n}")
        return k

    if name == "parity":
        subset = [int(s) for s in re.findall(r"\d+", args)]
        if n is None:
            raise FunctionSpecError("parity needs an explicit n")
        return parity(n, subset)
    if name == "and":
        return and_n(arity(int(args) if args else None))
    if name == "equality":
        return equality_n(arity(int(args) if args else None))
    if name == "hamming_le":
        parts = [int(s) for s in re.findall(r"\d+", args)]
        if len(parts) == 1 and n is not None:
            parts = [n] + parts
        if len(parts) != 2:
            raise FunctionSpecError("hamming_le takes (n, d), or (d) when n is known")
        return hamming_le(arity(parts[0]), parts[1])
    if name in ("const", "constant"):
        value = int(args) if args else 1
        if n is None:
            raise FunctionSpecError("constant needs an explicit n")
        return constant(n, value)
    raise FunctionSpecError(f"unknown family {name!r}")


def parse_function(text: str) -> BooleanFunction:
    """Parse the text function-description format.

    Line 1 is ``n=<int>``, line 2 ``kind=table|anf|family``. Then either
    2**n lines ``<bitstring> <+1|-1>``, an ANF expression, or
    ``family=<name> params=<...>``. Blank lines and ``#`` comments are ignored.
    """
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if len(lines) < 2:
        raise FunctionSpecError("function description needs n= and kind= lines")
    m = re.fullmatch(r"n\s*=\s*(\d+)", lines[0])
    if not m:
        raise FunctionSpecError(f"first line must be n=<int>, got {lines[0]!r}")
    n = int(m.group(1))
    _check_arity(n)
    m = re.fullmatch(r"kind\s*=\s*(table|anf|family)", lines[1])
    if not m:
        raise FunctionSpecError(f"second line must be kind=table|anf|family, got {lines[1]!r}")
    kind, body = m.group(1), lines[2:]

    if kind == "table":
        if len(body) != 1 << n:
            raise FunctionSpecError(
                f"truth table needs {1 << n} rows, got {len(body)}")
        values = np.zeros(1 << n, dtype=np.int8)
        seen = set()
        for row in body:
            parts = row.split()
            if len(parts) != 2:
                raise FunctionSpecError(f"bad table row {row!r}")
            z = parse_bitvector(parts[0], n)
            if z in seen:
                raise FunctionSpecError(f"duplicate table row for {parts[0]}")
            seen.add(z)
            try:
                v = int(parts[1])
            except ValueError:
                raise FunctionSpecError(f"bad value in row {row!r}") from None
            if v not in (1, -1):
                raise FunctionSpecError(f"table values must be +1/-1, got {v}")
            values[z] = v
        return BooleanFunction(n, values)

    if kind == "anf":
        if not body:
            raise FunctionSpecError("missing ANF expression")
        return from_anf(n, " + ".join(body))

    m = re.fullmatch(r"family\s*=\s*([a-z_0-9]+)(?:\s+params\s*=\s*(.*))?", " ".join(body))
    if not m:
        raise FunctionSpecError("family body must be family=<name> params=<...>")
    name, params = m.group(1), (m.group(2) or "").strip()
    expr = f"{name}({params})" if params else name
    return named_function(expr, n)


def format_function(f: BooleanFunction) -> str:
    """Serialize ``f`` as a ``kind=table`` description."""
    rows = [f"n={f.n}", "kind=table"]
    rows += [f"{int_to_bits(z, f.n)} {int(v):+d}" for z, v in enumerate(f.values)]
    return "\n".join(rows) + "\n"
