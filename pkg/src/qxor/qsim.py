"""Exact state-vector simulation of the two protocol registers.

The state lives on a 1-qubit control register C and an n-qubit register M.
Amplitudes are indexed ``c * 2**n + m``. Every gate used by the protocol has
real matrix entries, so amplitudes are stored as float64; an imaginary part
would indicate a bug.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np

from .boolean_core import BooleanFunction, RealFunction, chi, int_to_bits
from .encoding import EncodingError, SumsetEncoding, encode
from .fourier import FourierSpectrum, fwht

NORM_TOL = 1e-9
SQRT_HALF = math.sqrt(0.5)


class StateError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class QuantumState:
    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.float64)
        if amps.shape != (2 << self.n,):
            raise StateError(f"state needs {2 << self.n} amplitudes, got {amps.shape}")
        if not np.all(np.isfinite(amps)):
            raise StateError("non-finite amplitude")
        norm = float(amps @ amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise StateError(f"state norm {norm!r} is not 1")
        amps = amps.copy()
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def branches(self) -> np.ndarray:
        """Amplitudes reshaped to ``(2, 2**n)``: row c, column m."""
        return self.amplitudes.reshape(2, 1 << self.n)

    @classmethod
    def from_branches(cls, branches: np.ndarray) -> "QuantumState":
        n = int(branches.shape[1]).bit_length() - 1
        return cls(n, np.asarray(branches).reshape(-1))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("c,m_bits,amplitude\n")
        for c in range(2):
            for m, a in enumerate(self.branches[c]):
                buf.write(f"{c},{int_to_bits(m, self.n)},{a!r}\n")
        return buf.getvalue()


@dataclass
class ResourceCounter:
    """Gate and oracle-query tallies for circuit-style preparation."""

    hadamards: int = 0
    hadamard_layers: int = 0
    oracle_calls: int = 0
    per_round: list = field(default_factory=list)


class DerivativeOracle:
    """Phase oracle for ``f^(k) = Delta_{t_1} ... Delta_{t_k} f``.

    ``f^(k)(z)`` is the product of ``f(z xor t_S)`` over all subsets ``S`` of
    the directions, so one application costs ``2**k`` queries to ``f``. Each
    query acts on the whole superposition at once.
    """

    def __init__(self, base: BooleanFunction, ts=(), counter: ResourceCounter | None = None):
        self.base = base
        self.ts = tuple(ts)
        self.counter = counter if counter is not None else ResourceCounter()

    @property
    def k(self) -> int:
        return len(self.ts)

    def shifts(self) -> list[int]:
        out = [0]
        for t in self.ts:
            out += [s ^ t for s in out]
        return out

    def apply_phase(self, vec: np.ndarray) -> np.ndarray:
        z = np.arange(1 << self.base.n)
        out = np.array(vec, dtype=np.float64, copy=True)
        for s in self.shifts():
            out *= self.base.values[z ^ s]      # X-conjugated query of f
            self.counter.oracle_calls += 1
        return out


def prepare_state(gk: FourierSpectrum, e: SumsetEncoding, x: int) -> QuantumState:
    """``(|0>|0> + |1> sum_a g^(a)/||g^||_2 chi_a(x) |E(a)>) / sqrt 2``."""
    norm = gk.l2
    if norm <= 0:
        raise StateError("cannot prepare a state from a zero spectrum")
    alphas = np.flatnonzero(gk.coeffs)
    codes = encode(e, alphas)
    branches = np.zeros((2, 1 << gk.n))
    branches[0, 0] = SQRT_HALF
    branches[1, codes] = SQRT_HALF * gk.coeffs[alphas] * chi(alphas, x) / norm
    return QuantumState.from_branches(branches)


def _hadamard_layer(vec: np.ndarray, counter: ResourceCounter | None, n: int) -> np.ndarray:
    if counter is not None:
        counter.hadamards += n
        counter.hadamard_layers += 1
    return fwht(vec) / math.sqrt(vec.size)


def prepare_state_circuit(oracle: DerivativeOracle, e: SumsetEncoding, x: int) -> QuantumState:
    """Gate-level preparation of the round-k starting state.

    Start from ``|+>_C |0>_M``; on the C=1 branch apply H^n, the phase
    ``f^(k)(z)``, H^n again, the phase ``chi_a(x)``, and finally relabel each
    ``|a>`` as ``|E_k(a)>``.
    """
    counter = oracle.counter
    n = oracle.base.n
    size = 1 << n
    calls_before = counter.oracle_calls
    branch1 = np.zeros(size)
    branch1[0] = SQRT_HALF
    branch1 = _hadamard_layer(branch1, counter, n)
    branch1 = oracle.apply_phase(branch1)
    branch1 = _hadamard_layer(branch1, counter, n)
    alphas = np.arange(size)
    branch1 = branch1 * chi(alphas, x)
    live = np.flatnonzero(np.abs(branch1) > 1e-12)
    codes = encode(e, live)
    encoded = np.zeros(size)
    encoded[codes] = branch1[live]
    branches = np.zeros((2, size))
    branches[0, 0] = SQRT_HALF
    branches[1] = encoded
    counter.per_round.append({
        "k": oracle.k,
        "hadamards": 2 * n,
        "oracle_calls": counter.oracle_calls - calls_before,
    })
    return QuantumState.from_branches(branches)


# --- sub-register plumbing --------------------------------------------------

def sent_block(s: QuantumState, width: int) -> np.ndarray:
    """The C register joined with the low ``width`` qubits of M, shape (2, 2**width).

    The high qubits of M must be |0>, which makes the block a pure state.
    """
    br = s.branches
    w = 1 << width
    if np.any(np.abs(br[:, w:]) > NORM_TOL):
        raise StateError("unsent qubits of M are not in |0>")
    return br[:, :w].copy()


def with_block(s: QuantumState, block: np.ndarray) -> QuantumState:
    br = np.zeros_like(s.branches)
    br[:, :block.shape[1]] = block
    return QuantumState.from_branches(br)


def bob_phase_block(block: np.ndarray, e: SumsetEncoding, y: int) -> np.ndarray:
    """Multiply each ``|1>|E_k(a)>`` amplitude in a (2, W) block by chi_a(y)."""
    block = np.array(block, dtype=np.float64, copy=True)
    slots, alphas = e.slot_alphas()
    if block.shape[1] < slots.size:
        raise EncodingError("block narrower than the codebook")
    idle = np.ones(block.shape[1], dtype=bool)
    idle[slots] = False
    if np.any(np.abs(block[1, idle]) > NORM_TOL):
        raise StateError("amplitude on a non-codeword slot of the |1> branch")
    block[1, slots] *= chi(alphas, y)
    return block


def apply_bob_phase(s: QuantumState, e: SumsetEncoding, y: int) -> QuantumState:
    return with_block(s, bob_phase_block(sent_block(s, e.codeword_width), e, y))


def _decode_permutation(e: SumsetEncoding) -> np.ndarray:
    """Total permutation of M extending codeword -> alpha."""
    size = 1 << e.n
    perm = np.full(size, -1, dtype=np.int64)
    codes, alphas = e.slot_alphas()
    perm[codes] = alphas
    free_src = np.flatnonzero(perm < 0)
    used = np.zeros(size, dtype=bool)
    used[alphas] = True
    perm[free_src] = np.flatnonzero(~used)
    return perm


def apply_alice_decode(s: QuantumState, e: SumsetEncoding) -> QuantumState:
    """Relabel ``|1>|E_k(a)>`` as ``|1>|a>``; the |0> branch is untouched."""
    if e.identity:
        return s
    br = s.branches.copy()
    codes, _ = e.slot_alphas()
    idle = np.ones(1 << s.n, dtype=bool)
    idle[codes] = False
    if np.any(np.abs(br[1, idle]) > NORM_TOL):
        raise StateError("amplitude on a non-codeword slot of the |1> branch")
    perm = _decode_permutation(e)
    out = np.empty_like(br[1])
    out[perm] = br[1]
    br[1] = out
    return QuantumState.from_branches(br)


def apply_qft_m(s: QuantumState) -> QuantumState:
    """H^n on register M in both C branches."""
    return QuantumState.from_branches(fwht(s.branches, axis=1) / math.sqrt(1 << s.n))


# --- measurement ------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class BranchDistribution:
    """Joint law of (t, b); column 0 is b=+1 (outcome |+>), column 1 is b=-1."""

    n: int
    probs: np.ndarray

    def __getitem__(self, key) -> float:
        t, b = key
        return float(self.probs[t, 0 if b == 1 else 1])

    def marginal_t(self) -> np.ndarray:
        return self.probs.sum(axis=1)

    def conditional_b(self) -> np.ndarray:
        """``Pr[b | t]``, rows normalised; zero rows stay zero."""
        m = self.marginal_t()[:, None]
        return np.divide(self.probs, m, out=np.zeros_like(self.probs), where=m > 0)


def branch_distribution(s: QuantumState) -> BranchDistribution:
    br = s.branches
    plus = (br[0] + br[1]) * SQRT_HALF
    minus = (br[0] - br[1]) * SQRT_HALF
    return BranchDistribution(s.n, np.stack([plus * plus, minus * minus], axis=1))


def closed_form_branches(gk: RealFunction, norm: float, x: int, y: int) -> np.ndarray:
    """Post-transform state ``2**(-n/2) sum_t (|0> + a_t |1>)|t> / sqrt 2``.

    ``a_t = g^(k)(x xor y xor t) / ||g^(k)||_2``.
    """
    size = 1 << gk.n
    t = np.arange(size)
    a = gk.values[t ^ (x ^ y)] / norm
    scale = SQRT_HALF / math.sqrt(size)
    return np.stack([np.full(size, scale), scale * a])


def closed_form_distribution(gk: RealFunction, norm: float, z: int) -> np.ndarray:
    """``Pr[(t, b)] = 2**-n ((1 + b a_t) / 2)**2`` as an (N, 2) array."""
    size = 1 << gk.n
    a = gk.values[np.arange(size) ^ z] / norm
    return np.stack([(1 + a) ** 2, (1 - a) ** 2], axis=1) / (4.0 * size)


def measure(s: QuantumState, rng: np.random.Generator) -> tuple[int, int]:
    """Measure M in the computational basis, then C in the {|+>, |->} basis."""
    dist = branch_distribution(s).probs
    flat = dist.reshape(-1)
    cdf = np.cumsum(flat)
    idx = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
    idx = min(idx, flat.size - 1)
    while flat[idx] == 0.0 and idx > 0:     # rounding at the top of the CDF
        idx -= 1
    t, col = divmod(idx, 2)
    return t, 1 if col == 0 else -1

