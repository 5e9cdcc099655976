"""The two-party XOR-function protocol, round by round.

Alice holds ``x``, Bob holds ``y``; both know the public support ``A`` of
the approximator ``g``. Each round Alice prepares a Fourier state of the
current derivative ``g^(k)``, Bob stamps the phase ``chi_a(y)``, Alice
decodes, applies H^n and measures a direction ``t`` and a sign ``b``. The
sign multiplies into the answer; ``t = 0`` ends the run, any other ``t``
replaces the function by its derivative along ``t``, lowering its degree.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from .boolean_core import BooleanFunction, RealFunction, derivative, gf2_degree, int_to_bits
from .encoding import build_encoding, codeword_width
from .fourier import SupportSet, approx_l1, ceil_log2_power, wht
from .l1_sampler import SparsifierParams, hoeffding_tail, sparsify, sup_distance
from .qsim import (
    DerivativeOracle,
    ResourceCounter,
    apply_alice_decode,
    apply_qft_m,
    bob_phase_block,
    measure,
    prepare_state,
    prepare_state_circuit,
    sent_block,
    with_block,
)
from .wire import MessageType, WireMessage

SUP_TOL = 1e-12


class ProtocolError(RuntimeError):
    pass


@dataclass(frozen=True)
class ProtocolConfig:
    mode: str = "exact"               # "exact" | "approximate"
    eps: float = 0.0
    seed: int = 0
    max_rounds: int | None = None     # defaults to n
    preparation: str = "direct"       # "direct" | "circuit"

    def __post_init__(self):
        if self.mode not in ("exact", "approximate"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.preparation not in ("direct", "circuit"):
            raise ValueError(f"unknown preparation {self.preparation!r}")
        if self.eps < 0:
            raise ValueError("eps must be non-negative")
        if self.mode == "exact" and self.eps != 0:
            raise ValueError("exact mode runs with eps = 0")


@dataclass(frozen=True)
class RoundRecord:
    k: int
    m_k: int
    t: int
    b: int
    deg_announced: int | None
    qubits_alice_to_bob: int
    qubits_bob_to_alice: int
    support_size: int                 # ||g^(k)^||_0, to expose unused codewords
    domain_size: int                  # |2^k A|


@dataclass
class Transcript:
    n: int
    rounds: list = field(default_factory=list)
    terminated_by: str = "degree_zero"
    answer: int = 1
    classical_bits: int = 0

    @property
    def total_qubits(self) -> int:
        return sum(r.qubits_alice_to_bob + r.qubits_bob_to_alice for r in self.rounds)

    def to_dict(self) -> dict:
        rounds = []
        for r in self.rounds:
            d = asdict(r)
            d["t"] = int_to_bits(r.t, self.n)
            rounds.append(d)
        return {
            "rounds": rounds,
            "terminated_by": self.terminated_by,
            "answer": self.answer,
            "total_qubits": self.total_qubits,
            "classical_bits": self.classical_bits,
        }


def degree_bits(n: int) -> int:
    return math.ceil(math.log2(n + 1))


# --- parties ----------------------------------------------------------------

class Bob:
    """Bob's side: knows only ``A``, ``n`` and his input ``y``."""

    def __init__(self, support: SupportSet, y: int, n: int | None = None):
        self.support = support
        self.n = support.n if n is None else n
        self.y = y
        self.announced: list[int] = []
        self.finished = False

    def handle(self, msg: WireMessage) -> WireMessage | None:
        if msg.type == MessageType.REGISTER_STATE:
            self.finished = False
            e = build_encoding(self.support, msg.round, self.n)
            if msg.qubit_count != 1 + e.codeword_width:
                raise ProtocolError(
                    f"round {msg.round}: got {msg.qubit_count} qubits, expected {1 + e.codeword_width}")
            block = bob_phase_block(msg.amplitudes(), e, self.y)
            return WireMessage.register_state(msg.round, block)
        if msg.type == MessageType.DEGREE_ANNOUNCE:
            deg = msg.degree_value()
            self.announced.append(deg)
            self.finished = deg == 0
            return None
        if msg.type == MessageType.TERMINATE:
            self.finished = True
            return None
        raise ProtocolError(f"Bob cannot handle {msg.type.name}")


class InProcessLink:
    """Direct calls into a local :class:`Bob`, with a qubit ledger."""

    def __init__(self, bob: Bob):
        self.bob = bob
        self.qubits_sent = 0
        self.qubits_received = 0
        self.messages: list[tuple[str, WireMessage]] = []

    def request(self, msg: WireMessage) -> WireMessage:
        self._log("A->B", msg)
        reply = self.bob.handle(msg)
        if reply is None:
            raise ProtocolError(f"no reply to {msg.type.name}")
        self._log("B->A", reply)
        return reply

    def send(self, msg: WireMessage) -> None:
        self._log("A->B", msg)
        self.bob.handle(msg)

    def _log(self, direction: str, msg: WireMessage) -> None:
        self.messages.append((direction, msg))
        if msg.type == MessageType.REGISTER_STATE:
            if direction == "A->B":
                self.qubits_sent += msg.qubit_count
            else:
                self.qubits_received += msg.qubit_count

    @property
    def ledger_qubits(self) -> int:
        return self.qubits_sent + self.qubits_received


class Alice:
    """Alice's side: holds ``f``, ``g``, ``x`` and the measurement generator."""

    def __init__(self, f: BooleanFunction, g: RealFunction, x: int, cfg: ProtocolConfig,
                 rng: np.random.Generator, support: SupportSet | None = None,
                 counter: ResourceCounter | None = None):
        self.f, self.g, self.x, self.cfg, self.rng = f, g, x, cfg, rng
        self.support = wht(g).support if support is None else support
        self.counter = counter if counter is not None else ResourceCounter()
        if cfg.preparation == "circuit" and not np.array_equal(f.values, g.values):
            raise ProtocolError("circuit preparation needs g = f (exact mode)")

    def run(self, link) -> tuple[int, Transcript]:
        f, n = self.f, self.f.n
        tr = Transcript(n)
        max_rounds = self.cfg.max_rounds if self.cfg.max_rounds is not None else n
        fk, gk, ts = f, self.g, []
        ans = 1
        deg = gf2_degree(fk)
        k = 0
        while deg >= 1:
            if k >= max_rounds:
                raise ProtocolError(f"degree still {deg} after {k} rounds; derivative bug?")
            e = build_encoding(self.support, k, n)
            spectrum = wht(gk)
            if self.cfg.preparation == "circuit":
                oracle = DerivativeOracle(f, ts, self.counter)
                state = prepare_state_circuit(oracle, e, self.x)
            else:
                state = prepare_state(spectrum, e, self.x)
            sent = WireMessage.register_state(k, sent_block(state, e.codeword_width))
            reply = link.request(sent)
            if reply.type != MessageType.REGISTER_STATE or reply.round != k:
                raise ProtocolError(f"unexpected reply {reply.type.name} in round {k}")
            state = with_block(state, reply.amplitudes())
            state = apply_qft_m(apply_alice_decode(state, e))
            t, b = measure(state, self.rng)
            ans *= b
            if t == 0:
                link.send(WireMessage.terminate(k))
                announced = None
            else:
                fk, gk = derivative(fk, t), derivative(gk, t)
                ts.append(t)
                deg = gf2_degree(fk)
                link.send(WireMessage.degree(k, deg))
                tr.classical_bits += degree_bits(n)
                announced = deg
            tr.rounds.append(RoundRecord(
                k=k, m_k=e.codeword_width, t=t, b=b, deg_announced=announced,
                qubits_alice_to_bob=sent.qubit_count, qubits_bob_to_alice=reply.qubit_count,
                support_size=spectrum.l0, domain_size=len(e.domain)))
            if t == 0:
                tr.terminated_by = "t_zero"
                tr.answer = ans
                return ans, tr
            k += 1
        if not tr.rounds:
            link.send(WireMessage.terminate(0))
        tr.terminated_by = "degree_zero"
        tr.answer = ans * fk(0)
        return tr.answer, tr


# --- entry points -----------------------------------------------------------

def check_inputs(f: BooleanFunction, g: RealFunction, cfg: ProtocolConfig) -> SupportSet:
    if f.n != g.n:
        raise ProtocolError("f and g have different arity")
    dist = sup_distance(f, g)
    if dist > cfg.eps + SUP_TOL:
        raise ProtocolError(f"||f - g||_inf = {dist:.3g} exceeds eps = {cfg.eps:.3g}")
    support = wht(g).support
    if not len(support):
        raise ProtocolError("g has an empty spectrum")
    d = gf2_degree(f)
    if cfg.mode == "approximate" and cfg.eps >= 2.0 ** (-d - 1):
        warnings.warn(f"eps = {cfg.eps:.3g} >= 2^-(d+1) = {2.0 ** (-d - 1):.3g}; "
                      "the error bound no longer applies", stacklevel=3)
    return support


def run_protocol(f: BooleanFunction, g: RealFunction, x: int, y: int, cfg: ProtocolConfig,
                 rng: np.random.Generator, counter: ResourceCounter | None = None,
                 ) -> tuple[int, Transcript]:
    support = check_inputs(f, g, cfg)
    link = InProcessLink(Bob(support, y, f.n))
    answer, tr = Alice(f, g, x, cfg, rng, support, counter).run(link)
    assert link.ledger_qubits == tr.total_qubits
    return answer, tr


def run_exact(f: BooleanFunction, x: int, y: int, cfg: ProtocolConfig | None = None,
              rng: np.random.Generator | None = None, counter: ResourceCounter | None = None,
              ) -> tuple[int, Transcript]:
    cfg = cfg or ProtocolConfig()
    if cfg.mode != "exact":
        cfg = ProtocolConfig("exact", 0.0, cfg.seed, cfg.max_rounds, cfg.preparation)
    rng = rng if rng is not None else np.random.default_rng(cfg.seed)
    return run_protocol(f, f.as_real(), x, y, cfg, rng, counter)


def run_repeated(f: BooleanFunction, g: RealFunction, x: int, y: int, reps: int,
                 cfg: ProtocolConfig, rng: np.random.Generator,
                 transcripts: list | None = None) -> int:
    """Majority vote over ``reps`` independent runs."""
    if reps < 1 or reps % 2 == 0:
        raise ValueError("reps must be a positive odd integer")
    total = 0
    for _ in range(reps):
        answer, tr = run_protocol(f, g, x, y, cfg, rng)
        total += answer
        if transcripts is not None:
            transcripts.append(tr)
    return 1 if total > 0 else -1


@dataclass(frozen=True)
class CostBound:
    exact: int          # sum_k 2 (1 + ceil(2^k log2 |A|))
    loose: float        # 2^(d+2) log2 |A|

    def __int__(self):
        return self.exact


def cost_bound(d: int, sparsity: int) -> CostBound:
    if d < 0 or sparsity < 1:
        raise ValueError("need d >= 0 and sparsity >= 1")
    exact = sum(2 * (1 + ceil_log2_power(sparsity, k)) for k in range(d))
    return CostBound(exact, 2.0 ** (d + 2) * math.log2(sparsity))


def width_schedule(sparsity: int, d: int, n: int) -> list[int]:
    """The register widths ``m_k`` actually sent in rounds ``0 .. d-1``."""
    return [codeword_width(sparsity, k, n) for k in range(d)]


def reps_for_error(per_run_error: float, target: float) -> int:
    """Smallest odd ``r`` whose majority vote fails with probability <= ``target``.

    A run's mistake indicator maps to ``Y = 2W - 1`` in [-1, 1]; the majority
    is wrong only if ``sum Y`` exceeds its mean by ``(1 - 2p) r``, which the
    [-1, 1] tail bound controls.
    """
    if not 0 <= per_run_error < 0.5:
        raise ValueError("per-run error must lie in [0, 1/2)")
    if target <= 0:
        raise ValueError("target error must be positive")
    if per_run_error == 0:
        return 1
    gap = 1.0 - 2.0 * per_run_error
    r = 1
    while hoeffding_tail(r, gap * r) > target:
        r += 2
    return r


@dataclass
class BoundedErrorInstance:
    """A ready-to-run bounded-error protocol for one function."""

    f: BooleanFunction
    eps: float
    degree: int
    g: RealFunction
    l1: float
    params: SparsifierParams | None
    h: RealFunction
    h_sparsity: int
    dist_g_h: float
    dist_f_h: float
    per_run_bound: float
    reps: int
    attempts: int

    @property
    def support(self) -> SupportSet:
        return wht(self.h).support

    def config(self, seed: int = 0) -> ProtocolConfig:
        if self.eps == 0:
            return ProtocolConfig("exact", 0.0, seed)
        return ProtocolConfig("approximate", self.dist_f_h, seed)

    def run(self, x: int, y: int, rng: np.random.Generator, seed: int = 0,
            transcripts: list | None = None) -> int:
        return run_repeated(self.f, self.h, x, y, self.reps, self.config(seed), rng, transcripts)

    def bound_qubits(self) -> int:
        return cost_bound(self.degree, self.h_sparsity).exact

    def report(self) -> dict:
        return {
            "eps": self.eps,
            "degree": self.degree,
            "l1_approx": self.l1,
            "samples_M": None if self.params is None else self.params.sample_count,
            "lambda": None if self.params is None else self.params.lam,
            "h_sparsity": self.h_sparsity,
            "sup_g_h": self.dist_g_h,
            "sup_f_h": self.dist_f_h,
            "per_run_error_bound": self.per_run_bound,
            "reps": self.reps,
            "sparsify_attempts": self.attempts,
        }


def pipeline_bounded_error(f: BooleanFunction, eps: float, rng: np.random.Generator,
                           lam: float = 0.9, max_attempts: int = 20) -> BoundedErrorInstance:
    """LP approximator, l1-sparsification, then enough repetitions for error ``eps``.

    Requires ``0 <= eps < 2**-(d+4)``; ``eps = 0`` gives the exact protocol.
    """
    d = gf2_degree(f)
    if eps == 0:
        g = f.as_real()
        s = wht(g)
        return BoundedErrorInstance(f, 0.0, d, g, s.l1, None, g, s.l0, 0.0, 0.0, 0.0, 1, 0)
    if not 0 < eps < 2.0 ** (-d - 4):
        raise ValueError(f"eps must lie in (0, 2^-(d+4)) = (0, {2.0 ** (-d - 4):.3g})")
    g, l1 = approx_l1(f, eps)
    params = SparsifierParams.for_norm(l1, f.n, eps, lam)
    for attempt in range(1, max_attempts + 1):
        h = sparsify(g, params, rng)
        dist_gh = sup_distance(g, h)
        if dist_gh <= eps:
            break
    else:
        raise ProtocolError(f"sparsifier missed delta = {eps} in {max_attempts} attempts")
    dist_fh = sup_distance(f, h)
    per_run = 2.0 ** d * dist_fh
    reps = reps_for_error(per_run, eps)
    return BoundedErrorInstance(f, eps, d, g, l1, params, h, wht(h).l0, dist_gh, dist_fh,
                                per_run, reps, attempt)
