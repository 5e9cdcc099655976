"""Ground truth for the protocol: exact error by branch enumeration.

The run's answer is the product of the measured signs and, unless it stopped
on ``t = 0``, the final constant. It is correct iff an even number of signs
were wrong, which gives the recursion

    P(node) = sum_t sum_b Pr[t, b] * (P(child) if b right else 1 - P(child))

with ``P = 1`` at degree-zero nodes and ``t = 0`` ending the run. The branch
law is the closed form ``Pr[t, b] = 2**-n ((1 + b a_t) / 2)**2`` with
``a_t = g^(k)(z xor t) / ||g^(k)||_2``; nodes are memoised on the truth
tables of ``(f^(k), g^(k))``.

:func:`monte_carlo_error` is independent of that closed form: it samples the
measurement law of the simulated state vectors from :mod:`qxor.qsim`.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np

from .boolean_core import BooleanFunction, RealFunction, int_to_bits, iterated_derivative, mobius, popcount
from .encoding import build_encoding, codeword_width
from .fourier import wht
from .l1_sampler import sup_distance
from .qsim import apply_alice_decode, apply_bob_phase, apply_qft_m, branch_distribution, prepare_state

MAX_EXACT_N = 6
MAX_NODES = 200_000


class OracleLimitError(RuntimeError):
    pass


def _degrees(values: np.ndarray) -> np.ndarray:
    """GF(2) degree of each +-1 truth table along the last axis."""
    coeffs = mobius(((1 - values) // 2).astype(np.uint8))
    weights = popcount(np.arange(values.shape[-1]))
    return np.where(coeffs != 0, weights, 0).max(axis=-1)


def _key(k: int, fv: np.ndarray, gv: np.ndarray) -> tuple:
    # rounding merges derivative products that differ only in multiplication order
    return k, fv.tobytes(), np.round(gv, 12).tobytes()


@dataclass
class _Node:
    k: int
    f: np.ndarray
    g: np.ndarray
    degree: int
    norm: float
    children: np.ndarray | None = None     # node id per t; -1 for t = 0 and degree-0 leaves


class BranchTree:
    """Memoised derivative tree for one ``(f, g)`` pair, shared across inputs z."""

    def __init__(self, f: BooleanFunction, g: RealFunction):
        if f.n != g.n:
            raise ValueError("f and g have different arity")
        self.n = f.n
        self.size = 1 << f.n
        self.eps = sup_distance(f, g)
        self.sparsity = wht(g).l0
        self.nodes: list[_Node] = []
        self._ids: dict = {}
        fv = f.values.astype(np.int8)
        self.root = self._intern(0, fv, g.values.astype(np.float64), int(_degrees(fv)))
        self._p: dict = {}
        self.min_round_margin = math.inf
        self.round_checks = 0

    def _intern(self, k: int, fv: np.ndarray, gv: np.ndarray, degree: int) -> int:
        key = _key(k, fv, gv)
        nid = self._ids.get(key)
        if nid is None:
            if len(self.nodes) >= MAX_NODES:
                raise OracleLimitError(f"branch tree exceeds {MAX_NODES} nodes")
            norm = math.sqrt(float(np.mean(gv * gv)))
            nid = len(self.nodes)
            self.nodes.append(_Node(k, fv, gv, degree, norm))
            self._ids[key] = nid
        return nid

    def children(self, nid: int) -> np.ndarray:
        node = self.nodes[nid]
        if node.children is None:
            idx = np.arange(self.size)
            shifted = idx[:, None] ^ idx[None, :]           # row t: x -> x xor t
            fk = node.f[None, :] * node.f[shifted]
            gk = node.g[None, :] * node.g[shifted]
            degs = _degrees(fk)
            ch = np.full(self.size, -1, dtype=np.int64)
            for t in np.flatnonzero(degs):
                ch[t] = self._intern(node.k + 1, fk[t], gk[t], int(degs[t]))
            node.children = ch
        return node.children

    def branch_law(self, nid: int, z: int) -> np.ndarray:
        node = self.nodes[nid]
        if node.norm <= 0:
            raise ValueError("g^(k) vanishes identically")
        a = node.g[np.arange(self.size) ^ z] / node.norm
        return np.stack([(1 + a) ** 2, (1 - a) ** 2], axis=1) / (4.0 * self.size)

    def p_correct(self, nid: int, z: int) -> float:
        key = (nid, z)
        hit = self._p.get(key)
        if hit is not None:
            return hit
        node = self.nodes[nid]
        if node.degree == 0:
            self._p[key] = 1.0
            return 1.0
        law = self.branch_law(nid, z)
        right_b = node.f[np.arange(self.size) ^ z]           # b that equals f^(k)(z xor t)
        p_right = np.where(right_b == 1, law[:, 0], law[:, 1])
        p_wrong = np.where(right_b == 1, law[:, 1], law[:, 0])

        # per-round bound: Pr[b right | t] >= (1 + eps)^(-2^k)
        cond = p_right / (p_right + p_wrong)
        margin = float(cond.min() - (1.0 + self.eps) ** (-(2 ** node.k)))
        self.min_round_margin = min(self.min_round_margin, margin)
        self.round_checks += 1

        ch = self.children(nid)
        pcs = np.ones(self.size)
        for t in np.flatnonzero(ch >= 0):
            pcs[t] = self.p_correct(int(ch[t]), z)
        terms = np.concatenate([p_right[:1], p_right[1:] * pcs[1:], p_wrong[1:] * (1.0 - pcs[1:])])
        val = math.fsum(terms.tolist())
        self._p[key] = val
        return val

    def max_rounds(self, nid: int | None = None) -> int:
        nid = self.root if nid is None else nid
        node = self.nodes[nid]
        if node.degree == 0:
            return 0
        cache = self.__dict__.setdefault("_depth", {})
        if nid not in cache:
            ch = self.children(nid)
            cache[nid] = 1 + max((self.max_rounds(int(c)) for c in ch if c >= 0), default=0)
        return cache[nid]

    def comm_max(self) -> int:
        return sum(2 * (1 + codeword_width(self.sparsity, k, self.n))
                   for k in range(self.max_rounds()))


@dataclass
class ErrorReport:
    z: int
    exact_error: float
    bound: float
    comm_max: int
    slack: float = field(init=False)

    def __post_init__(self):
        self.slack = self.bound - self.exact_error


def _check_size(n: int) -> None:
    if n > MAX_EXACT_N:
        raise OracleLimitError(
            f"exact enumeration is limited to n <= {MAX_EXACT_N}; use monte_carlo_error")


def exact_error(f: BooleanFunction, g: RealFunction, z: int, tree: BranchTree | None = None) -> float:
    _check_size(f.n)
    tree = tree if tree is not None else BranchTree(f, g)
    return min(1.0, max(0.0, 1.0 - tree.p_correct(tree.root, z)))


def error_report(f: BooleanFunction, g: RealFunction, z: int, tree: BranchTree | None = None) -> ErrorReport:
    tree = tree if tree is not None else BranchTree(f, g)
    d = tree.nodes[tree.root].degree
    err = exact_error(f, g, z, tree)
    return ErrorReport(z, err, 2.0 ** d * tree.eps, tree.comm_max())


def worst_case_error(f: BooleanFunction, g: RealFunction, tree: BranchTree | None = None) -> tuple[int, float]:
    _check_size(f.n)
    tree = tree if tree is not None else BranchTree(f, g)
    errs = [exact_error(f, g, z, tree) for z in range(1 << f.n)]
    z_star = int(np.argmax(errs))
    return z_star, errs[z_star]


# --- Monte Carlo through the state-vector simulator -------------------------

class _SimulatedChain:
    """Per-node measurement laws taken from simulated state vectors."""

    def __init__(self, f: BooleanFunction, g: RealFunction, x: int, y: int):
        self.n, self.size = f.n, 1 << f.n
        self.x, self.y, self.z = x, y, x ^ y
        self.support = wht(g).support
        self.f, self.g = f, g
        self._ids: dict = {}
        self.nodes: list[dict] = []
        self.root = self._intern(0, f.values, g.values)

    def _intern(self, k, fv, gv) -> int:
        key = _key(k, fv, gv)
        nid = self._ids.get(key)
        if nid is not None:
            return nid
        fk = BooleanFunction(self.n, fv)
        node = {"k": k, "f": fv, "g": gv, "terminal": int(_degrees(fv)) == 0, "children": {}}
        if not node["terminal"]:
            e = build_encoding(self.support, k, self.n)
            s = prepare_state(wht(RealFunction(self.n, gv)), e, self.x)
            s = apply_qft_m(apply_alice_decode(apply_bob_phase(s, e, self.y), e))
            probs = branch_distribution(s).probs.reshape(-1)
            node["cdf"] = np.cumsum(probs) / probs.sum()
            node["right_b"] = fk.values[np.arange(self.size) ^ self.z]
        nid = len(self.nodes)
        self.nodes.append(node)
        self._ids[key] = nid
        return nid

    def child(self, nid: int, t: int) -> int:
        node = self.nodes[nid]
        cid = node["children"].get(t)
        if cid is None:
            shift = np.arange(self.size) ^ t
            cid = self._intern(node["k"] + 1, node["f"] * node["f"][shift],
                               node["g"] * node["g"][shift])
            node["children"][t] = cid
        return cid

    def sample_wrong(self, count: int, rng: np.random.Generator) -> np.ndarray:
        """Mistake indicator of ``count`` independent runs, batched by node."""
        wrong = np.zeros(count, dtype=bool)
        if self.nodes[self.root]["terminal"]:
            return wrong
        where = np.full(count, self.root, dtype=np.int64)
        active = np.arange(count)
        while active.size:
            nxt_active, nxt_where = [], []
            cur = where[active]
            for nid in np.unique(cur):
                walkers = active[cur == nid]
                node = self.nodes[nid]
                idx = np.searchsorted(node["cdf"], rng.random(walkers.size), side="right")
                idx = np.minimum(idx, node["cdf"].size - 1)
                t, col = np.divmod(idx, 2)
                b = np.where(col == 0, 1, -1)
                wrong[walkers] ^= b != node["right_b"][t]
                for tv in np.unique(t[t != 0]):
                    cid = self.child(nid, int(tv))
                    if not self.nodes[cid]["terminal"]:
                        sel = walkers[t == tv]
                        nxt_active.append(sel)
                        nxt_where.append(np.full(sel.size, cid))
            if nxt_active:
                active = np.concatenate(nxt_active)
                where[active] = np.concatenate(nxt_where)
            else:
                active = np.zeros(0, dtype=np.int64)
        return wrong


def monte_carlo_error(f: BooleanFunction, g: RealFunction, z: int, trials: int,
                      rng: np.random.Generator, reps: int = 1, x: int | None = None) -> tuple[float, float]:
    """Empirical error rate and its binomial standard error.

    With ``reps > 1`` each trial is the majority of ``reps`` independent runs.
    ``x`` defaults to ``z`` (Bob then holds ``0``); only ``x xor y`` matters.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    if reps < 1 or reps % 2 == 0:
        raise ValueError("reps must be a positive odd integer")
    x = z if x is None else x
    chain = _SimulatedChain(f, g, x, x ^ z)
    wrong = chain.sample_wrong(trials * reps, rng).reshape(trials, reps)
    failed = wrong.sum(axis=1) > reps // 2
    p = float(failed.mean())
    return p, math.sqrt(p * (1.0 - p) / trials)


# --- derivative bound -----------------------------------------------------------

def check_derivative_bound(f: BooleanFunction, g: RealFunction, ts) -> tuple[float, float, bool]:
    """Sup distance of iterated derivatives against ``(1 + eps)^(2^k) - 1``."""
    eps = sup_distance(f, g)
    ts = list(ts)
    lhs = sup_distance(iterated_derivative(f, ts), iterated_derivative(g, ts))
    rhs = (1.0 + eps) ** (2 ** len(ts)) - 1.0
    return lhs, rhs, lhs <= rhs + 1e-12


def verification_csv(rows) -> str:
    """Rows of ``(function, n, ErrorReport, bound_comm)`` as CSV."""
    buf = io.StringIO()
    buf.write("function,z,exact_error,bound,comm,bound_comm,pass\n")
    for name, n, rep, bound_comm in rows:
        ok = rep.exact_error <= rep.bound + 1e-9 and rep.comm_max <= bound_comm
        buf.write(f"{name},{int_to_bits(rep.z, n)},{rep.exact_error:.12g},{rep.bound:.12g},"
                  f"{rep.comm_max},{bound_comm},{str(ok).lower()}\n")
    return buf.getvalue()
