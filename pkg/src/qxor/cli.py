"""Command-line front end: ``qxor analyze|run|oracle|sweep|serve``.

Exit codes: 0 success, 2 usage error, 3 protocol or precondition failure,
4 unreadable or malformed input.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path


from .boolean_core import FunctionSpecError, RealFunction, gf2_degree, int_to_bits, parse_bitvector, parse_function
from .fourier import approx_l1, wht
from .oracle import BranchTree, check_derivative_bound, error_report, monte_carlo_error, verification_csv
from .protocol import (Alice, ProtocolConfig, ProtocolError, cost_bound, pipeline_bounded_error,
                       run_protocol, width_schedule)
from .rng import make_rng, spawn
from .transport import BobEndpoint, HandshakeError, connect_alice

EXIT_PROTOCOL = 3
EXIT_INPUT = 4
CLI_EXACT_MAX_N = 5


class UsageError(Exception):
    pass


def _load(path: str):
    try:
        return parse_function(Path(path).read_text())
    except OSError as exc:
        raise FunctionSpecError(f"cannot read {path}: {exc}") from exc


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _rows_to_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


# --- analyze ----------------------------------------------------------------

def analyze(f, eps: float | None = None) -> dict:
    s = wht(f)
    d = gf2_degree(f)
    bound = cost_bound(d, s.l0)
    report = {
        "n": f.n,
        "degree": d,
        "l0": s.l0,
        "l1": s.l1,
        "l2": s.l2,
        "support_size": len(s.support),
        "widths": width_schedule(s.l0, d, f.n),
        "bound_qubits": bound.exact,
        "loose_bound_qubits": bound.loose,
    }
    if eps is not None:
        _, value = approx_l1(f, eps)
        report["eps"] = eps
        report["l1_eps"] = value
    return report


def cmd_analyze(args) -> int:
    report = analyze(_load(args.function), args.eps)
    if args.format == "csv":
        flat = dict(report, widths=" ".join(map(str, report["widths"])))
        _emit(_rows_to_csv([flat]), args.out)
    else:
        _emit(json.dumps(report, indent=2) + "\n", args.out)
    return 0


# --- run --------------------------------------------------------------------

def _parse_inputs(args, n):
    try:
        x = parse_bitvector(args.x, n) if getattr(args, "x", None) is not None else None
        y = parse_bitvector(args.y, n) if getattr(args, "y", None) is not None else None
    except FunctionSpecError as exc:
        raise UsageError(str(exc)) from exc
    return x, y


def build_instance(f, mode: str, eps: float | None, seed: int, lam: float):
    """Protocol instance and the generator for protocol measurements."""
    pipe_rng, proto_rng = spawn(seed, 2)
    if mode == "exact":
        inst = pipeline_bounded_error(f, 0.0, pipe_rng)
    else:
        d = gf2_degree(f)
        eps = 2.0 ** (-d - 5) if eps is None else eps
        inst = pipeline_bounded_error(f, eps, pipe_rng, lam=lam)
    return inst, proto_rng


def run_report(name, f, inst, mode, seed, x, y, answer, transcripts, ledgers=None) -> dict:
    truth = f(x ^ y)
    runs = [tr.to_dict() for tr in transcripts]
    report = {
        "function": name,
        "mode": mode,
        "eps": inst.eps,
        "seed": seed,
        "x": int_to_bits(x, f.n),
        "y": int_to_bits(y, f.n),
        "rounds": runs[0]["rounds"] if runs else [],
        "total_qubits": sum(r["total_qubits"] for r in runs),
        "classical_bits": sum(r["classical_bits"] for r in runs),
        "bound_qubits": inst.bound_qubits(),
        "max_qubits_per_run": max((r["total_qubits"] for r in runs), default=0),
        "answer": answer,
        "truth": truth,
        "correct": answer == truth,
        "reps": len(runs),
        "runs": runs,
    }
    if mode != "exact":
        report["pipeline"] = inst.report()
    if ledgers is not None:
        report["ledger_qubits"] = sum(ledgers)
    return report


def cmd_run(args) -> int:
    f = _load(args.function)
    x, y = _parse_inputs(args, f.n)
    if x is None or y is None:
        raise UsageError("run needs --x and --y")
    inst, rng = build_instance(f, args.mode, args.eps, args.seed, args.lam)
    reps = args.reps if args.reps is not None else inst.reps
    if reps < 1 or reps % 2 == 0:
        raise UsageError("--reps must be a positive odd integer")
    cfg = inst.config(args.seed)
    if args.preparation == "circuit":
        cfg = ProtocolConfig(cfg.mode, cfg.eps, cfg.seed, cfg.max_rounds, "circuit")
    transcripts, total = [], 0
    for _ in range(reps):
        answer, tr = run_protocol(f, inst.h, x, y, cfg, rng)
        transcripts.append(tr)
        total += answer
    answer = 1 if total > 0 else -1
    report = run_report(args.function, f, inst, args.mode, args.seed, x, y, answer, transcripts)
    _emit(json.dumps(report, indent=2) + "\n", args.out)
    return 0


# --- oracle -----------------------------------------------------------------

def perturbed(f, eps: float, seed: int) -> RealFunction:
    """``g = f + eps * r`` with seeded signs ``r``, so ``||f - g||_inf = eps``."""
    if eps == 0:
        return f.as_real()
    r = make_rng(seed).choice([-1.0, 1.0], size=1 << f.n)
    return RealFunction(f.n, f.values + eps * r)


def cmd_oracle(args) -> int:
    f = _load(args.function)
    eps_list = [float(e) for e in args.eps_profile.split(",")]
    name = Path(args.function).stem
    if args.derivative_table:
        rng = make_rng(args.seed)
        rows = []
        for eps in eps_list:
            g = perturbed(f, eps, args.seed)
            for k in range(4):
                ts = rng.integers(0, 1 << f.n, size=k).tolist()
                lhs, rhs, ok = check_derivative_bound(f, g, ts)
                rows.append({"eps": eps, "k": k, "ts": " ".join(int_to_bits(t, f.n) for t in ts),
                             "lhs": lhs, "rhs": rhs, "pass": str(ok).lower()})
        _emit(_rows_to_csv(rows), args.out)
        return 0

    d = gf2_degree(f)
    if args.monte_carlo:
        rng = make_rng(args.seed)
        rows = []
        for eps in eps_list:
            g = perturbed(f, eps, args.seed)
            for z in range(1 << f.n):
                est, se = monte_carlo_error(f, g, z, args.monte_carlo, rng)
                rows.append({"function": name, "eps": eps, "z": int_to_bits(z, f.n),
                             "estimate": est, "stderr": se, "bound": 2.0 ** d * eps,
                             "pass": str(est <= 2.0 ** d * eps + 4 * se).lower()})
        _emit(_rows_to_csv(rows), args.out)
        return 0

    if f.n > CLI_EXACT_MAX_N:
        sys.stderr.write(f"n = {f.n} is too large for exact enumeration; "
                         "rerun with --monte-carlo <trials>\n")
        return EXIT_PROTOCOL
    rows = []
    for eps in eps_list:
        g = perturbed(f, eps, args.seed)
        tree = BranchTree(f, g)
        bound_comm = cost_bound(d, wht(g).l0).exact
        label = name if len(eps_list) == 1 else f"{name}@{eps:g}"
        rows += [(label, f.n, error_report(f, g, z, tree), bound_comm) for z in range(1 << f.n)]
    _emit(verification_csv(rows), args.out)
    return 0


# --- sweep ------------------------------------------------------------------

SWEEP_FIELDS = ["file", "n", "degree", "l0", "l1", "bound_qubits", "comm_max",
                "max_exact_error", "status", "error"]


def sweep_one(path: str) -> dict:
    row = dict.fromkeys(SWEEP_FIELDS, "")
    row["file"] = Path(path).name
    try:
        f = _load(path)
        info = analyze(f)
        row.update(n=f.n, degree=info["degree"], l0=info["l0"], l1=f"{info['l1']:.12g}",
                   bound_qubits=info["bound_qubits"])
        if f.n <= CLI_EXACT_MAX_N:
            g = f.as_real()
            tree = BranchTree(f, g)
            reps = [error_report(f, g, z, tree) for z in range(1 << f.n)]
            worst = max(r.exact_error for r in reps)
            row.update(comm_max=tree.comm_max(), max_exact_error=f"{worst:.3g}")
            ok = worst <= 1e-9 and tree.comm_max() <= info["bound_qubits"]
            row["status"] = "ok" if ok else "fail"
        else:
            row["status"] = "skipped"
    except (FunctionSpecError, ValueError) as exc:
        row["status"] = "error"
        row["error"] = str(exc)
    return row


def sweep(corpus: str, jobs: int = 1) -> list[dict]:
    paths = sorted(str(p) for p in Path(corpus).iterdir() if p.is_file())
    if jobs > 1 and len(paths) > 1:
        with ProcessPoolExecutor(jobs) as pool:
            return list(pool.map(sweep_one, paths, chunksize=8))
    return [sweep_one(p) for p in paths]


def cmd_sweep(args) -> int:
    if not Path(args.corpus).is_dir():
        raise FunctionSpecError(f"{args.corpus} is not a directory")
    rows = sweep(args.corpus, args.jobs)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=SWEEP_FIELDS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    _emit(buf.getvalue(), args.out)
    return 0


# --- serve ------------------------------------------------------------------

def cmd_serve(args) -> int:
    f = _load(args.function)
    inst, rng = build_instance(f, args.mode, args.eps, args.seed, args.lam)
    if args.role == "bob":
        _, y = _parse_inputs(args, f.n)
        if y is None:
            raise UsageError("bob needs --y")
        bob = BobEndpoint(inst.support, y, args.seed, f.n, args.host, args.port)
        if args.ready_file:
            Path(args.ready_file).write_text(str(bob.address[1]))
        bob.serve_one()
        if bob.error is not None:
            raise bob.error
        return 0

    x, _ = _parse_inputs(args, f.n)
    if x is None:
        raise UsageError("alice needs --x")
    reps = args.reps if args.reps is not None else inst.reps
    cfg = inst.config(args.seed)
    link = connect_alice(args.host, args.port, args.seed)
    transcripts, total = [], 0
    try:
        for _ in range(reps):
            before = link.ledger_qubits
            answer, tr = Alice(f, inst.h, x, cfg, rng, inst.support).run(link)
            assert link.ledger_qubits - before == tr.total_qubits
            transcripts.append(tr)
            total += answer
    finally:
        link.sock.close()
    answer = 1 if total > 0 else -1
    # Alice never learns y; the truth column needs it, so it is optional here
    y = parse_bitvector(args.peer_y, f.n) if args.peer_y else None
    report = run_report(args.function, f, inst, args.mode, args.seed, x,
                        y if y is not None else 0, answer, transcripts, [link.ledger_qubits])
    if y is None:
        for key in ("y", "truth", "correct"):
            report[key] = None
    _emit(json.dumps(report, indent=2) + "\n", args.out)
    return 0


# --- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qxor", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="degree, Fourier norms and the communication bound")
    a.add_argument("function")
    a.add_argument("--eps", type=float, help="also compute the eps-approximate l1 norm")
    a.add_argument("--format", choices=["json", "csv"], default="json")
    a.add_argument("--out")
    a.set_defaults(func=cmd_analyze)

    def protocol_flags(sp):
        sp.add_argument("--mode", choices=["exact", "approx"], default="exact")
        sp.add_argument("--eps", type=float, help="target error in approx mode (default 2^-(d+5))")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--reps", type=int, help="odd repetition count (default: from the bound)")
        sp.add_argument("--lam", type=float, default=0.9, help="sparsifier failure probability")
        sp.add_argument("--out")

    r = sub.add_parser("run", help="run the protocol in-process and print a JSON report")
    r.add_argument("function")
    r.add_argument("--x", required=True)
    r.add_argument("--y", required=True)
    r.add_argument("--preparation", choices=["direct", "circuit"], default="direct")
    protocol_flags(r)
    r.set_defaults(func=cmd_run)

    o = sub.add_parser("oracle", help="exact error by branch enumeration")
    o.add_argument("function")
    o.add_argument("--eps-profile", default="0", help="comma-separated sup distances of g from f")
    o.add_argument("--monte-carlo", type=int, metavar="TRIALS")
    o.add_argument("--derivative-table", action="store_true", help="emit the derivative error table instead")
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--format", choices=["csv"], default="csv")
    o.add_argument("--out")
    o.set_defaults(func=cmd_oracle)

    s = sub.add_parser("sweep", help="analyze and verify every function file in a directory")
    s.add_argument("corpus")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--format", choices=["csv"], default="csv")
    s.add_argument("--out")
    s.set_defaults(func=cmd_sweep)

    v = sub.add_parser("serve", help="run one party of a networked protocol")
    v.add_argument("function")
    v.add_argument("--role", choices=["alice", "bob"], required=True)
    v.add_argument("--host", default="127.0.0.1")
    v.add_argument("--port", type=int, default=0)
    v.add_argument("--x")
    v.add_argument("--y")
    v.add_argument("--peer-y", help="Bob's input, only to fill the truth column of Alice's report")
    v.add_argument("--ready-file", help="bob: write the bound port here once listening")
    protocol_flags(v)
    v.set_defaults(func=cmd_serve)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (FunctionSpecError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    except (ProtocolError, HandshakeError, ValueError, OverflowError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_PROTOCOL


if __name__ == "__main__":
    sys.exit(main())
