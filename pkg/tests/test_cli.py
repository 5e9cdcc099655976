import csv
import io
import json
import threading
import time

import pytest

from qxor.boolean_core import BooleanFunction, format_function
from qxor.cli import main


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


@pytest.fixture
def files(tmp_path):
    return {
        "parity": write(tmp_path, "parity.txt", "n=3\nkind=family\nfamily=parity params={1,2,3}\n"),
        "and2": write(tmp_path, "and2.txt", "n=2\nkind=anf\nz1*z2\n"),
        "const": write(tmp_path, "const.txt", "n=2\nkind=family\nfamily=const params=+1\n"),
        "ham": write(tmp_path, "ham.txt", "n=6\nkind=family\nfamily=hamming_le params=1\n"),
    }


def run_json(capsys, argv):
    assert main(argv) == 0
    return json.loads(capsys.readouterr().out)


def test_analyze(files, capsys):
    r = run_json(capsys, ["analyze", files["parity"]])
    assert (r["degree"], r["l0"], r["bound_qubits"]) == (1, 1, 2)
    r = run_json(capsys, ["analyze", files["and2"]])
    assert (r["degree"], r["l0"], r["bound_qubits"]) == (2, 4, 16)
    r = run_json(capsys, ["analyze", files["const"]])
    assert (r["degree"], r["bound_qubits"]) == (0, 0)
    r = run_json(capsys, ["analyze", files["and2"], "--eps", "0.1"])
    assert r["l1_eps"] < r["l1"]


def test_analyze_csv(files, capsys):
    assert main(["analyze", files["and2"], "--format", "csv"]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert rows[0]["bound_qubits"] == "16"


def test_run_exact_parity(files, capsys):
    r = run_json(capsys, ["run", files["parity"], "--x", "101", "--y", "011", "--seed", "4"])
    assert r["correct"] is True and r["total_qubits"] == 2
    for key in ("function", "mode", "eps", "seed", "rounds", "total_qubits", "classical_bits",
                "bound_qubits", "answer", "truth", "correct"):
        assert key in r
    assert r["seed"] == 4


def test_run_approx_reports_pipeline(files, capsys):
    r = run_json(capsys, ["run", files["and2"], "--x", "10", "--y", "11", "--mode", "approx",
                          "--eps", "0.005", "--seed", "1"])
    p = r["pipeline"]
    for key in ("l1_approx", "samples_M", "h_sparsity", "reps"):
        assert p[key] is not None
    assert r["reps"] == p["reps"] == len(r["runs"])
    assert r["max_qubits_per_run"] <= r["bound_qubits"]


def test_run_deterministic(files, capsys, tmp_path):
    out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
    argv = ["run", files["and2"], "--x", "01", "--y", "11", "--mode", "approx", "--eps", "0.005", "--seed", "9"]
    assert main(argv + ["--out", str(out1)]) == 0
    assert main(argv + ["--out", str(out2)]) == 0
    assert out1.read_text() == out2.read_text()


def test_run_bad_x_is_usage_error(files):
    with pytest.raises(SystemExit) as exc:
        main(["run", files["and2"], "--x", "101", "--y", "11"])
    assert exc.value.code == 2


def test_run_even_reps_is_usage_error(files):
    with pytest.raises(SystemExit) as exc:
        main(["run", files["and2"], "--x", "10", "--y", "11", "--reps", "2"])
    assert exc.value.code == 2


def test_run_eps_out_of_range_fails(files, capsys):
    assert main(["run", files["and2"], "--x", "10", "--y", "11", "--mode", "approx", "--eps", "0.1"]) == 3


def test_missing_file(tmp_path, capsys):
    assert main(["analyze", str(tmp_path / "nope.txt")]) == 4


def test_oracle_exact_column(files, capsys):
    assert main(["oracle", files["and2"]]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert len(rows) == 4
    assert all(float(r["exact_error"]) == 0 and r["pass"] == "true" for r in rows)


def test_oracle_eps_profile(files, capsys):
    assert main(["oracle", files["and2"], "--eps-profile", "0,0.05,0.1"]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert len(rows) == 12
    assert all(r["pass"] == "true" for r in rows)


def test_oracle_derivative_table(files, capsys):
    assert main(["oracle", files["and2"], "--derivative-table", "--eps-profile", "0.05"]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert [int(r["k"]) for r in rows] == [0, 1, 2, 3]
    assert all(r["pass"] == "true" for r in rows)


def test_oracle_refuses_large_n(files, capsys):
    assert main(["oracle", files["ham"]]) == 3
    assert "--monte-carlo" in capsys.readouterr().err


def test_oracle_monte_carlo(files, capsys):
    assert main(["oracle", files["and2"], "--monte-carlo", "500", "--eps-profile", "0.05"]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert len(rows) == 4 and all(r["pass"] == "true" for r in rows)


def test_sweep_exhaustive_n3(tmp_path, capsys):
    corpus = tmp_path / "corpus"
    corpus.mkdir()
    for code in range(256):
        f = BooleanFunction.from_zero_one(3, [(code >> i) & 1 for i in range(8)])
        (corpus / f"f{code:03d}.txt").write_text(format_function(f))
    (corpus / "broken.txt").write_text("n=3\nkind=table\n000 1\n")
    assert main(["sweep", str(corpus), "--jobs", "2"]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert len(rows) == 257
    broken = [r for r in rows if r["file"] == "broken.txt"]
    assert broken[0]["status"] == "error" and "8 rows" in broken[0]["error"]
    assert all(r["status"] == "ok" for r in rows if r["file"] != "broken.txt")


def test_sweep_empty_dir(tmp_path, capsys):
    (tmp_path / "empty").mkdir()
    assert main(["sweep", str(tmp_path / "empty")]) == 0
    out = capsys.readouterr().out.splitlines()
    assert len(out) == 1 and out[0].startswith("file,")


def serve_pair(tmp_path, fn, bob_args, alice_args):
    ready = tmp_path / "port"
    result = {}

    def bob():
        result["bob"] = main(["serve", fn, "--role", "bob", "--ready-file", str(ready)] + bob_args)

    th = threading.Thread(target=bob)
    th.start()
    for _ in range(100):
        if ready.exists() and ready.read_text():
            break
        time.sleep(0.05)
    out = tmp_path / "alice.json"
    code = main(["serve", fn, "--role", "alice", "--port", ready.read_text(), "--out", str(out)] + alice_args)
    th.join(10)
    return code, result.get("bob"), out


def test_serve_reproduces_run(files, tmp_path, capsys):
    common = ["--mode", "approx", "--eps", "0.005", "--seed", "12"]
    code, bob_code, out = serve_pair(tmp_path, files["and2"], ["--y", "11"] + common,
                                     ["--x", "01", "--peer-y", "11"] + common)
    assert code == 0 and bob_code == 0
    served = json.loads(out.read_text())
    assert served.pop("ledger_qubits") == served["total_qubits"]
    ran = run_json(capsys, ["run", files["and2"], "--x", "01", "--y", "11"] + common)
    assert served == ran
    assert served["seed"] == 12


def test_serve_seed_mismatch(files, tmp_path, capsys):
    code, bob_code, _ = serve_pair(tmp_path, files["and2"], ["--y", "11", "--seed", "1"],
                                   ["--x", "01", "--seed", "2"])
    assert code == 3 and bob_code == 3
