"""
Running the exact protocol by hand
==================================

With ``g = f`` every measured sign is right, so the answer is exact. We run
AND on three bits for one input pair, print the transcript, then confirm by
exhaustive enumeration that no branch of the protocol ever errs.
"""

from qxor import (BranchTree, ProtocolConfig, and_n, cost_bound, gf2_degree, make_rng,
                  run_exact, wht, worst_case_error)

f = and_n(3)
x, y = 0b110, 0b011
answer, tr = run_exact(f, x, y, ProtocolConfig(seed=7), make_rng(7))

print(f"f(x xor y) = {f(x ^ y):+d}, protocol answered {answer:+d}")
for r in tr.rounds:
    print(f"  round {r.k}: sent {r.qubits_alice_to_bob} qubits each way, "
          f"measured t={r.t:03b} b={r.b:+d}, announced degree {r.deg_announced}")
print(f"total qubits {tr.total_qubits}, classical bits {tr.classical_bits}, "
      f"ended by {tr.terminated_by}")

# every branch, every input: error is zero and communication stays under the bound
tree = BranchTree(f, f.as_real())
z_star, err = worst_case_error(f, f.as_real(), tree)
bound = cost_bound(gf2_degree(f), wht(f).l0)
print(f"\nworst-case error {err} (at z={z_star:03b})")
print(f"longest branch uses {tree.comm_max()} qubits; bound {bound.exact}, "
      f"looser form {bound.loose:.1f}")
