"""
From a dense function to a sparse approximator
==============================================

For functions with a large spectrum we trade exactness for width: solve a
linear program for a low-l1 approximator, sparsify it by l1-sampling, and
repeat the protocol to push the error down. Threshold-at-one on six bits is
a good example: full degree, full support.
"""

from qxor import (BranchTree, cost_bound, hamming_le, make_rng, monte_carlo_error,
                  pipeline_bounded_error, wht, worst_case_error)

f = hamming_le(6, 1)
d = 6
eps = 2.0 ** (-d - 5)
print(f"support of f: {wht(f).l0} characters, l1 = {wht(f).l1:.3f}")

inst = pipeline_bounded_error(f, eps, make_rng(11))
for key, value in inst.report().items():
    print(f"  {key:22s} {value}")

# per-run error of the sparse protocol, computed exactly over all branches
tree = BranchTree(f, inst.h)
z_star, p_run = worst_case_error(f, inst.h, tree)
print(f"\nexact per-run error {p_run:.3g} at z={z_star:06b}; bound {inst.per_run_bound:.3g}")

# the majority vote over inst.reps runs, estimated by sampling the simulator
est, se = monte_carlo_error(f, inst.h, z_star, 20_000, make_rng(3), reps=inst.reps)
print(f"majority-of-{inst.reps} error: {est:.3g} +- {se:.2g} (target {eps:.3g})")

bound = cost_bound(d, inst.h_sparsity).exact
print(f"qubits per run at most {tree.comm_max()}, bound {bound}")
print(f"total over the repetitions at most {inst.reps * tree.comm_max()}")
