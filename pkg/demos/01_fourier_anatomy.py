"""
Fourier anatomy of a few XOR-function targets
=============================================

Degree over GF(2) sets the number of rounds; the spectrum support sets how
wide each round's register is. Here we compute both for a handful of
functions and see how derivatives shrink degree while spectra spread over
sumsets.
"""

import numpy as np

from qxor import (and_n, derivative, equality_n, gf2_degree, hamming_le, named_function, wht,
                  sumset, cost_bound)

# a small catalog, from a single character up to a full-degree threshold
catalog = {
    "parity({1,3})": named_function("parity({1,3})", 4),
    "and_4": and_n(4),
    "equality_4": equality_n(4),
    "hamming_le(4,1)": hamming_le(4, 1),
}

print(f"{'function':18s} {'deg':>3s} {'l0':>4s} {'l1':>7s} {'bound':>6s}")
for name, f in catalog.items():
    s = wht(f)
    d = gf2_degree(f)
    print(f"{name:18s} {d:3d} {s.l0:4d} {s.l1:7.3f} {cost_bound(d, s.l0).exact:6d}")

# Parseval: the squared coefficients of any +-1 function sum to one
f = catalog["hamming_le(4,1)"]
print("\nsum of squared coefficients:", np.square(wht(f).coeffs).sum())

# one derivative drops the degree and keeps the spectrum inside A + A
t = 0b0110
df = derivative(f, t)
a = wht(f).support
print(f"\nderivative along {t:04b}: degree {gf2_degree(f)} -> {gf2_degree(df)}")
print("support inside A + A:", wht(df).support.issubset(sumset(a, a)))

# the spectrum itself, in the CSV dump format
print("\n" + wht(catalog["and_4"]).to_csv())
