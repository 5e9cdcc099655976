import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from qxor.boolean_core import RealFunction, and_n, character, constant, derivative, parity, shift
from qxor.fourier import (
    FourierSpectrum, SupportSet, approx_l1, ceil_log2_power, characters_matrix, fwht,
    inverse_wht, iterated_sumset, parseval_gap, sumset, wht,
)
from strategies import boolean_functions, brute_sumset, brute_wht, dot, random_boolean, real_functions


def scipy_l1(f, eps):
    """Reference value of the approximate l1 norm from HiGHS."""
    size = 1 << f.n
    chars = characters_matrix(f.n)
    block = np.hstack([chars, -chars])
    fv = f.values.astype(float)
    res = linprog(np.ones(2 * size), A_ub=np.vstack([block, -block]),
                  b_ub=np.concatenate([fv + eps, eps - fv]), bounds=(0, None), method="highs")
    assert res.status == 0
    return res.fun


# --- transform --------------------------------------------------------------

@given(real_functions(max_n=5))
def test_wht_matches_definition(g):
    ours = wht(g).as_dict()
    ref = brute_wht(g.values.tolist())
    assert set(ours) == set(ref)
    for a, c in ref.items():
        assert ours[a] == pytest.approx(c, abs=1e-12)


def test_wht_examples():
    assert wht(parity(3, [1, 3])).as_dict() == {0b101: 1.0}
    assert wht(and_n(2)).coeffs.tolist() == [0.5, 0.5, 0.5, -0.5]
    assert wht(constant(4)).as_dict() == {0: 1.0}


@given(real_functions(max_n=6))
def test_inverse_roundtrip(g):
    assert np.allclose(inverse_wht(wht(g)).values, g.values, atol=1e-9)


def test_inverse_examples():
    assert inverse_wht(FourierSpectrum.from_dict(3, {0: 1.0})).values.tolist() == [1.0] * 8
    # direct evaluation: 0.5 chi_01(z) - 0.5 chi_10(z)
    s = FourierSpectrum.from_dict(2, {0b01: 0.5, 0b10: -0.5})
    direct = [0.5 * (-1) ** dot(1, z) - 0.5 * (-1) ** dot(2, z) for z in range(4)]
    assert inverse_wht(s).values.tolist() == direct == [0.0, -1.0, 1.0, 0.0]


def test_fwht_axis():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(8, 3))
    assert np.allclose(fwht(a, axis=0), characters_matrix(3) @ a)


def test_zero_tolerance_drops_dust():
    s = FourierSpectrum(2, np.array([1.0, 1e-10, -5e-10, 0.2]))
    assert s.support == SupportSet(2, (0, 3))
    assert s.l0 == 2


@given(boolean_functions(max_n=7))
def test_parseval_boolean(f):
    assert abs(wht(f).l2 ** 2 - 1.0) < 1e-9
    assert abs(parseval_gap(f)) < 1e-9


@given(real_functions(max_n=6))
def test_norm_ordering(g):
    s = wht(g)
    assert s.l1 >= s.l2 - 1e-12
    assert s.l2 >= np.abs(s.coeffs).max() - 1e-12


@given(real_functions(max_n=5), st.data())
def test_shift_phase_law(g, data):
    t = data.draw(st.integers(0, (1 << g.n) - 1))
    shifted = wht(shift(g, t)).coeffs
    base = wht(g).coeffs
    phases = np.array([(-1) ** dot(a, t) for a in range(1 << g.n)])
    assert np.allclose(shifted, phases * base, atol=1e-12)


def test_spectrum_csv():
    text = wht(and_n(2)).to_csv().splitlines()
    assert text[0] == "alpha_bits,coefficient"
    assert text[1:] == ["00,0.5", "01,0.5", "10,0.5", "11,-0.5"]


# --- sumsets ----------------------------------------------------------------

def test_sumset_examples():
    assert sumset(SupportSet(3, (5,)), SupportSet(3, (5,))) == SupportSet(3, (0,))
    assert sumset(SupportSet(2, (1, 2)), SupportSet(2, (1, 2))) == SupportSet(2, (0, 3))


@given(st.integers(1, 8), st.data())
@settings(max_examples=60)
def test_sumset_matches_pairs_and_size_bounds(n, data):
    size = 1 << n
    a = data.draw(st.sets(st.integers(0, size - 1), min_size=1, max_size=size))
    b = data.draw(st.sets(st.integers(0, size - 1), min_size=1, max_size=size))
    s = sumset(SupportSet(n, tuple(sorted(a))), SupportSet(n, tuple(sorted(b))))
    assert set(s) == brute_sumset(a, b)
    assert len(s) <= min(len(a) * len(b), size)


def test_sumset_convolution_branch():
    # big enough sets take the transform route
    rng = np.random.default_rng(3)
    n = 9
    a = set(rng.choice(1 << n, size=200, replace=False).tolist())
    b = set(rng.choice(1 << n, size=150, replace=False).tolist())
    s = sumset(SupportSet(n, tuple(sorted(a))), SupportSet(n, tuple(sorted(b))))
    assert set(s) == brute_sumset(a, b)


def test_iterated_sumset_examples():
    a = SupportSet(3, (1, 6))
    assert iterated_sumset(a, 0) == a
    assert iterated_sumset(SupportSet(3, (0, 3)), 1) == SupportSet(3, (0, 3))
    full = SupportSet(3, tuple(range(8)))
    assert iterated_sumset(full, 4) == full


@given(st.integers(1, 5), st.integers(0, 3), st.data())
def test_iterated_sumset_is_repeated_doubling(n, k, data):
    a = data.draw(st.sets(st.integers(0, (1 << n) - 1), min_size=1, max_size=6))
    ref = set(a)
    for _ in range(k):
        ref = brute_sumset(ref, ref)
    got = iterated_sumset(SupportSet(n, tuple(sorted(a))), k)
    assert set(got) == ref
    assert len(got) <= min(len(a) ** (2 ** k), 1 << n)


def test_support_inclusion_under_derivative_n4():
    rng = np.random.default_rng(4)
    for _ in range(40):
        # sparse random spectra make the inclusion non-trivial
        coeffs = np.zeros(16)
        idx = rng.choice(16, size=rng.integers(1, 5), replace=False)
        coeffs[idx] = rng.normal(size=idx.size)
        h = inverse_wht(FourierSpectrum(4, coeffs))
        a = set(idx.tolist())
        for t in range(16):
            supp = set(wht(derivative(h, t)).support)
            assert supp <= brute_sumset(a, a)


@pytest.mark.parametrize("size,k", [(1, 0), (1, 5), (2, 3), (3, 0), (3, 1), (5, 2), (7, 6), (3, 7), (4, 9)])
def test_ceil_log2_power(size, k):
    assert ceil_log2_power(size, k) == math.ceil(2 ** k * math.log2(size) - 1e-12)


# --- approximate l1 ---------------------------------------------------------

def test_approx_l1_eps_zero_is_plain_l1():
    f = and_n(3)
    g, v = approx_l1(f, 0.0)
    assert g.values.tolist() == f.values.tolist()
    assert v == pytest.approx(wht(f).l1)


def test_approx_l1_character():
    f = character(3, 0b110)
    g, v = approx_l1(f, 0.1)
    assert v == pytest.approx(0.9, abs=1e-6)
    assert np.allclose(g.values, 0.9 * f.values, atol=1e-6)


def test_approx_l1_matches_highs():
    rng = np.random.default_rng(5)
    for n in (2, 3, 4):
        for _ in range(4):
            f = random_boolean(rng, n)
            eps = float(rng.uniform(0.01, 0.6))
            g, v = approx_l1(f, eps)
            assert v == pytest.approx(scipy_l1(f, eps), abs=1e-6)
            assert np.max(np.abs(g.values - f.values)) <= eps + 1e-7
            assert wht(g).l1 == pytest.approx(v, abs=1e-6)


def test_approx_l1_monotone_in_eps():
    f = and_n(3)
    values = [approx_l1(f, e)[1] for e in (0.0, 0.05, 0.1, 0.3, 0.6)]
    assert all(a >= b - 1e-9 for a, b in zip(values, values[1:]))


def test_approx_l1_rejects_bad_input():
    with pytest.raises(ValueError):
        approx_l1(and_n(2), 1.0)
    with pytest.raises(ValueError):
        approx_l1(and_n(9), 0.1)


def test_real_function_spectrum_of_scaled_character():
    g = RealFunction(3, 0.7 * character(3, 5).values)
    assert wht(g).as_dict() == {5: pytest.approx(0.7)}
