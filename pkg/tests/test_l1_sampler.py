import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qxor.boolean_core import RealFunction, and_n, character
from qxor.fourier import FourierSpectrum, inverse_wht, wht
from qxor.l1_sampler import (
    SparsifierParams, hoeffding_tail, l1_sample, l1_samples, required_samples, sparsify,
    sup_distance,
)
from qxor.rng import make_rng, spawn
from strategies import random_boolean, real_functions


def test_hoeffding_examples():
    assert hoeffding_tail(5, 0.0) == 2.0
    assert hoeffding_tail(1, 2.0) == pytest.approx(2 * math.exp(-1))
    assert hoeffding_tail(1, 2.0) == pytest.approx(0.7358, abs=1e-4)


@given(st.integers(1, 100), st.floats(0, 50), st.floats(0.1, 5))
def test_hoeffding_monotone(m, t, dt):
    assert hoeffding_tail(m, t + dt) <= hoeffding_tail(m, t)
    assert hoeffding_tail(m + 1, t) >= hoeffding_tail(m, t)


def test_required_samples_closed_form():
    assert required_samples(2.0, 6, 0.2, 0.1) == math.ceil(400 * math.log(1280)) == 2862


@given(st.floats(0.1, 10), st.integers(1, 12), st.floats(0.01, 1), st.floats(0.01, 0.99))
def test_required_samples_is_smallest(l1, n, delta, lam):
    def bound(m):
        return 2 ** (n + 1) * math.exp(-delta ** 2 * m / (4 * l1 ** 2))
    try:
        m = required_samples(l1, n, delta, lam)
    except OverflowError:
        return
    assert bound(m) <= lam
    assert m == 1 or bound(m - 1) > lam


def test_required_samples_quadratic_in_l1():
    m1 = required_samples(1.5, 6, 0.1, 0.2)
    m2 = required_samples(3.0, 6, 0.1, 0.2)
    assert abs(m2 - 4 * m1) <= 4


def test_required_samples_refuses_overflow():
    with pytest.raises(OverflowError):
        required_samples(100.0, 20, 1e-3, 0.1)


def test_params_validation():
    with pytest.raises(ValueError):
        SparsifierParams(0.0, 0.1, 10)
    with pytest.raises(ValueError):
        SparsifierParams(0.1, 1.0, 10)
    with pytest.raises(ValueError):
        SparsifierParams(0.1, 0.1, 0)


def test_l1_sample_single_character():
    s = wht(character(4, 9))
    rng = make_rng(0)
    assert {l1_sample(s, rng) for _ in range(50)} == {9}


def test_l1_sample_empty_spectrum():
    with pytest.raises(ValueError):
        l1_sample(FourierSpectrum(2, np.zeros(4)), make_rng(0))


def test_l1_sample_frequencies_and2():
    s = wht(and_n(2))
    draws = 100_000
    counts = np.bincount(l1_samples(s, draws, make_rng(1)), minlength=4)
    sigma = math.sqrt(draws * 0.25 * 0.75)
    assert np.all(np.abs(counts - draws / 4) <= 3 * sigma)


def test_l1_sample_frequencies_weighted():
    coeffs = np.array([0.5, 0.0, -0.3, 0.2, 0.0, 0.0, 0.0, 1.0])
    s = FourierSpectrum(3, coeffs)
    p = np.abs(coeffs) / np.abs(coeffs).sum()
    draws = 100_000
    rng = make_rng(2)
    single = np.bincount([l1_sample(s, rng) for _ in range(20_000)], minlength=8) / 20_000
    batch = np.bincount(l1_samples(s, draws, rng), minlength=8) / draws
    for freq, trials in ((single, 20_000), (batch, draws)):
        sigma = np.sqrt(p * (1 - p) / trials)
        assert np.all(np.abs(freq - p) <= 3 * sigma + 1e-12)


def test_sparsify_character_exact():
    g = RealFunction(3, character(3, 6).values.astype(float))
    h = sparsify(g, SparsifierParams(0.1, 0.1, 37), make_rng(3))
    assert np.allclose(h.values, g.values)


def test_sparsify_and2_empirical():
    g = and_n(2).as_real()
    params = SparsifierParams.for_norm(wht(g).l1, 2, 0.25, 0.1)
    fails = sum(sup_distance(sparsify(g, params, r), g) > 0.25 for r in spawn(4, 200))
    assert fails <= 20


def test_sparsify_sparsity_and_l1():
    rng = make_rng(5)
    for _ in range(30):
        g = RealFunction(5, rng.normal(size=32))
        m = int(rng.integers(1, 60))
        h = sparsify(g, SparsifierParams(0.5, 0.5, m), rng)
        s = wht(h)
        assert s.l0 <= min(m, 32)
        assert s.l1 <= wht(g).l1 + 1e-9


def test_sparsify_is_unbiased():
    rng = make_rng(6)
    g = inverse_wht(FourierSpectrum(3, np.array([0.4, -0.2, 0, 0.1, 0, 0, 0.3, 0])))
    params = SparsifierParams(0.5, 0.5, 5)
    trials = 10_000
    hs = np.array([sparsify(g, params, rng).values for _ in range(trials)])
    se = hs.std(axis=0) / math.sqrt(trials)
    assert np.all(np.abs(hs.mean(axis=0) - g.values) <= 4 * se + 1e-12)


def test_sparsify_deterministic_given_seed():
    g = random_boolean(make_rng(7), 4).as_real()
    params = SparsifierParams(0.3, 0.2, 500)
    assert sparsify(g, params, make_rng(8)) == sparsify(g, params, make_rng(8))


def test_sup_distance_examples():
    f = and_n(3)
    assert sup_distance(f, f) == 0
    assert sup_distance(f, RealFunction(3, 0.9 * f.values)) == pytest.approx(0.1)


@given(real_functions(min_n=3, max_n=3), real_functions(min_n=3, max_n=3),
       real_functions(min_n=3, max_n=3))
def test_sup_distance_triangle(a, b, c):
    assert sup_distance(a, c) <= sup_distance(a, b) + sup_distance(b, c) + 1e-12
