import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qxor.boolean_core import RealFunction, iterated_derivative
from qxor.encoding import EncodingError, build_encoding, codeword_width, decode, encode
from qxor.fourier import FourierSpectrum, SupportSet, inverse_wht, wht
from strategies import brute_sumset


def test_singleton_support_has_zero_width():
    a = SupportSet(3, (5,))
    e0 = build_encoding(a, 0)
    assert list(e0.domain) == [5] and e0.codeword_width == 0
    assert encode(e0, 5) == 0 and decode(e0, 0) == 5
    for k in (1, 2, 3):
        e = build_encoding(a, k)
        assert list(e.domain) == [0] and e.codeword_width == 0
        assert encode(e, 0) == 0


def test_full_support_n2_is_identity():
    e = build_encoding(SupportSet(2, (0, 1, 2, 3)), 0)
    assert e.codeword_width == 2 and e.identity
    for a in range(4):
        assert encode(e, a) == a


def test_two_element_support_round1():
    e = build_encoding(SupportSet(4, (0b0001, 0b0010)), 1)
    assert list(e.domain) == [0b0000, 0b0011]
    assert e.codeword_width == 2
    assert [encode(e, a) for a in e.domain] == [0, 1]


def test_first_sorted_element_is_codeword_zero():
    e = build_encoding(SupportSet(5, (3, 9, 17)), 1)
    assert encode(e, min(e.domain)) == 0


def test_encode_outside_domain_is_error():
    e = build_encoding(SupportSet(4, (1, 2)), 0)
    with pytest.raises(EncodingError):
        encode(e, 3)
    with pytest.raises(EncodingError):
        decode(e, 2)


def test_build_rejects_empty_support():
    with pytest.raises(EncodingError):
        build_encoding(SupportSet(3, ()), 0)


@given(st.integers(1, 6), st.integers(0, 3), st.data())
def test_codebook_properties(n, k, data):
    a = data.draw(st.sets(st.integers(0, (1 << n) - 1), min_size=1, max_size=1 << n))
    e = build_encoding(SupportSet(n, tuple(sorted(a))), k)
    ref = set(a)
    for _ in range(k):
        ref = brute_sumset(ref, ref)
    assert set(e.domain) == ref
    width = min(n, math.ceil(2 ** k * math.log2(len(a)) - 1e-12))
    assert e.codeword_width == width
    assert len(e.domain) <= 2 ** e.codeword_width
    assert (e.codeword_width == 0) == (len(a) == 1)
    alphas = np.array(sorted(ref))
    codes = encode(e, alphas)
    assert len(set(np.atleast_1d(codes).tolist())) == len(ref)
    assert np.array_equal(decode(e, codes), alphas)
    if not e.identity:
        assert np.array_equal(codes, np.arange(len(ref)))


@pytest.mark.parametrize("size,k,n", [(1, 3, 5), (2, 0, 5), (3, 0, 5), (3, 1, 5), (3, 2, 5), (2, 9, 30)])
def test_codeword_width(size, k, n):
    expect = 0 if size == 1 else min(n, math.ceil(2 ** k * math.log2(size) - 1e-12))
    assert codeword_width(size, k, n) == expect


def test_derivative_supports_fit_the_codebook_n4():
    rng = np.random.default_rng(0)
    for _ in range(25):
        coeffs = np.zeros(16)
        idx = rng.choice(16, size=rng.integers(1, 4), replace=False)
        coeffs[idx] = rng.normal(size=idx.size)
        g = inverse_wht(FourierSpectrum(4, coeffs))
        a = wht(g).support
        for k in range(4):
            e = build_encoding(a, k)
            for ts in rng.integers(0, 16, size=(20, k)):
                supp = wht(iterated_derivative(g, ts.tolist())).support
                assert supp.issubset(e.domain)
