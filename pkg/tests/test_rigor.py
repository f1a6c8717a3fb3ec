from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from conftest import encloses, mpf
from layerwise.dyadic import Dyadic, pow2
from layerwise.rigor import (DomainNotInUnitInterval, Interval, NegativeDomain, NonpositiveDomain, Precision,
                             iv_exp, iv_log, iv_mul, iv_scale_pow2, iv_sqrt, normal_cdf, normal_quantile,
                             pi_enclosure, pow2_half)


def test_interval_arithmetic_examples():
    assert Interval(1) + Interval(2) == Interval(3)
    assert iv_mul(Interval(0, 1), Interval(-1, 1)) == Interval(-1, 1)
    assert iv_scale_pow2(Interval(5, 7), -3) == Interval(Dyadic(5, 3), Dyadic(7, 3))


def test_sqrt_examples():
    r = iv_sqrt(Interval(4), Precision(10))
    assert r.contains(2) and r.width <= pow2(-10)
    assert iv_sqrt(Interval(0)) == Interval(0)
    assert encloses(iv_sqrt(Interval(2), Precision(60)), mpmath.sqrt(2))
    with pytest.raises(NegativeDomain):
        iv_sqrt(Interval(-2, -1))


def test_log_examples():
    r = iv_log(Interval(1), Precision(40))
    assert r.contains(0) and r.width <= pow2(-39)
    e = iv_exp(Interval(1), Precision(60))
    assert iv_log(e, Precision(40)).contains(1)
    with pytest.raises(NonpositiveDomain):
        iv_log(Interval(-1, 0))


@settings(max_examples=40, deadline=None)
@given(st.fractions(Fraction(1, 1000), 1000), st.fractions(Fraction(1, 1000), 1000))
def test_log_is_inclusion_monotone(a, b):
    lo, hi = sorted((a, b))
    inner = Interval(Dyadic.from_fraction(lo, 30, "ceil"), Dyadic.from_fraction(hi, 30, "ceil"))
    outer = Interval(Dyadic.from_fraction(lo, 30, "floor"), Dyadic.from_fraction(hi, 30, "ceil") + pow2(-30))
    assert iv_log(inner, Precision(30)).lo >= iv_log(outer, Precision(30)).lo - pow2(-28)
    assert encloses(iv_log(inner, Precision(30)), mpmath.log(mp_mid(inner)))


def mp_mid(iv):
    return (mpf(iv.lo.to_fraction()) + mpf(iv.hi.to_fraction())) / 2


def test_constants_against_mpmath():
    assert encloses(pi_enclosure(), mpmath.pi)
    for j in range(-6, 7):
        assert encloses(pow2_half(j), mpmath.mpf(2) ** (mpmath.mpf(j) / 2))


@pytest.mark.parametrize("x", [-6, -2, -1, Fraction(-1, 2), 0, Fraction(1, 2), 1, 2, Fraction(37, 8), 6, 9])
def test_cdf_against_mpmath(x):
    c = normal_cdf(Interval(Fraction(x)), Precision(40))
    assert encloses(c, mpmath.ncdf(mpf(x)))
    assert c.width <= pow2(-38)


def test_cdf_symmetry_and_median():
    assert normal_cdf(Interval(0)).contains(Fraction(1, 2))
    for x in (Fraction(1, 3), 1, 3):
        x = Dyadic.from_fraction(Fraction(x), 40, "floor")
        s = normal_cdf(Interval(x)) + normal_cdf(Interval(-x))
        assert s.contains(1)


def test_quantile_examples():
    g = normal_quantile(Interval(Fraction(1, 2)))
    assert g.contains(0) and g.width <= pow2(-20)
    a = normal_cdf(Interval(1), Precision(50))
    assert normal_quantile(a).contains(1)
    q = normal_quantile(Interval(Fraction(5, 16)))
    s = normal_quantile(Interval(Fraction(11, 16)))
    assert (-s).overlaps(q)
    with pytest.raises(DomainNotInUnitInterval):
        normal_quantile(Interval(0, Fraction(1, 2)))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 2**20 - 1))
def test_quantile_against_mpmath(m):
    a = Fraction(m, 2**20)
    q = normal_quantile(Interval(a))
    assert encloses(q, mpmath.sqrt(2) * mpmath.erfinv(2 * mpf(a) - 1))
