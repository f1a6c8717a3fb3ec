"""Shared oracles: mpmath at high precision and brute-force helpers."""

from fractions import Fraction

import mpmath
import pytest

from layerwise.rigor import Interval

mpmath.mp.prec = 256


def mpf(x) -> mpmath.mpf:
    x = Fraction(x)
    return mpmath.mpf(x.numerator) / x.denominator


def mp_of(d) -> mpmath.mpf:
    return mpmath.mpf(d.num) * mpmath.mpf(2) ** (-d.exp)


def encloses(iv: Interval, x) -> bool:
    return mp_of(iv.lo) <= x <= mp_of(iv.hi)


@pytest.fixture
def oracle():
    return mpmath
