from fractions import Fraction

import mpmath
import pytest

from conftest import encloses, mpf
from layerwise.brownian import (AlphaDecomposition, HNotSmallEnough, PathEnclosure, PhiEvaluator,
                                QuantileDomainDegenerate, StageTooShallow, UncertifiedTube, allocate_bits,
                                alpha_interval, bit_position, default_h0, element_count, element_index, eta,
                                force_sup_gadget, greater_nat, modulus_tube, owner, path_enclosure, path_max,
                                phi_dyadic, phi_reduction_transducer, phi_series, stage_end)
from layerwise.cantor import BitStream
from layerwise.dyadic import Dyadic, pow2
from layerwise.rigor import Interval, pow2_half
from layerwise.transducer import OpenNatSet


def mp_g(a):
    return mpmath.sqrt(2) * mpmath.erfinv(2 * a - 1)


def mp_phi_midpoint(decomp: AlphaDecomposition, t: Fraction):
    """Schauder series at t with every coefficient at its interval midpoint."""
    t = mpf(t)
    total = mpmath.mpf(0)
    for i in range(decomp.size):
        lo, hi = alpha_interval(decomp.element(i))
        eta_mid = mp_g((mpf(lo.to_fraction()) + mpf(hi.to_fraction())) / 2)
        if i == 0:
            d = t
        elif i == 1:
            d = min(t, 1 - t)
        else:
            j = i.bit_length() - 1
            n = i - (1 << j)
            a, b = mpf(Fraction(n, 2 ** j)), mpf(Fraction(n + 1, 2 ** j))
            d = mpmath.mpf(2) ** (mpmath.mpf(j) / 2) * max(0, min(t - a, b - t))
        total += eta_mid * d
    return total


def test_allocation_sizes():
    d1 = allocate_bits(BitStream.from_seed(1), 1)
    assert d1.consumed == 16 and d1.size == 4 and all(len(w) == 4 for w in d1.elements())
    d2 = allocate_bits(BitStream.from_seed(1), 2)
    assert d2.consumed == 64 and d2.size == 8 and all(len(w) == 8 for w in d2.elements())
    assert d2.element(0)[:4] == d1.element(0)


def test_bit_positions_are_a_bijection():
    for k in range(1, 6):
        seen = {}
        for i in range(element_count(k)):
            for t in range(4 * k):
                pos = bit_position(i, t)
                assert pos not in seen and pos < stage_end(k)
                seen[pos] = (i, t)
                assert owner(pos) == (i, t)
        assert len(seen) == stage_end(k)


def test_stage_extension_preserves_prefixes():
    p = BitStream.from_seed(5)
    for k in range(1, 5):
        small, big = allocate_bits(p, k), allocate_bits(p, k + 1)
        for i in range(small.size):
            assert big.element(i).startswith(small.element(i))


def test_eta_examples():
    assert eta("1000").lo >= 0
    e = eta("0111")
    assert e.hi <= 0
    assert encloses(e, mp_g(mpf(Fraction(7, 16)))) and encloses(e, mp_g(mpf(Fraction(1, 2))))
    for w in ("01", "0110", "101101", "0001"):
        for b in "01":
            assert eta(w).contains(eta(w + b))
    for w in ("", "0000", "111"):
        with pytest.raises(QuantileDomainDegenerate):
            eta(w)


def test_phi_examples():
    p = BitStream.from_seed(1)  # no constant 4-bit element at stage 1
    d = allocate_bits(p, 1)
    assert phi_dyadic(d, 0) == Interval(0)
    assert phi_dyadic(d, 1) == eta(d.element(0))
    ev = PhiEvaluator(d)
    three_quarters = ev.value(Fraction(3, 4))
    direct = (pow2_half(-1) * eta(d.element(element_index(1, 1))) + ev.value(1) + ev.value(Fraction(1, 2))).scale(-1)
    assert three_quarters == direct
    assert three_quarters.overlaps(phi_series(d, Fraction(3, 4)))
    with pytest.raises(StageTooShallow):
        phi_dyadic(d, Fraction(1, 8))


def test_telescoping_identity_at_one_half():
    d = allocate_bits(BitStream.from_seed(8), 3)
    ev = PhiEvaluator(d)
    assert ev.value(Fraction(1, 2)) == (ev.value(1) + eta(d.element(1))).scale(-1)


def test_series_and_recursion_contain_midpoint_value():
    for seed in range(4):
        d = allocate_bits(BitStream.from_seed(seed), 3)
        for m in range(17):
            t = Fraction(m, 16)
            a, b = phi_dyadic(d, t), phi_series(d, t)
            x = mp_phi_midpoint(d, t)
            assert encloses(a, x) and encloses(b, x)


def test_stage_refinement_nests():
    p = BitStream.from_seed(6)
    prev = None
    for k in range(2, 6):
        P = path_enclosure(p, 3, k)
        if prev is not None:
            for (t, new), (_, old) in zip(P.values, prev.values):
                assert old.contains(new)
        prev = P


def test_modulus_tube():
    r = modulus_tube(pow2(-20), 0)
    h = mpmath.mpf(2) ** -20
    assert encloses(r, mpmath.sqrt(3 * h * mpmath.log(1 / h)))
    assert 0.006 < float(r.lo) < 0.0065
    assert modulus_tube(pow2(-21), 0).hi < r.lo
    with pytest.raises(HNotSmallEnough):
        modulus_tube(pow2(-5), 0)
    assert modulus_tube(pow2(-5), 0, h0_policy=lambda d: pow2(-(d + 5))).lo > 0


def test_path_enclosure_examples():
    P = path_enclosure(BitStream.from_seed(3), 1, 2)
    assert [t for t, _ in P.values] == [Dyadic(0), Dyadic(1, 1), Dyadic(1)]
    assert P.values[0][1] == Interval(0)
    fine = path_enclosure(BitStream.from_seed(3), 4, 6)
    coarse = path_enclosure(BitStream.from_seed(3), 4, 4)
    assert len(fine.values) == 17
    for (_, a), (_, b) in zip(fine.values, coarse.values):
        assert a.width <= b.width and b.contains(a)
    csv_text = fine.to_csv()
    assert csv_text.count("\r\n") == 18 and "/2^" in csv_text
    assert fine.to_svg().startswith("<svg")


def test_path_max_examples():
    zero = PathEnclosure(1, tuple((Dyadic(m, 1), Interval(0)) for m in range(3)), Interval(0), 1)
    assert path_max(zero) == Interval(0) and greater_nat(path_max(zero)) == 0
    vals = tuple((Dyadic(m, 1), Interval(Fraction(-1), Dyadic.from_fraction(Fraction(23, 10), 20, "ceil")))
                 for m in range(3))
    P = PathEnclosure(1, vals, Interval(0, Dyadic.from_fraction(Fraction(1, 10), 20, "ceil")), 1)
    m = path_max(P)
    assert m.hi <= Dyadic.from_fraction(Fraction(24, 10), 18, "ceil") and greater_nat(m) <= 3
    with pytest.raises(UncertifiedTube):
        path_max(path_enclosure(BitStream.from_seed(1), 2, 2))
    Q = path_enclosure(BitStream.from_seed(7), 5, 7, layer_bound=0, h0_policy=lambda d: pow2(-(d + 5)))
    n = greater_nat(path_max(Q))
    assert all(v.lo <= n for _, v in Q.values)


def _fresh_check(K, v, cert, seed):
    beta = BitStream.from_word(v + cert.w, tail=BitStream.from_seed(seed))
    val = phi_dyadic(beta, cert.point.to_fraction(), k=cert.stage)
    return val.lo > K


def test_force_sup_examples():
    c0 = force_sup_gadget(0, "")
    assert _fresh_check(0, "", c0, 100)
    v = BitStream.from_seed(21).prefix(16)
    c2 = force_sup_gadget(2, v)
    assert c2.lower > 2 and _fresh_check(2, v, c2, 101)
    c1, c3 = force_sup_gadget(1, v), force_sup_gadget(3, v)
    assert len(c3.w) >= len(c1.w)


def test_phi_reduction_without_values_copies_input():
    p = BitStream.from_seed(5)
    red = phi_reduction_transducer(OpenNatSet(), p)
    assert red.output.prefix(300) == p.prefix(300)


def test_phi_reduction_one_value():
    red = phi_reduction_transducer(OpenNatSet.of(1), BitStream.from_seed(11))
    assert red.readout() >= 1
    assert len(red.transducer.insertions()) == 1
