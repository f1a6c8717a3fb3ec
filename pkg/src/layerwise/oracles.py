"""Independent oracle checks for the worked examples.

Each check recomputes an example with a different method (mpmath at high
precision, brute-force enumeration, plain fraction sums) and compares.
The ``oracle-suite`` command prints them as a pass/fail table; the test
suite imports the same list.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import mpmath

from .brownian import allocate_bits, force_sup_gadget, path_enclosure, phi_dyadic, phi_series
from .cantor import BitStream, CylinderUnion
from .choice import ClosedNatSet, max_by_index, u_leq_a
from .dyadic import Dyadic, pow2
from .hitting import avoid_set_gadget, block_encode, brute_hitting_time, hit_clopen, hit_open
from .limits import (alternating_tail_bound, auxlil_claim_holds, birkhoff_average, birkhoff_gadget,
                     harmonic_partial, lil_gadget, lil_margin, lil_verify, sum_apr)
from .mltests import DilutionTest, audit_test
from .rigor import Interval, Precision, normal_cdf, normal_quantile
from .transducer import OpenNatSet

mpmath.mp.prec = 200


def mp_lil_margin(n: int) -> mpmath.mpf:
    return mpmath.sqrt(2 * n * mpmath.log(mpmath.log(n)))


def mpf_of(x) -> mpmath.mpf:
    x = Fraction(x)
    return mpmath.mpf(x.numerator) / x.denominator


def mp_cdf(x) -> mpmath.mpf:
    return mpmath.ncdf(mpf_of(x))


def mp_quantile(a) -> mpmath.mpf:
    return mpmath.sqrt(2) * mpmath.erfinv(2 * mpf_of(a) - 1)


def contains_mp(iv: Interval, x: mpmath.mpf) -> bool:
    lo = mpmath.mpf(iv.lo.num) * mpmath.mpf(2) ** (-iv.lo.exp)
    hi = mpmath.mpf(iv.hi.num) * mpmath.mpf(2) ** (-iv.hi.exp)
    return lo <= x <= hi


def _check_margin_20():
    return contains_mp(lil_margin(20), mp_lil_margin(20))


def _check_margin_monotone():
    ms = [lil_margin(n) for n in range(3, 200)]
    return all(a.lo < b.hi for a, b in zip(ms, ms[1:])) and all(
        mp_lil_margin(n) < mp_lil_margin(n + 1) for n in range(3, 200))


def _check_lil_examples():
    ok = lil_verify("01" * 50, 4, 100).holds
    v = lil_verify("1" * 25, 3, 25)
    return ok and not v.holds and 25 > mp_lil_margin(25)


def _check_lil_gadget():
    a = lil_gadget("", 0) == "1" * 20 and 20 > mp_lil_margin(20)
    b = lil_gadget("0" * 10, 0) == "1" * 30 and 20 > mp_lil_margin(40)
    return a and b


def _check_auxlil():
    for k in range(101):
        l = max(20, 2 * k)
        if not (l > mp_lil_margin(2 * k + l) and auxlil_claim_holds(k)):
            return False
    return True


def _check_birkhoff():
    return (birkhoff_average("1101000010", 9) == Fraction(4, 10)
            and birkhoff_gadget("1", 2, 1) == "000"
            and birkhoff_gadget("", 2, 5) == "0" * 5)


def _check_harmonic():
    return (harmonic_partial("000", 3).sum == Fraction(11, 6)
            and harmonic_partial("0101", 4).sum == Fraction(7, 12))


def _check_sum_apr():
    alt = "01" * 200
    return (sum_apr(alt, Fraction(0), 1, 400, alternating_tail_bound(400)) == 1
            and sum_apr(alt, Fraction(10), 1, 400, alternating_tail_bound(400)) == 0
            and sum_apr("0" * 400, Fraction(0), 1, 400) is None)


def _check_cdf_quantile():
    for x in (-2, -1, Fraction(-1, 2), 0, Fraction(1, 2), 1, 2):
        c = normal_cdf(Interval.point(Fraction(x)))
        if not contains_mp(c, mp_cdf(x)):
            return False
    g = normal_quantile(Interval.point(Fraction(1, 2)))
    q = normal_quantile(Interval.point(Fraction(3, 4)))
    return g.contains(0) and contains_mp(q, mp_quantile(Fraction(3, 4)))


def _check_phi_vs_series():
    for seed in range(3):
        d = allocate_bits(BitStream.from_seed(seed), 4)
        for t in (Fraction(m, 8) for m in range(9)):
            a = phi_dyadic(d, t, prec=Precision(40))
            b = phi_series(d, t)
            if not a.overlaps(b):
                return False
    return True


def _check_path_grid():
    P = path_enclosure(BitStream.from_seed(7), 5, 7)
    return len(P.values) == 33


def _check_force_sup():
    return force_sup_gadget(1, "").lower > 1


def _check_audit():
    return audit_test(DilutionTest(), 10, max_len=10).ok


def _check_hit_open():
    for i, ws in enumerate(itertools.product(["0", "1", "00", "11", "010", "1101"], repeat=2)):
        p = BitStream.from_seed(i)
        h = hit_open(p, CylinderUnion(ws))
        if h.n != brute_hitting_time(p, ws, 64):
            return False
    return hit_open(BitStream.from_word("001", fill=0), CylinderUnion.of("1")).n == 2


def _check_block_encode():
    for b in range(1, 5):
        for r in range(1, b + 2):
            for mem in itertools.combinations(range(b + 1), r):
                bc = block_encode(b, mem, BitStream.from_seed(b))
                if bc.decode(hit_open(bc.q, bc.V).n) != min(mem):
                    return False
    return True


def _check_avoid_set():
    p = BitStream.from_seed(5)
    g = avoid_set_gadget(p, [0, 1, 2])
    return g.sum_bound == Dyadic(7, 3) and g.measure_lower >= pow2(-3)


def _check_clopen():
    p = BitStream.from_word("0101101", fill=0)
    return hit_clopen(p, CylinderUnion.of("11")) == 3 and hit_clopen(p, CylinderUnion.of("0", "1")) == 0


def _check_choice():
    for members in ({3}, {0, 7, 20}, {5, 6}):
        I = OpenNatSet(tuple(sorted(members)))
        if max_by_index(I) != max(members):
            return False
        A = ClosedNatSet.complement_of(members, 21)
        U, _ = u_leq_a(A)
        if U.denoted() != set(range(min(members) + 1)):
            return False
    return True


@dataclass(frozen=True)
class OracleCheck:
    name: str
    run: Callable[[], bool]


CHECKS: tuple[OracleCheck, ...] = (
    OracleCheck("lil_margin(20) contains mpmath value", _check_margin_20),
    OracleCheck("lil_margin monotone for 3 <= n < 200", _check_margin_monotone),
    OracleCheck("lil_verify worked examples", _check_lil_examples),
    OracleCheck("lil_gadget worked examples", _check_lil_gadget),
    OracleCheck("auxlil bound for k <= 100", _check_auxlil),
    OracleCheck("birkhoff average and gadget examples", _check_birkhoff),
    OracleCheck("harmonic partial sums", _check_harmonic),
    OracleCheck("sum_apr with alternating tail", _check_sum_apr),
    OracleCheck("normal cdf and quantile vs mpmath", _check_cdf_quantile),
    OracleCheck("Phi recursion overlaps series", _check_phi_vs_series),
    OracleCheck("path grid of level 5 has 33 points", _check_path_grid),
    OracleCheck("force_sup certificate for K = 1", _check_force_sup),
    OracleCheck("dilution audit to depth 10", _check_audit),
    OracleCheck("hit_open vs brute force", _check_hit_open),
    OracleCheck("block coding decodes the minimum", _check_block_encode),
    OracleCheck("avoid-set measure certificate", _check_avoid_set),
    OracleCheck("clopen scan", _check_clopen),
    OracleCheck("choice equivalences vs brute force", _check_choice),
)


def run_checks(checks=CHECKS) -> list[dict]:
    rows = []
    for c in checks:
        try:
            ok, err = bool(c.run()), None
        except Exception as exc:  # a crashing check is a failing check
            ok, err = False, f"{type(exc).__name__}: {exc}"
        rows.append({"check": c.name, "pass": ok, "error": err})
    return rows
