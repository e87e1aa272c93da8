from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from gamma237 import numerics as N
from gamma237.group import LAM, MU, ONE, TOWER, ZERO
from gamma237.numerics import (
    CertifiedInterval,
    Const,
    PrecisionExhausted,
    Sqrt,
    Surd,
    certified_sign,
    refine,
)


def lam_200():
    with mpmath.workprec(200):
        return 2 * mpmath.cos(mpmath.pi / 7)


def test_one_minus_one_is_zero():
    assert certified_sign(Const(1) - Const(1)) == 0


def test_lambda_minimal_polynomial_vanishes():
    # independent check at 200 bits before trusting the exact reduction
    with mpmath.workprec(200):
        x = lam_200()
        assert abs(x ** 3 - x ** 2 - 2 * x + 1) < mpmath.mpf(2) ** -100
    e = Const(LAM) ** 3 - Const(LAM) ** 2 - 2 * Const(LAM) + 1
    assert certified_sign(e) == 0
    assert (LAM ** 3 - LAM ** 2 - 2 * LAM + 1).is_zero()


def test_lambda_minus_1_8_positive():
    assert certified_sign(Const(LAM) - Fraction(18, 10)) == 1
    assert certified_sign(Fraction(18, 10) - Const(LAM)) == -1


def test_mu_is_sqrt_of_lambda_squared_minus_three():
    assert (MU * MU - LAM * LAM + 3).is_zero()
    assert certified_sign(Sqrt(Const(LAM) * Const(LAM) - 3) - Const(MU)) == 0
    with mpmath.workprec(200):
        assert abs(MU.interval(256).mid - Fraction(str(mpmath.sqrt(lam_200() ** 2 - 3)))) < Fraction(1, 10 ** 50)


def test_enclosure_of_lambda_matches_mpmath():
    iv = LAM.interval(128)
    assert iv.width < Fraction(1, 2 ** 100)
    with mpmath.workprec(200):
        ref = Fraction(str(lam_200()))
    assert iv.lo <= ref + Fraction(1, 10 ** 55) and ref - Fraction(1, 10 ** 55) <= iv.hi


def test_refine_contract():
    iv = CertifiedInterval(Fraction(180, 100), Fraction(181, 100), 16)
    r = refine(iv, 128)
    assert iv.contains(r) and r.precision_bits == 128
    q = CertifiedInterval.point(Fraction(1, 3))
    assert refine(q, 256).lo == Fraction(1, 3) == refine(q, 256).hi


def test_refine_with_value_narrows():
    iv64 = LAM.interval(64)
    r = refine(iv64, 128, LAM)
    assert iv64.contains(r)
    assert r.width < Fraction(1, 2 ** 100)


def test_refine_needs_more_bits():
    with pytest.raises(ValueError):
        refine(CertifiedInterval(1, 2, 64), 32)


def test_unresolvable_expression_raises(monkeypatch):
    class Blob(N.Expr):
        def _eval(self, bits):
            return CertifiedInterval(-1, 1, bits)

    monkeypatch.setattr(N.config, "max_bits", 128)
    with pytest.raises(PrecisionExhausted):
        certified_sign(Blob())


def test_division_and_inverse_exact():
    x = LAM * LAM - LAM + 2 * MU
    assert (x * x.inverse() - ONE).is_zero()
    assert (x / x - ONE).is_zero()


def test_surd_sign_and_mixed_radicands():
    D1, D2 = LAM + 2, 3 * ONE
    s1 = Surd(ONE, ONE, D1)         # 1 + sqrt(lam + 2)
    s2 = Surd(-2 * ONE, ONE, D2)     # -2 + sqrt(3) < 0
    assert s1.sign() == 1 and s2.sign() == -1
    prod = s1 * s2
    ref = (1 + mpmath.sqrt(float(LAM) + 2)) * (-2 + mpmath.sqrt(3))
    assert prod.sign() == -1
    assert abs(float(prod) - float(ref)) < 1e-12
    # sqrt(3)*sqrt(3) - 3 vanishes across the nesting
    r3 = Surd(ZERO, ONE, D2)
    assert (r3 * r3 - 3).sign() == 0


tower_coords = st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=9), min_size=6, max_size=6)


@settings(max_examples=60, deadline=None)
@given(tower_coords, st.integers(min_value=64, max_value=512))
def test_monotone_refinement(coords, bits):
    x = TOWER.element(coords)
    a, b = x.interval(bits), x.interval(2 * bits)
    assert a.contains(b)


@settings(max_examples=100, deadline=None)
@given(tower_coords)
def test_exact_and_interval_agree(coords):
    x = TOWER.element(coords)
    s = x.sign()
    for bits in (64, 256, 1024):
        iv = x.interval(bits)
        if s == 0:
            assert iv.sign() in (0, None)
        else:
            assert iv.contains(CertifiedInterval.point(iv.mid))
            assert iv.sign() in (s, None)
    if s != 0:
        assert x.interval(1024).sign() == s


@settings(max_examples=40, deadline=None)
@given(tower_coords, tower_coords)
def test_field_axioms(c1, c2):
    x, y = TOWER.element(c1), TOWER.element(c2)
    assert x * y == y * x
    assert (x + y) * x == x * x + y * x
    if not y.is_zero():
        assert (x / y) * y == x


def test_memoised_expression_is_stable():
    e = Sqrt(Const(LAM) + 1) * Const(MU)
    assert e.interval(256) is e.interval(256)
    assert certified_sign(e) == 1


def test_tower_descriptor():
    steps = TOWER.describe()
    assert [d["symbol"] for d in steps] == ["lam", "mu"]
    assert steps[0]["minimal_polynomial"] == "lam^3 - lam^2 - 2*lam + 1 = 0"
    assert steps[1]["minimal_polynomial"] == "mu^2 - lam^2 + 3 = 0"
    assert steps[1]["interval"] == ["49/100", "1/2"]
