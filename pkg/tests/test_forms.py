from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pfaffform.forms import (
    AmbientMismatch,
    FormExpression,
    PolyForm,
    forms_equal,
    permutation_sign_to_sorted,
    scale_ratio,
    wedge_sign,
)
from pfaffform.poly import MultiPoly, variables

N = 4


@st.composite
def forms(draw, max_terms=4):
    out = PolyForm(N)
    for _ in range(draw(st.integers(0, max_terms))):
        edges = draw(st.lists(st.integers(1, N), unique=True, max_size=3))
        exps = draw(st.tuples(*[st.integers(0, 2)] * N))
        c = draw(st.integers(-3, 3))
        out = out + PolyForm.term(tuple(edges), MultiPoly.monomial(N, exps, c))
    return out


def test_da_anticommutes():
    assert PolyForm.da(N, 1, 2) == -PolyForm.da(N, 2, 1)
    assert PolyForm.da(N, 1, 1).is_zero()
    assert PolyForm.da(N, 1) * PolyForm.da(N, 2) == PolyForm.da(N, 1, 2)
    assert PolyForm.da(N, 2) * PolyForm.da(N, 1) == -PolyForm.da(N, 1, 2)


def test_sign_helpers():
    assert wedge_sign(0b10, 0b01) == -1
    assert wedge_sign(0b01, 0b10) == 1
    assert permutation_sign_to_sorted((3, 1, 2)) == 1
    assert permutation_sign_to_sorted((2, 1)) == -1
    assert permutation_sign_to_sorted((2, 2)) == 0


def test_differential_of_polynomial():
    a1, a2, a3, a4 = variables(N)
    d = PolyForm.differential(a1 * a2 + a3)
    assert d == PolyForm.term((1,), a2) + PolyForm.term((2,), a1) + PolyForm.da(N, 3)


@settings(max_examples=60, deadline=None)
@given(forms())
def test_d_squared_is_zero(w):
    assert w.d().d().is_zero()


@settings(max_examples=60, deadline=None)
@given(forms(), forms(), forms())
def test_wedge_is_associative_and_bilinear(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@settings(max_examples=60, deadline=None)
@given(forms(), forms())
def test_leibniz_rule_for_homogeneous_forms(a, b):
    for w in (a, b):
        if len(w.degrees()) > 1:
            return
    p = max(a.degree(), 0)
    assert (a * b).d() == a.d() * b + (a * b.d()) * ((-1) ** p)


def test_one_forms_graded_commutativity():
    a1, a2, a3, a4 = variables(N)
    x = PolyForm.term((1,), a2) + PolyForm.da(N, 3)
    y = PolyForm.term((2,), a1)
    assert x * y == -(y * x)
    assert (x * x).is_zero()


def _psi():
    a1, a2, a3, a4 = variables(N)
    return a1 * a2 + a2 * a3 + a1 * a3


def test_form_expression_canonicalizes_content():
    psi = _psi()
    num = PolyForm.term((1, 2), MultiPoly.var(N, 3).scale(-6))
    f = FormExpression(Fraction(1, 2), -1, 3, psi, num)
    assert f.scalar == -3
    assert f.numerator == PolyForm.term((1, 2), MultiPoly.var(N, 3))


def test_equality_across_psi_powers():
    psi = _psi()
    num = PolyForm.term((1, 2), MultiPoly.var(N, 3))
    f = FormExpression(1, -1, 3, psi, num)
    g = FormExpression(1, -1, 5, psi, num * psi)
    assert forms_equal(f, g)
    assert f == g
    h = FormExpression(1, -1, 4, psi, num)
    assert not forms_equal(f, h)  # psi^(1/2) is not a polynomial


def test_scale_ratio():
    psi = _psi()
    num = PolyForm.term((1, 2), MultiPoly.var(N, 3)) + PolyForm.da(N, 2, 4)
    f = FormExpression(Fraction(1, 2), -1, 3, psi, num)
    assert scale_ratio(f.scale(-4), f) == (Fraction(-4), 0)
    assert scale_ratio(f.scale(3, pi_power=1), f) == (Fraction(3), 1)
    other = FormExpression(1, -1, 3, psi, PolyForm.da(N, 2, 4))
    assert scale_ratio(f, other) is None
    zero = FormExpression.zero(psi)
    assert scale_ratio(zero, f) == (Fraction(0), 0)
    assert scale_ratio(f, zero) is None


def test_different_pi_powers_are_unequal():
    psi = _psi()
    num = PolyForm.da(N, 1, 2)
    assert not forms_equal(FormExpression(1, -1, 3, psi, num), FormExpression(1, 0, 3, psi, num))
    assert forms_equal(FormExpression(0, -1, 3, psi, num), FormExpression.zero(psi))


def test_ambient_mismatch():
    psi = _psi()
    other = psi + 1
    with pytest.raises(AmbientMismatch):
        forms_equal(FormExpression.constant(psi, 1), FormExpression.constant(other, 1))


def test_exterior_derivative_of_quotient_is_closed():
    # d(1/sqrt(psi)) ^ d(1/sqrt(psi)) vanishes and d(d(.)) = 0
    psi = _psi()
    f = FormExpression(1, 0, 1, psi, PolyForm.scalar(N, 1))
    df = f.d()
    assert df.d().is_zero()
    assert df.wedge(df).is_zero()
    # d(psi^{-1/2}) = -1/2 dpsi / psi^{3/2}
    expect = FormExpression(Fraction(-1, 2), 0, 3, psi, PolyForm.differential(psi))
    assert df == expect


def test_grading_of_projective_form():
    psi = _psi()
    a1, a2, a3, a4 = variables(N)
    num = PolyForm.term((2, 3), a1) - PolyForm.term((1, 3), a2) + PolyForm.term((1, 2), a3)
    assert FormExpression(1, -1, 3, psi, num).grading() == 0
    assert FormExpression(1, -1, 1, psi, num).grading() != 0


def test_json_round_trip():
    psi = _psi()
    num = PolyForm.term((1, 2), MultiPoly.var(N, 3)) - PolyForm.da(N, 3, 4)
    f = FormExpression(Fraction(-1, 8), -1, 3, psi, num)
    assert FormExpression.from_json(f.to_json()) == f


def test_pullback_of_zero_is_zero():
    psi = _psi()
    images = [MultiPoly.var(5, 1) + MultiPoly.var(5, 2)] + [MultiPoly.var(5, k) for k in (3, 4, 5)]
    z = FormExpression.zero(psi).pullback(images)
    assert z.is_zero() and z.nvars == 5


def test_pullback_substitutes_differentials():
    psi = _psi()
    f = FormExpression(1, 0, 0, psi, PolyForm.da(N, 1))
    images = [MultiPoly.var(5, 1) + MultiPoly.var(5, 2)] + [MultiPoly.var(5, k) for k in (3, 4, 5)]
    g = f.pullback(images)
    assert g.numerator == PolyForm.da(5, 1) + PolyForm.da(5, 2)
