"""Catalogue forms: evaluation, exact derivatives, limits, serialization."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heatsym import symfun
from heatsym.errors import DomainError, SpecFileError, UnsupportedFormError
from heatsym.symfun import (
    Affine,
    Const,
    Exp,
    Mobius,
    Power,
    RandomSmooth,
    Zero,
    derivative,
    evaluate,
    format_form,
    limit_at_pos_infinity,
    parse_form,
)


def test_eval_basics():
    assert evaluate(Power(1.0, -2.0), 2.0) == 0.25
    assert evaluate(Const(-1.0), 7.0) == -1.0
    assert evaluate(Power(1.0, -0.5), 4.0) == 0.5
    assert evaluate(Zero(), 3.3) == 0.0
    assert evaluate(Affine(2.0, 1.0), 3.0) == 7.0
    assert evaluate(Mobius(0.5), 1.0) == 2.0
    assert evaluate(Exp(2.0, 0.0), 5.0) == 2.0


def test_eval_domain_errors():
    with pytest.raises(DomainError):
        evaluate(Power(1.0, 0.5), -1.0)
    with pytest.raises(DomainError):
        evaluate(Power(1.0, -3.0), 0.0)
    with pytest.raises(DomainError):
        evaluate(Mobius(0.5), 2.0)
    # array inputs are checked too
    with pytest.raises(DomainError):
        evaluate(Power(1.0, -1.5), np.array([1.0, -2.0]))


def test_derivative_closed_forms():
    k = -1.5
    df = derivative(Power(1.0, k))
    assert isinstance(df, Power) and df.c == k and df.a == k - 1.0
    assert isinstance(derivative(Const(3.0)), Zero)
    dq = derivative(Exp(-2.0, 1.0))
    assert isinstance(dq, Exp) and dq.c == -2.0 and dq.lam == 1.0
    da = derivative(Affine(4.0, 1.0))
    assert isinstance(da, Const) and da.c == 4.0


CATALOGUE_SAMPLES = [
    (Const(2.5), 1.7),
    (Power(1.0, -1.5), 2.3),
    (Power(-2.0, 3.0), 1.1),
    (Exp(1.5, -0.7), 0.9),
    (Affine(0.3, -2.0), 4.0),
    (Mobius(0.5), 0.8),
    (Mobius(-0.4), 3.0),
    (RandomSmooth(42), 1.3),
    (RandomSmooth(7, 0.1), 6.2),
]


@pytest.mark.parametrize("f,s", CATALOGUE_SAMPLES)
def test_derivative_matches_central_difference(f, s):
    h = 1e-5
    fd = (evaluate(f, s + h) - evaluate(f, s - h)) / (2.0 * h)
    exact = evaluate(derivative(f), s)
    assert fd == pytest.approx(exact, rel=1e-6, abs=1e-12)


@pytest.mark.parametrize("f,s", CATALOGUE_SAMPLES)
def test_second_derivative_matches_central_difference(f, s):
    h = 1e-4
    fd = (f.d1(s + h) - f.d1(s - h)) / (2.0 * h)
    assert fd == pytest.approx(f.d2(s), rel=1e-5, abs=1e-10)


def test_limits():
    assert limit_at_pos_infinity(Affine(math.exp(0.5), 0.0)) == math.inf
    assert limit_at_pos_infinity(Mobius(0.5)) == -2.0
    assert limit_at_pos_infinity(Const(3.25)) == 3.25
    assert limit_at_pos_infinity(Power(1.0, -0.5)) == 0.0
    assert limit_at_pos_infinity(Power(2.0, 1.5)) == math.inf
    assert limit_at_pos_infinity(Exp(-1.0, 2.0)) == -math.inf
    assert limit_at_pos_infinity(Mobius(0.0)) == math.inf
    with pytest.raises(UnsupportedFormError):
        limit_at_pos_infinity(RandomSmooth(1))


@given(st.floats(min_value=1e-3, max_value=1e3) | st.floats(min_value=-1e3, max_value=-1e-3))
def test_mobius_limit_property(eps):
    assert limit_at_pos_infinity(Mobius(eps)) == -1.0 / eps


def test_randsmooth_reproducible_and_positive():
    f = RandomSmooth(42, 0.5)
    g = RandomSmooth(42, 0.5)
    s = np.linspace(-5.0, 20.0, 400)
    assert np.array_equal(f.value(s), g.value(s))
    assert np.all(f.value(s) >= 0.5)
    other = RandomSmooth(43, 0.5)
    assert not np.array_equal(f.value(s), other.value(s))
    with pytest.raises(DomainError):
        RandomSmooth(1, 0.0)


def test_randsmooth_derivative_object():
    f = RandomSmooth(11, 0.3)
    df = derivative(f)
    s = 2.7
    h = 1e-5
    fd = (f.value(s + h) - f.value(s - h)) / (2.0 * h)
    assert df.value(s) == pytest.approx(fd, rel=1e-6)
    ddf = derivative(df)
    fd2 = (df.value(s + h) - df.value(s - h)) / (2.0 * h)
    assert ddf.value(s) == pytest.approx(fd2, rel=1e-6)
    with pytest.raises(UnsupportedFormError):
        derivative(ddf)


def test_mobius_derivative_object():
    f = Mobius(0.5)
    df = derivative(f)
    assert df.value(0.0) == 1.0
    assert df.value(1.0) == pytest.approx(4.0)  # 1/(1-0.5)^2


FORM_TEXTS = [
    "zero",
    "const(0)",
    "const(-1)",
    "power(1,-1.5)",
    "power(0.25,3)",
    "exp(-1,1)",
    "affine(2,-0.5)",
    "mobius(0.5)",
    "randsmooth(42,0.5)",
]


@pytest.mark.parametrize("text", FORM_TEXTS)
def test_parse_print_round_trip(text):
    f = parse_form(text)
    assert format_form(f) == text
    assert parse_form(format_form(f)) == f


@given(
    st.floats(allow_nan=False, allow_infinity=False, width=64, min_value=-1e12, max_value=1e12),
    st.floats(allow_nan=False, allow_infinity=False, width=64, min_value=-20, max_value=20),
)
@settings(max_examples=100)
def test_round_trip_is_value_exact(c, a):
    f = Power(c, a)
    assert parse_form(format_form(f)) == f


def test_parse_errors():
    with pytest.raises(SpecFileError):
        parse_form("power(1)")
    with pytest.raises(SpecFileError):
        parse_form("wiggle(3)")
    with pytest.raises(SpecFileError):
        parse_form("const(a)")
    with pytest.raises(SpecFileError):
        parse_form("randsmooth(1.5,0.5)")


def test_randsmooth_default_floor():
    assert parse_form("randsmooth(9)") == RandomSmooth(9, symfun.DEFAULT_FLOOR)
