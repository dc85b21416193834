from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from cgl_quantizer.errors import CoefficientNotInL, NotDivisible, ParseError
from cgl_quantizer.scalars import (
    ONE,
    Q,
    Q_MINUS_ONE,
    QLaurent,
    QRational,
    divide_by_q_minus_one,
    eval_at_one,
    format_scalar,
    is_in_L,
    normalize,
    parse_scalar,
    q_power,
    to_laurent,
)
from oracles import q, sym_scalar

fractions = st.fractions(min_value=-5, max_value=5, max_denominator=4)
laurents = st.dictionaries(st.integers(-4, 4), fractions, max_size=4).map(QLaurent)
nonzero_laurents = laurents.filter(bool)


def test_constants():
    assert str(Q) == "q"
    assert Q_MINUS_ONE == Q - 1
    assert q_power(-2) * q_power(2) == ONE


def test_eval_at_one_examples():
    assert eval_at_one(QLaurent({2: -1, 0: 1}) / 2) == 0
    assert eval_at_one(q_power(-3)) == 1
    assert eval_at_one(QLaurent({1: 2, -1: 3})) == 5


def test_divide_by_q_minus_one_examples():
    a = QLaurent({0: Fraction(1, 2), 2: Fraction(-1, 2)})   # (1 - q^2)/2
    assert divide_by_q_minus_one(a) == QLaurent({0: Fraction(-1, 2), 1: Fraction(-1, 2)})
    assert divide_by_q_minus_one(q_power(-1) - 1) == -q_power(-1)
    with pytest.raises(NotDivisible):
        divide_by_q_minus_one(Q + 1)


@given(laurents)
def test_divide_by_q_minus_one_property(a):
    b = a - QLaurent(eval_at_one(a))
    c = divide_by_q_minus_one(b)
    assert c * Q_MINUS_ONE == b


@given(laurents, laurents)
def test_ring_ops_match_sympy(a, b):
    assert sp.expand(sym_scalar(a + b) - (sym_scalar(a) + sym_scalar(b))) == 0
    assert sp.expand(sym_scalar(a * b) - sym_scalar(a) * sym_scalar(b)) == 0
    assert sp.expand(sym_scalar(a - b) - (sym_scalar(a) - sym_scalar(b))) == 0


@given(laurents, nonzero_laurents)
def test_division_in_K_matches_sympy(a, b):
    r = QRational(a) / QRational(b)
    assert sp.simplify(sym_scalar(r) - sym_scalar(a) / sym_scalar(b)) == 0


@given(laurents, nonzero_laurents)
def test_exact_division_roundtrip(a, b):
    assert (a * b).exact_div(b) == a


@given(laurents, laurents)
def test_eval_at_one_is_a_ring_map(a, b):
    assert eval_at_one(a * b) == eval_at_one(a) * eval_at_one(b)
    assert eval_at_one(a + b) == eval_at_one(a) + eval_at_one(b)


def test_is_in_L():
    assert is_in_L(QRational(Q * Q - 1, Q - 1))
    assert not is_in_L(QRational(ONE, Q - 1))
    assert not is_in_L(QRational(ONE, Q + 1))
    assert is_in_L(QRational(ONE, Q * Q))                 # q^-2 is a unit
    assert is_in_L(QRational(ONE, QLaurent(2)))           # rational constants are in L


def test_qrational_normal_form():
    a = QRational(Q * Q - 1, 2 * Q - 2)
    assert a.den == ONE and a.num == (Q + 1) / 2
    b = QRational(ONE, 2 * Q + 2)
    assert b.den == Q + 1                               # monic, nonzero constant term
    assert QRational(Q, Q * Q + Q) == QRational(ONE, Q + 1)


def test_to_laurent_and_normalize():
    assert to_laurent(QRational(Q * Q - 1, Q - 1)) == Q + 1
    with pytest.raises(CoefficientNotInL):
        to_laurent(QRational(ONE, Q - 1))
    assert isinstance(normalize(QRational(Q * Q - 1, Q - 1)), QLaurent)
    assert isinstance(normalize(QRational(ONE, Q - 1)), QRational)


def test_negative_powers():
    assert Q ** -2 == q_power(-2)
    r = (Q + 1) ** -1
    assert isinstance(r, QRational) and r * (Q + 1) == QRational(ONE)


def test_format_examples():
    assert format_scalar(QLaurent({0: Fraction(1, 2), 2: Fraction(-1, 2)})) == "(1 - q^2)/2"
    assert format_scalar(q_power(-1)) == "q^-1"
    assert format_scalar(QLaurent({-1: 1, 0: -1})) == "q^-1 - 1"
    assert format_scalar(QLaurent()) == "0"
    assert format_scalar(QRational(ONE, Q + 1)) == "(1)/(1 + q)"


def test_parse_examples():
    assert parse_scalar("(1 - q^2)/2") == QLaurent({0: Fraction(1, 2), 2: Fraction(-1, 2)})
    assert parse_scalar("2 - q") == QLaurent({0: 2, 1: -1})
    assert parse_scalar("q^-1") == q_power(-1)
    assert isinstance(parse_scalar("1/(1+q)"), QRational)
    with pytest.raises(ParseError):
        parse_scalar("q^(1/2)")
    with pytest.raises(ParseError):
        parse_scalar("import os")
    with pytest.raises(ParseError):
        parse_scalar("p + 1")


@given(laurents)
def test_format_parse_roundtrip(a):
    assert parse_scalar(format_scalar(a)) == a


@given(laurents, nonzero_laurents)
def test_format_parse_roundtrip_K(a, b):
    r = normalize(QRational(a) / QRational(b))
    assert parse_scalar(format_scalar(r)) == r


def test_sympy_oracle_agrees_on_known_value():
    assert sp.expand(sym_scalar(QLaurent({0: Fraction(1, 2), 2: Fraction(-1, 2)})) - (1 - q ** 2) / 2) == 0
