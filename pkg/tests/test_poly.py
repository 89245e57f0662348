import pytest
from gmpy2 import mpq

from diracreduce.exactlin import InvalidInput
from diracreduce.poly import Poly, parse_poly


def x(i, n):
    return Poly.variable(i, n)


def test_arithmetic_and_canonical_order():
    p = x(0, 2) * x(1, 2) + Poly.const(mpq(1, 2), 2)
    q = Poly.const(mpq(1, 2), 2) + x(1, 2) * x(0, 2)
    assert p == q
    assert str(p) == "1 x1 x2 + 1/2"


def test_products_are_exact():
    p = x(0, 1) + Poly.const(mpq(1, 3), 1)
    q = p * p
    assert q == x(0, 1) ** 2 + mpq(2, 3) * x(0, 1) + Poly.const(mpq(1, 9), 1)


def test_diff_and_eval():
    p = x(0, 2) ** 2 * x(1, 2) + 3 * x(0, 2)
    assert p.diff(0) == 2 * x(0, 2) * x(1, 2) + Poly.const(3, 2)
    assert p.diff(1) == x(0, 2) ** 2
    assert p.eval((mpq(1, 2), 2)) == mpq(1, 2) + mpq(3, 2)


def test_compose():
    p = x(0, 2) * x(1, 2)
    g = [x(0, 1) + Poly.const(1, 1), x(0, 1) ** 2]
    assert p.compose(g) == (x(0, 1) + 1) * x(0, 1) ** 2


def test_string_round_trip():
    samples = ["0", "3/2", "1 x1 x2 + 1/2", "2 x1^3 + -1/2 x2", "1 x2^2"]
    for s in samples:
        p = parse_poly(s, 2)
        assert parse_poly(str(p), 2) == p
    assert str(parse_poly("x1 + x1", 2)) == "2 x1"


def test_parse_rejects_garbage():
    with pytest.raises(InvalidInput):
        parse_poly("1 y3", 2)
    with pytest.raises(InvalidInput):
        parse_poly("1 x5", 2)
    with pytest.raises(InvalidInput):
        parse_poly("oops", 2)


def test_total_degree():
    assert Poly.zero(3).total_degree() == 0
    assert (x(0, 3) ** 2 * x(2, 3)).total_degree() == 3
