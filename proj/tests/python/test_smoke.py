from fractions import Fraction

import pytest

import cyclotrace as ct


def test_exact_examples():
    assert ct.rhs_trace(2, 12) == 24
    assert ct.rhs_trace(4, 12) == 72
    assert isinstance(ct.rhs_trace(2, 21), Fraction)
    assert ct.hurwitz(0) == Fraction(-1, 12)
    assert ct.hurwitz(3) == Fraction(1, 3)
    assert ct.hurwitz(4) == Fraction(1, 2)


def test_closed_formula_matches():
    for D in (12, 21, 24, 28, 33):
        assert ct.rhs_trace(2, D) == ct.closed_formula(2, D)


def test_numeric_methods():
    g = ct.lhs_geodesic(2, 12)
    assert g.method == "geodesic"
    assert abs(g.value - 24) < 25e-6
    assert g.error_estimate >= 0
    lat = ct.lhs_latticesum(4, 12)
    assert abs(lat.value - 72) < 73e-4
    assert "latticesum" in repr(lat)


def test_errors():
    assert not ct.hypothesis_check(5)
    assert ct.hypothesis_check(12)
    with pytest.raises(ct.HypothesisViolated):
        ct.lhs_geodesic(2, 5)
    with pytest.raises(ct.CyclotraceError):
        ct.rhs_trace(2, 9)
    with pytest.raises(ct.CyclotraceError):
        ct.eval_fkA(1j, 2)


def test_fkA_and_hyp2f1():
    v = ct.eval_fkA(2j, 2, tol=1e-8)
    assert abs(v.imag) < 1e-8 * abs(v)
    assert ct.hyp2f1(1, 1, 2, 0.5) == pytest.approx(2 * 0.6931471805599453, rel=1e-14)
