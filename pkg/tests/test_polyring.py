from math import comb

import pytest
from hypothesis import given, strategies as st

from lyucalc.errors import InhomogeneousError, ParseError, RingMismatch
from lyucalc.polyring import (FreeModule, ModMatrix, Poly, RingSpec, frobenius_poly,
                              graded_piece_basis, monomials_of_degree, twist)


def test_arithmetic_examples():
    R = RingSpec(3, ["x0", "x1"])
    a, b = R.parse("x0 + x1"), R.parse("x0 - x1")
    assert a * b == R.parse("x0^2 - x1^2")
    assert (a * 0).is_zero()
    R2 = RingSpec(2, ["x0", "x1"])
    assert R2.parse("x0 + x1") ** 2 == R2.parse("x0^2 + x1^2")


def test_ring_mismatch():
    with pytest.raises(RingMismatch):
        RingSpec(3, ["x"]).parse("x") + RingSpec(5, ["x"]).parse("x")


def test_frobenius_examples():
    R = RingSpec(2, ["x0", "x1"])
    assert frobenius_poly(R.parse("x0 + x1")) == R.parse("x0^2 + x1^2")
    R5 = RingSpec(5, ["x", "y", "z"])
    assert frobenius_poly(R5.parse("3")) == R5.parse("3")
    f = R5.parse("y^2*z - x^3 - z^3")
    assert frobenius_poly(f).degree() == 15


def test_parse_errors_have_columns():
    R = RingSpec(5, ["x", "y"])
    with pytest.raises(ParseError) as e:
        R.parse("x^2 + 3*z", line=4)
    assert e.value.line == 4 and e.value.column == 9
    with pytest.raises(ParseError):
        R.parse("x^")
    with pytest.raises(ParseError):
        R.parse("x y")
    assert R.parse("-x*y + 7") == R.parse("4*x*y + 2")


def test_degree_and_homogeneity():
    R = RingSpec(5, ["x", "y"])
    assert R.parse("x*y + y^2").degree() == 2
    assert R.zero().degree() is None
    with pytest.raises(InhomogeneousError):
        R.parse("x + y^2").degree()


def test_graded_piece_basis_examples():
    F = FreeModule((0, 1))
    assert graded_piece_basis(F, 1, 2) == [(0, (1, 0)), (0, (0, 1)), (1, (0, 0))]
    assert graded_piece_basis(FreeModule((2,)), 0, 2) == []
    assert len(graded_piece_basis(FreeModule((0,)), 2, 3)) == 6


def test_twist_examples():
    N = 3
    F = twist(FreeModule((0,)), N)
    assert len(graded_piece_basis(F, -N, 3)) == 1
    G = FreeModule((1, -2, 5))
    assert twist(G, 0) == G
    assert twist(twist(G, 4), -4) == G


def test_modmatrix_rejects_inhomogeneous():
    R = RingSpec(3, ["x0", "x1"])
    with pytest.raises(InhomogeneousError):
        ModMatrix.from_entries(R, FreeModule((0,)), FreeModule((1,)), [["x0^2"]])
    A = ModMatrix.from_entries(R, FreeModule((0,)), FreeModule((1, 1)), [["x0", "x1"]])
    B = ModMatrix.from_entries(R, FreeModule((1, 1)), FreeModule((2,)), [["x1"], ["-x0"]])
    assert (A @ B).is_zero()
    assert (A @ B).dom == FreeModule((2,))
    assert A.transpose(2).cod == FreeModule((1, 1))
    assert A.transpose(2).transpose(2) == A


@st.composite
def polys(draw, ring):
    terms = draw(st.lists(st.tuples(st.tuples(*[st.integers(0, 3)] * ring.nvars),
                                    st.integers(0, ring.p - 1)), max_size=5))
    return Poly(ring, dict(terms))


R5 = RingSpec(5, ["a", "b", "c"])


@given(polys(R5), polys(R5))
def test_frobenius_is_ring_map(f, g):
    assert (f * g).frobenius() == f.frobenius() * g.frobenius()
    assert (f + g).frobenius() == f.frobenius() + g.frobenius()


@given(st.integers(0, 8), st.integers(1, 4))
def test_dim_R_d(d, nv):
    assert len(monomials_of_degree(nv, d)) == comb(d + nv - 1, nv - 1)


@given(polys(R5), polys(R5), polys(R5))
def test_multiplication_associative_distributive(f, g, h):
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
