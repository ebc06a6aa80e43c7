"""Poincare algebra and coefficient-class tests.

The bracket table is checked against an independent sympy realization of
the generators as first-order differential operators, and the structure
constants against their exact invariants.
"""

from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from vkg.algebra import PPoly, QPoly, bracket, generators, structure_constants


def sympy_operator(g, syms):
    """Realize a generator as a sympy differential operator on (t, x)."""
    t, xs = syms

    def op(expr):
        if str(g) == "d_t":
            return sp.diff(expr, t)
        if str(g).startswith("d_x"):
            return sp.diff(expr, xs[g.i - 1])
        if str(g).startswith("boost"):
            return t * sp.diff(expr, xs[g.i - 1]) + xs[g.i - 1] * sp.diff(expr, t)
        # rotation
        return (xs[g.i - 1] * sp.diff(expr, xs[g.j - 1])
                - xs[g.j - 1] * sp.diff(expr, xs[g.i - 1]))

    return op


@pytest.mark.parametrize("n", [1, 2, 3])
def test_bracket_matches_sympy_commutator(n):
    t = sp.Symbol("t")
    xs = sp.symbols(f"x1:{n + 1}")
    syms = (t, xs)
    probe = sp.Function("w")(t, *xs)
    gens = generators(n)
    for a in gens:
        for b in gens:
            oa, ob = sympy_operator(a, syms), sympy_operator(b, syms)
            direct = sp.expand(oa(ob(probe)) - ob(oa(probe)))
            table = sum((c * sympy_operator(g, syms)(probe)
                         for c, g in bracket(a, b)), sp.S.Zero)
            assert sp.expand(direct - table) == 0, (a, b)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_structure_constants_antisymmetric_and_jacobi(n):
    c = structure_constants(n)
    assert np.array_equal(c, -np.swapaxes(c, 0, 1))
    jac = (np.einsum("abd,dce->abce", c, c)
           + np.einsum("bcd,dae->abce", c, c)
           + np.einsum("cad,dbe->abce", c, c))
    assert not np.any(jac)


def test_bracket_closure():
    for n in (1, 2):
        gens = generators(n)
        for a in gens:
            for b in gens:
                for coeff, g in bracket(a, b):
                    assert g in gens
                    assert coeff in (-1, 1)


# ---------------------------------------------------------------------------
# coefficient classes
# ---------------------------------------------------------------------------

def ppolys(n):
    degs = st.tuples(*[st.integers(0, 2)] * n)
    coeffs = st.fractions(min_value=-4, max_value=4)
    return st.dictionaries(degs, coeffs, max_size=4).map(
        lambda d: PPoly(n, d))


@settings(max_examples=50, deadline=None)
@given(p=ppolys(2), q=ppolys(2))
def test_ppoly_boost_derive_product_rule(p, q):
    lhs = (p * q).boost_derive(1)
    rhs = p.boost_derive(1) * q + p * q.boost_derive(1)
    assert lhs == rhs


@settings(max_examples=50, deadline=None)
@given(p=ppolys(2), q=ppolys(2))
def test_ppoly_ring_laws(p, q):
    assert p * q == q * p
    assert (p + q) * p == p * p + q * p
    assert p - p == PPoly(2)


@settings(max_examples=40, deadline=None)
@given(p=ppolys(2), vx=st.floats(-10, 10), vy=st.floats(-10, 10))
def test_ppoly_evaluation_bounded_by_coeff_norm(p, vx, vy):
    val = p.evaluate(np.array([vx, vy]))
    assert abs(val) <= float(p.coeff_norm()) + 1e-12


@settings(max_examples=40, deadline=None)
@given(p=ppolys(1), v=st.floats(-5, 5))
def test_ppoly_boost_derive_is_velocity_derivative(p, v):
    """v^0 d_v of the evaluated polynomial, by central differences."""
    h = 1e-5
    v0 = np.sqrt(1 + v * v)
    fd = v0 * (p.evaluate(np.array([v + h])) - p.evaluate(np.array([v - h]))) / (2 * h)
    exact = p.boost_derive(1).evaluate(np.array([v]))
    scale = max(1.0, float(p.coeff_norm()))
    assert abs(fd - exact) < 1e-6 * scale


def test_qpoly_lifted_translations_pick_affine_parts():
    n = 2
    p0, pt, p1, p2 = (PPoly.u(n, 1), PPoly.constant(n, 3),
                      PPoly.u(n, 2), PPoly.constant(n, Fraction(1, 2)))
    q = QPoly(n, p0=p0, pt=pt, px=[p1, p2])
    gens = {str(g): g for g in generators(n)}
    assert q.apply_lifted(gens["d_t"]) == QPoly.from_ppoly(pt)
    assert q.apply_lifted(gens["d_x1"]) == QPoly.from_ppoly(p1)
    assert q.apply_lifted(gens["d_x2"]) == QPoly.from_ppoly(p2)


def test_qpoly_evaluate_affine():
    n = 1
    q = QPoly(n, p0=PPoly.constant(n, 2), pt=PPoly.u(n, 1),
              px=[PPoly.constant(n, -1)])
    v = np.array([[0.6]])
    u = 0.6 / np.sqrt(1.36)
    out = q.evaluate(np.array([3.0]), np.array([[0.25]]), v)
    assert np.allclose(out, 2 + 3 * u - 0.25)
