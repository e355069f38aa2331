import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from extraspecial.poly import (ContextMismatch, LinearSubstitution, MultiPoly,
                               ParseError, VariableContext, format_poly,
                               grevlex_key, monomial_basis, multiplication_matrix,
                               parse_poly, poly_arith, poly_from_json, poly_to_json,
                               substitute_linear)

from conftest import homogeneous_polys, polys

Y3 = VariableContext.ambient(3)


def test_grevlex_order_examples():
    # degree first, then the smaller last exponent wins
    basis = monomial_basis(3, 2)
    assert basis[0] == (2, 0, 0)
    assert basis[-1] == (0, 0, 2)
    assert grevlex_key((2, 0, 0)) > grevlex_key((1, 1, 0)) > grevlex_key((0, 2, 0))
    assert grevlex_key((0, 2, 0)) > grevlex_key((1, 0, 1))
    assert basis == sorted(basis, key=grevlex_key, reverse=True)


def test_basis_sizes():
    from math import comb
    for n in range(1, 5):
        for d in range(6):
            assert len(monomial_basis(n, d)) == comb(n + d - 1, d)


def test_format_and_parse_examples():
    f = parse_poly("y1^2*y2 + 2*y3 - y1", Y3, 3)
    assert format_poly(f) == "y1^2*y2 + 2*y1 + 2*y3"
    assert format_poly(MultiPoly.zero(Y3, 3)) == "0"
    assert parse_poly("5*y1", Y3, 3) == parse_poly("2*y1", Y3, 3)  # reduced silently
    assert parse_poly("-1", Y3, 5) == MultiPoly.constant(Y3, 5, 4)


def test_parse_errors_report_position():
    with pytest.raises(ParseError) as exc:
        parse_poly("y1 + * y2", Y3, 2)
    assert exc.value.position == 5
    with pytest.raises(ParseError) as exc:
        parse_poly("y1 + y4", Y3, 2)
    assert exc.value.position == 5


@settings(max_examples=200, deadline=None)
@given(st.sampled_from((2, 3, 5, 7)).flatmap(lambda p: polys(Y3, p)))
def test_parse_format_round_trip(f):
    assert parse_poly(format_poly(f), Y3, f.p) == f


@settings(max_examples=100, deadline=None)
@given(polys(Y3, 3))
def test_json_round_trip(f):
    doc = json.dumps(poly_to_json(f))
    assert poly_from_json(doc, 3) == f
    terms = json.loads(doc)["terms"]
    keys = [grevlex_key(t["m"]) for t in terms]
    assert keys == sorted(keys, reverse=True)


@settings(max_examples=100, deadline=None)
@given(polys(Y3, 5), polys(Y3, 5), polys(Y3, 5))
def test_ring_axioms(f, g, h):
    assert f * (g + h) == f * g + f * h
    assert (f * g) * h == f * (g * h)
    assert f - f == MultiPoly.zero(Y3, 5)
    assert poly_arith("mul", f, g) == g * f


@settings(max_examples=60, deadline=None)
@given(st.sampled_from((2, 3)).flatmap(lambda p: polys(Y3, p, max_terms=4, max_exp=2)),
       st.integers(0, 12))
def test_power_matches_repeated_product(f, e):
    out = MultiPoly.constant(Y3, f.p, 1)
    for _ in range(e):
        out = out * f
    assert f ** e == out


@settings(max_examples=60, deadline=None)
@given(st.sampled_from((2, 3, 5)).flatmap(lambda p: polys(Y3, p)))
def test_frobenius_is_pth_power(f):
    assert f.frobenius() == f ** f.p


def test_homogeneous_degree():
    f = parse_poly("y1^2 + y2*y3", Y3, 2)
    assert f.homogeneous_degree == 2
    assert parse_poly("y1^2 + y2", Y3, 2).homogeneous_degree is None
    assert MultiPoly.zero(Y3, 2).homogeneous_degree is None


def test_mixing_contexts_raises():
    a = MultiPoly.var(Y3, 2, 0)
    b = MultiPoly.var(VariableContext.local(2), 2, 0)
    with pytest.raises(ContextMismatch):
        a + b


@settings(max_examples=80, deadline=None)
@given(st.data())
def test_substitution_is_ring_homomorphism(data):
    p = data.draw(st.sampled_from((2, 3, 5)))
    tgt = VariableContext.local(2)
    M = np.array(data.draw(st.lists(st.lists(st.integers(0, p - 1), min_size=2, max_size=2),
                                    min_size=3, max_size=3)))
    s = LinearSubstitution(Y3, tgt, M, p)
    f = data.draw(polys(Y3, p, max_terms=4, max_exp=3))
    g = data.draw(polys(Y3, p, max_terms=4, max_exp=3))
    assert s(f * g) == s(f) * s(g)
    assert s(f + g) == s(f) + s(g)


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_dense_and_sparse_substitution_agree(data):
    from extraspecial.poly import _substitute_sparse
    p = 3
    d = data.draw(st.integers(3, 6))
    f = data.draw(homogeneous_polys(Y3, p, d, max_terms=12))
    M = np.array(data.draw(st.lists(st.lists(st.integers(0, 2), min_size=3, max_size=3),
                                    min_size=3, max_size=3)))
    s = LinearSubstitution(Y3, Y3, M, p)
    sparse = _substitute_sparse(list(f.terms.items()), s)
    assert substitute_linear(f, s) == sparse


def test_substitution_composition():
    p = 3
    a = LinearSubstitution(Y3, Y3, [[1, 1, 0], [0, 1, 0], [0, 2, 1]], p)
    b = LinearSubstitution(Y3, Y3, [[0, 1, 0], [1, 0, 0], [0, 0, 2]], p)
    f = parse_poly("y1^2*y3 + y2^3 + 2*y1*y2*y3", Y3, p)
    assert a.then(b)(f) == b(a(f))


def test_multiplication_matrix_rows():
    p = 2
    g = parse_poly("y1 + y2", VariableContext.ambient(2), p)
    M = multiplication_matrix(g, 1)
    basis1 = monomial_basis(2, 1)
    for row, m in zip(M, basis1):
        prod = g * MultiPoly(g.ctx, p, [(m, 1)])
        assert np.array_equal(row, prod.to_vector(2))


def test_random_round_trip_thousand(rng):
    ctx = VariableContext.ambient(4)
    for k in range(1000):
        p = (2, 3, 5, 7)[k % 4]
        items = [(tuple(int(x) for x in rng.integers(0, 5, 4)), int(rng.integers(0, p)))
                 for _ in range(int(rng.integers(0, 7)))]
        f = MultiPoly(ctx, p, items)
        assert parse_poly(format_poly(f), ctx, p) == f
