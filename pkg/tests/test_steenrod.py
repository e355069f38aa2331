import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from extraspecial.poly import MultiPoly, VariableContext, parse_poly
from extraspecial.steenrod import (norm_dickson_check, norm_of_restriction,
                                   steenrod_operation, total_operation)

from conftest import homogeneous_polys

Y2 = VariableContext.ambient(2)


def test_sq1_of_product():
    f = parse_poly("y1*y2", Y2, 2)
    assert steenrod_operation(1, f) == parse_poly("y1^2*y2 + y1*y2^2", Y2, 2)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from((2, 3, 5)).flatmap(
    lambda p: st.integers(1, 4).flatmap(lambda d: homogeneous_polys(Y2, p, d))))
def test_unit_top_and_vanishing(f):
    d = f.homogeneous_degree
    assert steenrod_operation(0, f) == f
    assert steenrod_operation(d, f) == f ** f.p
    assert steenrod_operation(d + 1, f).is_zero()


@settings(max_examples=50, deadline=None)
@given(st.sampled_from((2, 3)).flatmap(lambda p: st.tuples(
    st.integers(1, 3).flatmap(lambda d: homogeneous_polys(Y2, p, d)),
    st.integers(1, 3).flatmap(lambda d: homogeneous_polys(Y2, p, d)))))
def test_cartan_formula(fg):
    f, g = fg
    assert total_operation(f * g) == total_operation(f) * total_operation(g)
    for k in range(4):
        rhs = MultiPoly.zero(Y2, f.p)
        for i in range(k + 1):
            rhs = rhs + steenrod_operation(i, f) * steenrod_operation(k - i, g)
        assert steenrod_operation(k, f * g) == rhs


@pytest.mark.parametrize("p", [2, 3, 5])
def test_norm_of_generator(p):
    ctx = VariableContext.local(1)
    t = MultiPoly.var(ctx, p, 0)
    N = norm_of_restriction(t)
    v = MultiPoly.var(N.ctx, p, N.ctx.names[-1])
    tt = t.embed(N.ctx)
    assert N == tt ** p - v ** (p - 1) * tt


def test_norm_p2_example():
    ctx = VariableContext.local(1)
    t = MultiPoly.var(ctx, 2, 0)
    assert str(norm_of_restriction(t)) == "t1^2 + t1*u1"


def test_literal_normalization_differs_at_five():
    ctx = VariableContext.local(1)
    t = MultiPoly.var(ctx, 5, 0)
    assert str(norm_of_restriction(t, normalization="literal")) == "3*t1^5 + 2*t1*v1^4"


@settings(max_examples=30, deadline=None)
@given(st.sampled_from((2, 3)).flatmap(lambda p: st.tuples(
    st.integers(1, 2).flatmap(lambda d: homogeneous_polys(Y2, p, d)),
    st.integers(1, 2).flatmap(lambda d: homogeneous_polys(Y2, p, d)))))
def test_norm_is_multiplicative(fg):
    f, g = fg
    assert norm_of_restriction(f * g) == norm_of_restriction(f) * norm_of_restriction(g)


@pytest.mark.parametrize("p,n,r", [(2, 1, 0), (2, 2, 0), (2, 2, 1), (3, 1, 0), (2, 3, 1), (3, 2, 0), (5, 1, 0)])
def test_norm_dickson(p, n, r):
    rep = norm_dickson_check(p, n, r)
    assert rep.holds, str(rep.discrepancy)


def test_norm_dickson_independent_of_lift():
    ctx = VariableContext.local(3)
    shift = parse_poly("t1 + t2", ctx, 2)
    assert norm_dickson_check(2, 2, 1, lift_shift=shift).holds
