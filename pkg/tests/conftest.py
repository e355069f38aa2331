import numpy as np
import pytest
from hypothesis import assume
from hypothesis import strategies as st

from extraspecial.poly import MultiPoly, VariableContext

PRIMES = (2, 3, 5, 7)


@st.composite
def polys(draw, ctx: VariableContext, p: int, max_terms: int = 6, max_exp: int = 4):
    n = ctx.count
    mono = st.tuples(*[st.integers(0, max_exp)] * n)
    items = draw(st.lists(st.tuples(mono, st.integers(0, p - 1)), max_size=max_terms))
    return MultiPoly(ctx, p, items)


@st.composite
def homogeneous_polys(draw, ctx: VariableContext, p: int, d: int, max_terms: int = 5):
    from extraspecial.poly import monomial_basis
    basis = monomial_basis(ctx, d)
    picks = draw(st.lists(st.tuples(st.sampled_from(basis), st.integers(1, p - 1)),
                          min_size=1, max_size=max_terms))
    f = MultiPoly(ctx, p, picks)
    assume(not f.is_zero())
    return f


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
