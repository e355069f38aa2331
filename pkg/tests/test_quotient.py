import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from extraspecial.model import ExtraspecialModel
from extraspecial.poly import parse_poly
from extraspecial.quotient import GradedQuotient
from extraspecial.symplectic import pullback_substitution

from conftest import homogeneous_polys

M31 = ExtraspecialModel(p=3, n=1)
Q31 = GradedQuotient(M31)
M22 = ExtraspecialModel(p=2, n=2)
Q22 = GradedQuotient(M22)


def test_normal_form_example():
    f = parse_poly("y1^3*y2", M31.ambient, 3)
    assert str(Q31.normal_form(f)) == "y1*y2^3"


@pytest.mark.parametrize("model,quot", [(M31, Q31), (M22, Q22)])
def test_hilbert_matches_restriction_rank(model, quot):
    for d in range(9):
        assert quot.hilbert_dimension(d) == model.restriction_rank(d)


def test_hilbert_small_values():
    assert [Q31.hilbert_dimension(d) for d in range(7)] == [1, 2, 3, 4, 4, 4, 4]
    M21 = ExtraspecialModel(p=2, n=1)
    assert [GradedQuotient(M21).hilbert_dimension(d) for d in range(5)] == [1, 2, 2, 2, 2]


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 7).flatmap(lambda d: st.tuples(
    homogeneous_polys(M22.ambient, 2, d, 8), homogeneous_polys(M22.ambient, 2, d, 8))))
def test_normal_form_idempotent_and_linear(fg):
    f, g = fg
    nf = Q22.normal_form(f)
    assert Q22.normal_form(nf) == nf
    assert Q22.normal_form(f + g) == nf + Q22.normal_form(g)
    assert Q22.in_ideal(f - nf)


@pytest.mark.parametrize("model", [M31, M22, ExtraspecialModel(p=3, n=2)])
def test_relations_are_invariant(model):
    Q = GradedQuotient(model)
    for g in Q.group_generators():
        s = pullback_substitution(model.space, g)
        for z in Q.gens:
            assert Q.in_ideal(s(z))


@pytest.mark.parametrize("p,n,dmax", [(2, 1, 12), (3, 1, 12), (2, 2, 8)])
def test_presentation(p, n, dmax):
    rep = GradedQuotient(ExtraspecialModel(p=p, n=n)).presentation_check(dmax)
    assert rep.passed


def test_invariant_basis_small():
    rep = GradedQuotient(ExtraspecialModel(p=2, n=1)).verify_invariant_basis(8)
    assert rep.passed


def test_cache_round_trip(tmp_path):
    model = ExtraspecialModel(p=3, n=2)
    a = GradedQuotient(model, cache_dir=tmp_path)
    s = a.slice(8)
    files = list(tmp_path.glob("*.npz"))
    assert len(files) == 1
    b = GradedQuotient(model, cache_dir=tmp_path)
    t = b._load(8)
    assert t is not None
    assert np.array_equal(s.pivots, t.pivots) and np.array_equal(s.reduced, t.reduced)
    # a different generator set does not reuse the entry
    other = GradedQuotient(model, generators=[model.z_poly(0)], cache_dir=tmp_path)
    assert other._load(8) is None


def test_corrupt_cache_is_ignored(tmp_path):
    model = ExtraspecialModel(p=3, n=1)
    a = GradedQuotient(model, cache_dir=tmp_path)
    a.slice(5)
    for f in tmp_path.glob("*.npz"):
        f.write_bytes(b"garbage")
    b = GradedQuotient(model, cache_dir=tmp_path)
    assert b.slice(5).rank == a.slice(5).rank
