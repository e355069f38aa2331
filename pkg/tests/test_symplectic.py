import numpy as np
import pytest

from extraspecial.symplectic import (Lagrangian, SymplecticSpace, act_on_lagrangian,
                                     enumerate_lagrangians, group_order,
                                     isometry_generators, preserves_form,
                                     pullback_substitution, sp_generators,
                                     symplectic_group_order, transvection,
                                     validate_symplectic)


@pytest.mark.parametrize("p,n,count", [(2, 1, 2), (2, 2, 6), (2, 3, 30), (3, 1, 4),
                                       (3, 2, 40), (5, 1, 6), (5, 2, 156), (7, 1, 8)])
def test_counts(p, n, count):
    space = SymplecticSpace(n, p)
    Ls = enumerate_lagrangians(space)
    assert len(Ls) == count == space.expected_lagrangian_count()
    assert len(set(Ls)) == count
    assert all(validate_symplectic(space, L) for L in Ls)


def test_p2_rank1_lines():
    Ls = enumerate_lagrangians(SymplecticSpace(1, 2))
    assert [L.to_json() for L in Ls] == [[[0, 1]], [[1, 0]]]


def test_validate_examples():
    space = SymplecticSpace(2, 2)
    e = np.eye(4, dtype=int)
    assert validate_symplectic(space, e[[0, 2]])
    assert not validate_symplectic(space, e[[0, 1]])
    assert validate_symplectic(space, transvection(space, e[0]))
    with pytest.raises(ValueError):
        validate_symplectic(space, np.zeros((2, 3), dtype=int))


@pytest.mark.parametrize("p,n", [(2, 1), (3, 1), (2, 2), (3, 2)])
def test_generators_give_full_group(p, n):
    space = SymplecticSpace(n, p)
    gens = sp_generators(space)
    assert all(preserves_form(space, g) for g in gens)
    assert group_order(gens, p) == symplectic_group_order(n, p)


@pytest.mark.parametrize("n,order", [(1, 2), (2, 72)])
def test_orthogonal_group_orders(n, order):
    space = SymplecticSpace(n, 2)
    assert group_order(isometry_generators(space), 2) == order


@pytest.mark.parametrize("p,n", [(2, 2), (3, 2), (2, 3)])
def test_group_permutes_lagrangians(p, n):
    space = SymplecticSpace(n, p)
    Ls = set(enumerate_lagrangians(space))
    for g in isometry_generators(space):
        assert {act_on_lagrangian(g, L) for L in Ls} == Ls


def test_pullback_identity_and_singular():
    space = SymplecticSpace(2, 3)
    s = pullback_substitution(space, np.eye(4, dtype=int))
    assert np.array_equal(s.matrix, np.eye(4))
    with pytest.raises(ValueError):
        pullback_substitution(space, np.zeros((4, 4), dtype=int))


def test_restriction_kills_isotropic_form():
    # the restriction of sum y_{2i-1} y_{2i}^p - y_{2i-1}^p y_{2i} vanishes on each L
    from extraspecial.model import ExtraspecialModel
    M = ExtraspecialModel(p=3, n=2)
    z0 = M.z_poly(0)
    for L in M.lagrangians:
        assert L.restriction()(z0).is_zero()


def test_from_rows_rejects_non_isotropic():
    with pytest.raises(ValueError):
        Lagrangian.from_rows(SymplecticSpace(2, 3), [[1, 0, 0, 0], [0, 1, 0, 0]])
    with pytest.raises(ValueError):
        Lagrangian.from_rows(SymplecticSpace(1, 2), [[1, 1]])
