import pytest

from extraspecial.model import MultiIndex
from extraspecial.poly import format_poly
from extraspecial.relations import (check_subgroup_restriction, model_for,
                                    quotient_for, solve_eta, solve_f,
                                    verify_gamma_identities, verify_kappa_recursion)


def test_f_rank_one():
    sol = solve_f(model_for(2, 1), quotient_for(2, 1))
    assert [format_poly(g) for g in sol.f] == ["y1 + y2"]
    sol = solve_f(model_for(3, 1), quotient_for(3, 1))
    assert [format_poly(g) for g in sol.f] == ["y1^6 + y1^4*y2^2 + y1^2*y2^4 + y2^6"]
    assert [format_poly(g) for g in sol.normal_forms] == ["y1^6 + 2*y1^2*y2^4 + y2^6"]
    assert sol.passed and sol.kernel_dim == 0


def test_f_rank_two_p2():
    sol = solve_f(model_for(2, 2), quotient_for(2, 2))
    assert sol.passed
    assert sol.kernel_dim == 1


def test_eta_rank_two_p2():
    sol = solve_eta(model_for(2, 2), quotient_for(2, 2))
    assert [format_poly(g) for g in sol.kernel_eta] == ["y1*y2 + y3*y4"]
    assert not sol.unique_exact and sol.unique_modulo_ideal
    assert sol.formula_level == "exact"


def test_kappa_recursion_p2_rank_two():
    m = model_for(2, 2)
    for r in range(2):
        assert verify_kappa_recursion(m, r).passed


def test_gamma_identities_small():
    assert verify_gamma_identities(model_for(2, 1)).passed
    assert verify_gamma_identities(model_for(2, 2)).passed


def test_additivity_p3():
    rep = verify_gamma_identities(model_for(3, 2), rs=[])
    assert rep.details["additivity"]


@pytest.mark.parametrize("r", [(1, 0), (0, 1), (1, 1)])
def test_subgroup_restriction(r):
    assert check_subgroup_restriction(model_for(3, 2), MultiIndex(r, 3)).passed


def test_subgroup_restriction_rejects_p2():
    with pytest.raises(ValueError):
        check_subgroup_restriction(model_for(2, 2), MultiIndex((1, 0), 2))
