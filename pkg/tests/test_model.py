import numpy as np
import pytest

from extraspecial.config import GlobalConfig
from extraspecial.model import (ExtraspecialModel, MultiIndex,
                                decide_membership_combinatorial, enumerate_R)
from extraspecial.poly import format_poly


def test_multiindex_degrees():
    assert MultiIndex((1, 0), 3).ydeg == 8
    assert MultiIndex((0, 1), 3).ydeg == 6
    assert MultiIndex((1,), 3).ydeg == 2
    assert MultiIndex.parse("(2, 1)", 3, 2).r == (2, 1)
    with pytest.raises(ValueError):
        MultiIndex.parse("1,2,3", 3, 2)


@pytest.mark.parametrize("r,expected", [((1, 0), False), ((0, 1), False), ((2, 0), True),
                                        ((0, 3), True), ((1, 1), False), ((2, 1), True),
                                        ((0, 0), True)])
def test_criterion(r, expected):
    assert decide_membership_combinatorial(MultiIndex(r, 3)) is expected


def test_enumerate_R():
    Rs = enumerate_R(3, 1, 16)
    assert [R.r for R in Rs] == [(s,) for s in range(9)]
    Rs = enumerate_R(3, 2, 30)
    assert all(R.ydeg <= 30 for R in Rs)
    assert {(1, 0), (0, 1), (2, 0), (0, 3), (1, 1), (2, 1)} <= {R.r for R in Rs}
    assert all(R.lies_in_T for R in enumerate_R(3, 2, 30, "prime"))
    assert [R.r for R in enumerate_R(3, 1, 12, "free")] == [(3,)]


@pytest.mark.parametrize("p,n", [(2, 1), (2, 2), (3, 1), (3, 2)])
def test_relations_vanish(p, n):
    M = ExtraspecialModel(p=p, n=n)
    for r in range(n):
        assert M.inflate(M.z_poly(r)).is_zero()
    assert M.inflate(M.z_poly(n)).is_zero()  # z^(n) lies in the ideal


def test_membership_rank_one_p3():
    M = ExtraspecialModel(p=3, n=1)
    tau = M.char_class_product((1,))
    res = M.membership(tau)
    assert not res.found
    assert M.check_certificate(tau, res)
    res2 = M.membership(M.char_class_product((2,)))
    assert res2.found
    assert format_poly(res2.poly) == "y1^4 + 2*y1^2*y2^2 + y2^4"
    assert M.inflate(res2.poly) == M.char_class_product((2,))


def test_membership_p2_generator():
    M = ExtraspecialModel(p=2, n=1)
    res = M.membership(M.char_class(0))
    assert format_poly(res.poly) == "y1 + y2"


@pytest.mark.parametrize("p,n,dmax", [(3, 1, 16), (2, 2, 8)])
def test_witnesses_restrict_correctly(p, n, dmax):
    M = ExtraspecialModel(p=p, n=n)
    for R in enumerate_R(p, n, dmax):
        tau = M.char_class_product(R)
        res = M.membership(tau)
        if res.found:
            assert M.inflate(res.poly) == tau
        else:
            assert M.check_certificate(tau, res)
        assert res.found == R.lies_in_T


def test_threads_do_not_change_results():
    a = ExtraspecialModel(GlobalConfig(p=3, n=2, threads=1)).restriction_matrix(6)
    b = ExtraspecialModel(GlobalConfig(p=3, n=2, threads=4)).restriction_matrix(6)
    assert np.array_equal(a, b)


def test_class_tuple_arithmetic():
    M = ExtraspecialModel(p=3, n=2)
    k0, k1 = M.char_class(0), M.char_class(1)
    assert (k0 * k1) == M.char_class_product((1, 1))
    assert (k0 - k0).is_zero()
    assert (k0 ** 2).ydeg == 16


def test_degree_cap():
    from extraspecial.config import DegreeCapError
    M = ExtraspecialModel(GlobalConfig(p=3, n=2, degree_cap=10))
    with pytest.raises(DegreeCapError):
        M.char_class_product((2, 0))
