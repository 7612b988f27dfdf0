import pytest

from plumbseries.kostant import (
    denominator_sum_equals_product,
    kostant_collection,
    kostant_series,
    required_depth,
    twisted_cone_coordinates,
    verify_p2,
    weyl_denominator,
)
from plumbseries.lattice import build_lattice, kostant_partition


def zterms(s):
    return {z: c for (_, _, z), c in s.terms.items()}


def test_a1_denominator(A1):
    assert zterms(weyl_denominator(A1)) == {(1,): 1, (-1,): -1}


def test_a2_denominator(A2):
    d = zterms(weyl_denominator(A2))
    assert len(d) == 6
    assert d[(2, 2)] == 1 and d[(-2, -2)] == -1


@pytest.mark.parametrize("rank", [1, 2, 3])
def test_denominator_forms_agree(rank):
    L = build_lattice("A", rank)
    assert denominator_sum_equals_product(L)
    assert (0,) * rank not in zterms(weyl_denominator(L))


@pytest.mark.parametrize("rank,depth", [(1, 10), (2, 8), (3, 6), (2, 10), (3, 10)])
def test_p2(rank, depth):
    assert verify_p2(build_lattice("A", rank), depth)


def test_a1_kostant_series(A1):
    assert zterms(kostant_series(A1, A1.identity_element, 2)) == {(-1,): 1, (-3,): 1, (-5,): 1}
    assert zterms(kostant_series(A1, A1.iota, 2)) == {(1,): -1, (3,): -1, (5,): -1}


def test_collection_small_degrees(A1):
    for x in A1.weyl_elements():
        assert zterms(kostant_collection(A1, x, 2, 0)) == {(0,): 1}
    assert zterms(kostant_collection(A1, A1.identity_element, 0, 0)) == {(2,): 1, (0,): -2, (-2,): 1}
    k3 = kostant_collection(A1, A1.identity_element, 3, 4)
    assert zterms(k3) == zterms(kostant_series(A1, A1.identity_element, 4))


@pytest.mark.parametrize("rank", [1, 2])
def test_support_lies_in_twisted_cone(rank):
    L = build_lattice("A", rank)
    for x in L.extended_weyl_elements:
        for n in (3, 4):
            for z, c in zterms(kostant_collection(L, x, n, 4)).items():
                beta = twisted_cone_coordinates(L, x, n - 2, z)
                assert beta is not None and min(beta) >= 0
        for z, c in zterms(kostant_series(L, x, 5)).items():
            beta = twisted_cone_coordinates(L, x, 1, z)
            assert c == x.sign * kostant_partition(L, beta)


def test_required_depth(A1):
    # K_{x,3} certified down to twisted height -1 - 2d
    assert required_depth(A1, 3, -1) == 0
    assert required_depth(A1, 3, -7) == 3
    assert required_depth(A1, 2, -100) == 0
