from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from plumbseries.errors import ConfigurationError, UsageError
from plumbseries.lattice import build_lattice, height, kostant_partition, pairing, weyl_group_order
from plumbseries.oracles import kostant_brute

LATTICES = [build_lattice("A", r) for r in (1, 2, 3)] + [build_lattice("D", 4)]


def test_a1_data(A1):
    assert A1.positive_roots == ((1,),)
    assert A1.weyl_vector_doubled == (1,)
    assert len(A1.weyl_elements()) == 2


def test_a2_data(A2):
    assert set(A2.positive_roots) == {(1, 0), (0, 1), (1, 1)}
    assert A2.weyl_vector_doubled == (2, 2)
    assert len(A2.weyl_elements()) == 6


def test_a3_counts(A3):
    assert len(A3.positive_roots) == 6
    assert len(A3.weyl_elements()) == 24


@pytest.mark.parametrize("family,rank,order", [("A", 1, 2), ("A", 2, 6), ("A", 3, 24), ("D", 4, 192)])
def test_group_orders(family, rank, order):
    assert weyl_group_order(family, rank) == order
    assert len(build_lattice(family, rank).weyl_elements()) == order


def test_pairings(A1, A2):
    assert pairing(A1, (1,), (1,)) == 2
    assert A1.rho_squared == Fraction(1, 2)
    assert pairing(A2, (1, 0), (0, 1)) == -1
    with pytest.raises(UsageError):
        pairing(A2, (1,), (1, 0))


def test_lengths(A1, A2):
    assert sorted(w.length for w in A1.weyl_elements()) == [0, 1]
    assert sorted(w.length for w in A2.weyl_elements()) == [0, 1, 1, 2, 2, 3]
    (s,) = [w for w in A1.weyl_elements() if not w.is_identity]
    assert s.matrix == A1.iota.matrix


def test_iota_outside_weyl_for_a2(A2):
    assert not A2.minus_one_in_weyl
    assert A2.iota.act((1, 2)) == (-1, -2)
    # sign rule (-1)^l(iota w) = (-1)^|D+| (-1)^l(w)
    for w in A2.weyl_elements():
        assert A2.mul(A2.iota, w).sign == -w.sign


def test_bad_family():
    with pytest.raises(ConfigurationError):
        build_lattice("B", 2)
    with pytest.raises(ConfigurationError):
        build_lattice("A", 0)


def test_kostant_examples(A1, A2):
    assert kostant_partition(A2, (0, 0)) == 1
    assert all(kostant_partition(A1, (n,)) == 1 for n in range(20))
    assert kostant_partition(A2, (1, 1)) == 2
    assert kostant_partition(A2, (-1, 3)) == 0


@pytest.mark.parametrize("lattice", LATTICES[:3], ids=lambda L: L.name)
def test_kostant_matches_brute_force(lattice):
    r = lattice.rank
    for alpha in product(range(13), repeat=r):
        if height(alpha) <= 12:
            assert kostant_partition(lattice, alpha) == kostant_brute(lattice, alpha), alpha


def test_two_rho_pairs_to_two():
    for L in LATTICES:
        for i in range(L.rank):
            e = tuple(int(j == i) for j in range(L.rank))
            assert pairing(L, L.weyl_vector_doubled, e) == 2


@pytest.mark.parametrize("lattice", LATTICES[:3], ids=lambda L: L.name)
def test_length_axioms(lattice):
    els = lattice.weyl_elements()
    for w in els:
        assert lattice.inverse(w).length == w.length
        for v in els:
            assert lattice.mul(w, v).length <= w.length + v.length


vec2 = st.tuples(st.integers(-6, 6), st.integers(-6, 6))


@given(vec2, vec2, st.integers(0, 5))
def test_pairing_is_weyl_invariant(a, b, k):
    L = build_lattice("A", 2)
    w = L.weyl_elements()[k]
    assert pairing(L, w.act(a), w.act(b)) == pairing(L, a, b)
    assert pairing(L, a, b) == pairing(L, b, a)


def test_extended_group_names(A2):
    names = {w.name for w in A2.extended_weyl_elements}
    assert len(names) == 12
    for w in A2.extended_weyl_elements:
        assert A2.by_name(w.name).matrix == w.matrix
    with pytest.raises(UsageError):
        A2.by_name("nonsense")
