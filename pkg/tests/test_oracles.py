import random
from fractions import Fraction

import pytest

from plumbseries.assignments import WeylAssignment, identity_assignment
from plumbseries.errors import UnsupportedManifoldError, UsageError
from plumbseries.kostant import kostant_collection
from plumbseries.oracles import brieskorn_series, collection_coefficient, lens_series, star_framing
from plumbseries.plumbing import PlumbingTree, chain
from plumbseries.series import Tau, Truncation, prefactor, y_closed
from plumbseries.spinc import spinc_classes


def _tree(b):
    s = len(b)
    verts = tuple((i, b[i][i]) for i in range(s))
    edges = tuple((i, j) for i in range(s) for j in range(i + 1, s) if b[i][j])
    return PlumbingTree(verts, edges)


def test_lens_table(A1):
    assert lens_series(5, 0).coefficient(q=Fraction(-1, 2)) == 2
    s = lens_series(5, 2)
    assert s.coefficient(q=Fraction(-7, 10), t=(2,)) == -1
    # |p| <= 2: two cases land in the same class
    assert len(lens_series(1, 0)) == 3
    with pytest.raises(UsageError):
        lens_series(5, 1)
    with pytest.raises(UsageError):
        lens_series(0, 0)


def test_star_framing_layout():
    b = star_framing((-1, -2, [-2, -3], -7))
    assert len(b) == 5
    assert b[0][:4] == (-1, 1, 0, 1)
    assert b[2][4] == 1 and b[4][0] == 1


def test_brieskorn_guards(A1):
    with pytest.raises(UnsupportedManifoldError):
        brieskorn_series((-2, -2, -3, -5), A1, [A1.identity_element] * 4, 5)
    with pytest.raises(UnsupportedManifoldError):
        brieskorn_series((1, -2, -3, -7), A1, [A1.identity_element] * 4, 5)


# Sigma(2,3,7), Sigma(2,3,5) and Sigma(2,3,11)
BRIESKORN = [
    ((-1, -2, -3, -7), 40),
    ((-2, -2, [-2, -2], [-2, -2, -2, -2]), 24),
    ((-2, -2, [-2, -2], [-2, -2, -2, -2, -3]), 24),
]


@pytest.mark.parametrize("weights,span", BRIESKORN)
def test_brieskorn_matches_engine(weights, span, A1, A2):
    b = star_framing(weights)
    tree = _tree(b)
    assert abs(tree.framing.det) == 1 and tree.framing.negative_definite
    rng = random.Random(str(weights))
    for lat in (A1, A2):
        q = prefactor(tree, lat)[1] + (span if lat.rank == 1 else span // 3)
        for _ in range(3 if lat.rank == 1 else 1):
            vals = [rng.choice(lat.extended_weyl_elements) for _ in range(4)]
            full = [vals[k] if k < 4 else lat.identity_element for k in range(tree.size)]
            xi = WeylAssignment(tree, lat, tuple(full))
            tau = Tau(lat, spinc_classes(tree, lat)[0], xi)
            got = y_closed(tree, tau, Truncation(q_max=q))
            want = brieskorn_series(weights, lat, vals, q)
            assert got.terms == want.terms


def test_collection_closed_forms(A1, A2):
    for lat in (A1, A2):
        for x in lat.extended_weyl_elements:
            for n in range(5):
                series = kostant_collection(lat, x, n, 4)
                for (_, _, z), c in series.terms.items():
                    if series.window.contains((0, (0,) * lat.rank, z)):
                        assert collection_coefficient(lat, x, n, z) == c


def test_identity_lens_engine_single_class(A1):
    t = chain([-7])
    for a in spinc_classes(t, A1):
        got = y_closed(t, Tau(A1, a, identity_assignment(t, A1)))
        assert got == lens_series(-7, a.a[0][0])
