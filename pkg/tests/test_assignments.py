import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from plumbseries.assignments import (
    WeylAssignment,
    delta_pi,
    enumerate_assignments,
    free_count,
    identity_assignment,
    maximal_paths,
    parse_assignment,
    validate,
    weyl_orbits,
)
from plumbseries.errors import UsageError
from plumbseries.fixtures import random_tree
from plumbseries.plumbing import PlumbingTree, chain, contractible_deg2_path, star

SIGMA237 = star(-1, [[-2], [-3], [-7]])

# two trivalent vertices joined through a 0-weight vertex
BRIDGED = PlumbingTree(
    ((0, -2), (1, -2), (2, -3), (3, 0), (4, -2), (5, -2), (6, -5)),
    ((0, 1), (0, 2), (0, 3), (3, 4), (4, 5), (4, 6)),
)


def test_sigma237_counts(A1):
    xs = enumerate_assignments(SIGMA237, A1)
    assert len(xs) == 16
    assert len(weyl_orbits(xs)) == 8
    assert all(validate(x) for x in xs)


def test_single_vertex_counts(A1, A2):
    assert len(enumerate_assignments(chain([-3]), A1)) == 2
    assert len(enumerate_assignments(chain([-3]), A2)) == 6


def test_validate_examples(A1):
    assert validate(identity_assignment(SIGMA237, A1))
    assert validate(parse_assignment("s1,1,1,1", SIGMA237, A1))
    t = chain([-2, -2, -2])
    bad = WeylAssignment(t, A1, (A1.identity_element, A1.iota, A1.identity_element))
    assert not validate(bad)


def test_unreduced_tree_refused(A1):
    with pytest.raises(UsageError):
        enumerate_assignments(star(-2, [[-1], [-1], [-1]]), A1)


def test_bridge_forces_iota(A1, A2):
    (cp,) = maximal_paths(BRIDGED)
    assert cp.path == (0, 3, 4)
    # C removes a hyperbolic pair, so pi drops by one
    assert cp.delta_pi == 1
    assert delta_pi(BRIDGED, contractible_deg2_path(BRIDGED, 0, 4)) == 1
    assert free_count(BRIDGED) == 5
    xs = enumerate_assignments(BRIDGED, A1)
    assert len(xs) == 2 ** 5
    for x in xs:
        assert x.at(0).matrix == A1.mul(A1.iota, x.at(4)).matrix
    ys = enumerate_assignments(BRIDGED, A2)
    assert len(ys) == 6 ** 5
    assert all(validate(y) for y in ys[::97])


def test_bridge_violation_detected(A1):
    vals = [A1.identity_element] * BRIDGED.size
    assert not validate(WeylAssignment(BRIDGED, A1, tuple(vals)))


def test_delta_pi_zero_when_pi_unchanged():
    t = chain([-2, 0, -3])
    assert delta_pi(t, contractible_deg2_path(t, 0, 2)) == t.framing.pi - chain([-5]).framing.pi


def test_parse_forms(A2):
    t = chain([-2, -3])
    assert parse_assignment("identity", t, A2) == identity_assignment(t, A2)
    x = parse_assignment('{"0": "s1", "1": "s2"}', t, A2)
    assert x.names() == ["s1", "s2"]
    assert parse_assignment(x.to_json(), t, A2) == x
    with pytest.raises(UsageError):
        parse_assignment("s1", t, A2)


@given(seed=st.integers(0, 10_000))
def test_conjugation_stable(seed, A1, A2):
    rng = random.Random(seed)
    lat = rng.choice([A1, A2])
    tree = random_tree(rng, rng.randint(1, 5), weights=range(-4, 1), negative_definite=False)
    xs = enumerate_assignments(tree, lat)
    assert len(xs) == len(lat.weyl_elements()) ** free_count(tree)
    x = rng.choice(xs)
    w = rng.choice(lat.weyl_elements())
    # a path ending inside a degree-2 run pins its other end, which w would move
    pinned = any(tree.degree(v) == 2 for cp in maximal_paths(tree) for v in cp.terminals)
    assert validate(x.conjugate(w)) or pinned
