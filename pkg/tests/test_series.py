import random
from fractions import Fraction

import pytest
from golden import SIGMA237_A1_IDENTITY, SIGMA237_A2_IDENTITY
from hypothesis import given, settings
from hypothesis import strategies as st

from plumbseries.assignments import WeylAssignment, enumerate_assignments, identity_assignment, parse_assignment
from plumbseries.errors import EvaluationUndefinedError, TruncationError, UnsupportedManifoldError, UsageError
from plumbseries.fixtures import random_tau, random_tree, window_for
from plumbseries.laurent import Series, add, canonical_text, parse_canonical
from plumbseries.oracles import brute_force_y, lens_series
from plumbseries.plumbing import chain, star
from plumbseries.series import (
    Tau,
    Truncation,
    coefficient_c,
    leading_shift,
    prefactor,
    specialize_t1,
    t_exponent,
    y_closed,
    y_closed_with_certificate,
    y_knot,
    y_restricted,
)
from plumbseries.spinc import SpinCRep, delta, delta_hat, spinc_classes

SIGMA237 = star(-1, [[-2], [-3], [-7]])


def golden_window(tree, tau, rel):
    return Truncation(q_max=leading_shift(tree, tau) + rel)


def test_prefactor(A1, A2):
    assert prefactor(SIGMA237, A1) == (1, Fraction(-(3 * 4 - 13), 2) * Fraction(1, 2))
    sign, q = prefactor(chain([5]), A2)
    assert sign == -1 and q == Fraction(3 - 5, 2) * 2


def test_lens_examples(A1):
    t = chain([5])
    zero = SpinCRep(t, A1, ((0,),))
    two = SpinCRep(t, A1, ((2,),))
    assert canonical_text(y_closed(t, Tau(A1, zero, identity_assignment(t, A1)))) == "2*q^(-1/2)"
    assert canonical_text(y_closed(t, Tau(A1, two, identity_assignment(t, A1)))) == "-q^(-7/10)*t^2"


@pytest.mark.parametrize("p", [-9, -6, -4, -3, 3, 4, 7])
def test_lens_all_classes(p, A1):
    t = chain([p])
    for a in spinc_classes(t, A1):
        got = y_closed(t, Tau(A1, a, identity_assignment(t, A1)))
        assert got == lens_series(p, a.a[0][0])


def test_sigma237_a1_golden(A1):
    tau = Tau(A1, spinc_classes(SIGMA237, A1)[0], identity_assignment(SIGMA237, A1))
    got = y_closed(SIGMA237, tau, golden_window(SIGMA237, tau, 96))
    assert canonical_text(got) == SIGMA237_A1_IDENTITY
    assert got == parse_canonical(SIGMA237_A1_IDENTITY, 1)


def test_sigma237_iota_everywhere_same_series(A1):
    a = spinc_classes(SIGMA237, A1)[0]
    tr = golden_window(SIGMA237, Tau(A1, a, identity_assignment(SIGMA237, A1)), 96)
    base = y_closed(SIGMA237, Tau(A1, a, identity_assignment(SIGMA237, A1)), tr)
    flipped = y_closed(SIGMA237, Tau(A1, a, parse_assignment("s1,s1,s1,s1", SIGMA237, A1)), tr)
    assert base == flipped


def test_sigma237_a2_golden(A2):
    tau = Tau(A2, spinc_classes(SIGMA237, A2)[0], identity_assignment(SIGMA237, A2))
    got = y_closed(SIGMA237, tau, golden_window(SIGMA237, tau, 17))
    assert got == parse_canonical(SIGMA237_A2_IDENTITY, 2)


def test_sigma237_distinct_orbit_series(A1):
    a = spinc_classes(SIGMA237, A1)[0]
    xs = enumerate_assignments(SIGMA237, A1)
    tr = Truncation(q_max=Fraction(193, 2))
    texts = {canonical_text(y_closed(SIGMA237, Tau(A1, a, x), tr)) for x in xs}
    assert len(texts) == 8
    at_one = {canonical_text(specialize_t1(y_closed(SIGMA237, Tau(A1, a, x), tr))) for x in xs}
    assert len(at_one) == 1


def test_specialize_sums_t_monomials(A2):
    tau = Tau(A2, spinc_classes(SIGMA237, A2)[0], identity_assignment(SIGMA237, A2))
    full = y_closed(SIGMA237, tau, Truncation(q_max=17))
    flat = specialize_t1(full)
    for q in {k[0] for k in full.terms}:
        assert flat.coefficient(q) == sum(c for k, c in full.terms.items() if k[0] == q)


def test_specialize_refused_for_indefinite(A1):
    t = star(1, [[-2], [-3], [-5]])
    assert not t.framing.negative_definite
    tau = Tau(A1, spinc_classes(t, A1)[0], identity_assignment(t, A1))
    s = y_closed(t, tau, Truncation(t_height_min=-6))
    with pytest.raises(EvaluationUndefinedError):
        specialize_t1(s)


def test_specialize_polynomial():
    s = Series.monomial(1, 3, 1, (2,)) + Series.monomial(1, -1, 1, (-2,))
    assert specialize_t1(s) == Series.monomial(1, 2, 1)


def test_explicit_depth_too_small(A1):
    t = star(-2, [[-2], [-3], [-5]])
    tau = Tau(A1, spinc_classes(t, A1)[0], identity_assignment(t, A1))
    with pytest.raises(TruncationError):
        y_closed(t, tau, Truncation(q_max=prefactor(t, A1)[1] + 20, kostant_depth=0))


def test_singular_and_unreduced_refused(A1):
    t = chain([-1, -1])
    assert t.framing.det == 0
    with pytest.raises(UnsupportedManifoldError):
        y_closed(t, Tau(A1, SpinCRep(t, A1, delta(t, A1)), identity_assignment(t, A1)))
    bad = star(-2, [[-1], [-1], [-1]])
    xi = identity_assignment(bad, A1)
    tau = Tau(A1, SpinCRep(bad, A1, delta(bad, A1)), xi)
    with pytest.raises(UsageError):
        y_closed(bad, tau, Truncation(q_max=10))


def test_coefficient_examples(A1, A2):
    t = chain([-2, -3, -2])
    xi = identity_assignment(t, A1)
    assert coefficient_c(t, xi, ((1,), (2,), (-1,)), 4) == 0
    single = chain([-3])
    # top term of the squared Weyl denominator
    for lat in (A1, A2):
        assert coefficient_c(single, identity_assignment(single, lat), delta(single, lat), 2) == 1
    xi = identity_assignment(SIGMA237, A1)
    assert coefficient_c(SIGMA237, xi, ((-1,), (1,), (1,), (1,)), 2) == 1


def test_t_exponent(A1):
    ell = ((-1,), (1,), (1,), (3,))
    assert t_exponent(identity_assignment(SIGMA237, A1), ell) == (4,)
    assert t_exponent(parse_assignment("s1,1,1,1", SIGMA237, A1), ell) == (6,)


@given(seed=st.integers(0, 10_000))
@settings(max_examples=20)
def test_t_exponent_equivariant(seed, A2):
    rng = random.Random(seed)
    xs = enumerate_assignments(SIGMA237, A2)
    xi = rng.choice(xs)
    w = rng.choice(A2.weyl_elements())
    ell = tuple(tuple(rng.randint(-5, 5) for _ in range(2)) for _ in range(4))
    assert t_exponent(xi.conjugate(w), tuple(w.act(v) for v in ell)) == t_exponent(xi, ell)


def test_certificate_json(A1):
    tau = Tau(A1, spinc_classes(SIGMA237, A1)[0], identity_assignment(SIGMA237, A1))
    _, cert = y_closed_with_certificate(SIGMA237, tau, Truncation(q_max=20))
    data = cert.to_json()
    assert data["mode"] and "ellipsoid_radius" in data


def _leaf_first(tree, tau):
    """Reorder tree and tau so that a leaf comes first."""
    leaf = next(v for v in tree.ids if tree.degree(v) == 1)
    order = [leaf] + [v for v in tree.ids if v != leaf]
    pos = [tree.index(v) for v in order]
    t2 = tree.reordered(order)
    a = SpinCRep(t2, tau.lattice, tuple(tau.a.a[k] for k in pos))
    xi = WeylAssignment(t2, tau.lattice, tuple(tau.xi.values[k] for k in pos))
    return t2, Tau(tau.lattice, a, xi)


@pytest.mark.parametrize("tree", [chain([-2, -3]), star(-2, [[-2], [-3], [-5]]), chain([-3, 2, -2]), SIGMA237])
def test_restricted_sum(tree, A1, A2):
    nonzero = 0
    for lat in (A1, A2) if tree.size <= 2 else (A1,):
        tr = window_for(tree, lat, span=12, t_min=-10)
        for a in spinc_classes(tree, lat)[:12]:
            for xi in enumerate_assignments(tree, lat)[:4]:
                t2, tau = _leaf_first(tree, Tau(lat, a, xi))
                total = y_closed(tree, Tau(lat, a, xi), tr)
                acc = Series.zero(lat.rank)
                for w in lat.weyl_elements():
                    acc = add(acc, y_restricted(t2, tau, w, tr))
                assert acc == total
                nonzero += bool(total)
    assert nonzero


def test_restricted_needs_leaf_first(A1):
    t = star(-2, [[-2], [-3], [-5]])
    tau = Tau(A1, spinc_classes(t, A1)[0], identity_assignment(t, A1))
    with pytest.raises(UsageError):
        y_restricted(t, tau, A1.identity_element, Truncation(q_max=5))


@pytest.mark.parametrize("tree,box,lat", [
    (chain([-2, -3]), 4, "A2"),
    (chain([-2, -3, -2]), 5, "A1"),
    (chain([-3, 2, -2]), 6, "A1"),
    (star(-2, [[-2], [-3], [-5]]), 8, "A1"),
])
def test_brute_force_agrees(tree, box, lat, A1, A2):
    lattice = A1 if lat == "A1" else A2
    rng = random.Random(str(tree))
    classes = spinc_classes(tree, lattice)
    picks = classes if tree.size <= 3 else [rng.choice(classes)]
    for a in picks:
        xi = rng.choice(enumerate_assignments(tree, lattice))
        tau = Tau(lattice, a, xi)
        brute = brute_force_y(tree, tau, box)
        if brute.window.q_max is not None:
            tr = Truncation(q_max=brute.window.q_max)
        else:
            tr = Truncation(t_height_min=-30) if not tree.framing.negative_definite else Truncation(q_max=50)
        got = y_closed(tree, tau, tr)
        shared = got.window.intersect(brute.window)
        assert got.restrict(shared).terms == brute.restrict(shared).terms


@given(seed=st.integers(0, 10_000))
@settings(max_examples=25)
def test_weyl_invariance_property(seed, A1, A2):
    rng = random.Random(seed)
    lat = rng.choice([A1, A2])
    tree = random_tree(rng, rng.randint(1, 4 if lat.rank == 1 else 3))
    tau = random_tau(rng, tree, lat)
    w = rng.choice(lat.weyl_elements())
    tr = window_for(tree, lat, span=3)
    assert y_closed(tree, tau.act(w), tr) == y_closed(tree, tau, tr)


def test_workers_deterministic(A1):
    t = star(-2, [[-2], [-3], [-5]])
    tau = Tau(A1, spinc_classes(t, A1)[0], identity_assignment(t, A1))
    q = prefactor(t, A1)[1] + 40
    one = y_closed(t, tau, Truncation(q_max=q, workers=1))
    many = y_closed(t, tau, Truncation(q_max=q, workers=4))
    assert canonical_text(one) == canonical_text(many)


def test_knot_single_vertex(A1):
    # one vertex, degree 0: the root keeps the Weyl denominator z - 1/z
    t = chain([-3], root=0)
    a = SpinCRep(t, A1, delta_hat(t, A1), True)
    s = y_knot(t, Tau(A1, a, identity_assignment(t, A1)), Truncation(q_max=prefactor(t, A1)[1] + 4))
    zs = {k[2] for k in s.terms}
    assert zs and all(abs(z[0]) % 2 == 0 for z in zs)
    assert s.window.q_max is not None


def test_knot_needs_root(A1):
    t = chain([-3])
    with pytest.raises(UsageError):
        y_knot(t, Tau(A1, SpinCRep(t, A1, delta(t, A1)), identity_assignment(t, A1)))
