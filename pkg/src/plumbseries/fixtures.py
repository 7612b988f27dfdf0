"""Seeded generators for trees, tuples and moves used by tests and experiment scripts."""

from __future__ import annotations

import random
from fractions import Fraction

from .assignments import enumerate_assignments
from .errors import MoveInapplicableError
from .lattice import RootLattice
from .plumbing import NeumannMove, PlumbingTree, apply_move, is_reduced
from .series import Tau, Truncation, prefactor
from .spinc import spinc_classes


def random_tree(rng: random.Random, size: int, weights=range(-5, -1), negative_definite: bool = True,
                max_degree: int = 3) -> PlumbingTree:
    """A random tree on 0..size-1 with the requested framing properties."""
    weights = list(weights)
    for _ in range(1000):
        parents = []
        deg = [0] * size
        for i in range(1, size):
            options = [j for j in range(i) if deg[j] < max_degree]
            p = rng.choice(options)
            parents.append((p, i))
            deg[p] += 1
            deg[i] += 1
        tree = PlumbingTree(tuple((i, rng.choice(weights)) for i in range(size)), tuple(parents))
        f = tree.framing
        if f.det == 0:
            continue
        if negative_definite and not f.negative_definite:
            continue
        if is_reduced(tree):
            return tree
    raise RuntimeError("could not sample a tree with the requested properties")


def random_tau(rng: random.Random, tree: PlumbingTree, lattice: RootLattice, check_reduced: bool = True) -> Tau:
    a = rng.choice(spinc_classes(tree, lattice))
    xi = rng.choice(enumerate_assignments(tree, lattice, check_reduced=check_reduced))
    return Tau(lattice, a, xi)


def window_for(tree: PlumbingTree, lattice: RootLattice, span: int = 4, t_min: int = -8) -> Truncation:
    """A q-window of the given span above the prefactor, or a t-window for indefinite framings."""
    if tree.framing.negative_definite:
        return Truncation(q_max=prefactor(tree, lattice)[1] + span)
    return Truncation(t_height_min=t_min)


def random_move(rng: random.Random, tree: PlumbingTree, kind: str) -> NeumannMove | None:
    """An expansion of the given kind between reduced trees, or None if none was found."""
    candidates = []
    if kind[0] == "A":
        candidates = [NeumannMove(kind, False, e) for e in tree.edges]
    elif kind[0] == "B":
        candidates = [NeumannMove(kind, False, (v,)) for v in tree.ids]
    else:
        for v in tree.ids:
            nbs = list(tree.neighbours(v))
            for k in range(len(nbs) + 1):
                moved = tuple(rng.sample(nbs, k))
                candidates.append(NeumannMove("C", False, (v,), (rng.randint(-4, -1), moved)))
    rng.shuffle(candidates)
    for move in candidates:
        try:
            target = apply_move(tree, move)
        except MoveInapplicableError:
            continue
        if target.framing.det != 0 and is_reduced(target):
            return move
    return None


def move_fixtures(seed: int, kind: str, count: int, lattice: RootLattice, sizes=(1, 2, 3)):
    """``count`` (tree, tau, move) triples for expansions of one kind."""
    rng = random.Random(f"{seed}-{kind}")
    out = []
    tries = 0
    while len(out) < count:
        tries += 1
        if tries > 50 * count:
            raise RuntimeError(f"too few applicable {kind} fixtures")
        tree = random_tree(rng, rng.choice(sizes), weights=range(-4, 0) if kind != "B-" else range(-4, -1))
        move = random_move(rng, tree, kind)
        if move is None:
            continue
        out.append((tree, random_tau(rng, tree, lattice), move))
    return out


def q_span(tree: PlumbingTree, lattice: RootLattice, span) -> Fraction:
    return prefactor(tree, lattice)[1] + span


def _root_last(tree: PlumbingTree, v: int) -> PlumbingTree:
    return tree.reordered([x for x in tree.ids if x != v] + [v]).replace(root=v)


def gluing_fixtures() -> list[tuple[PlumbingTree, PlumbingTree, str]]:
    """(left piece, right piece, lattice name) pairs whose gluing is reduced.

    The first three are single vertex gluings, i.e. lens spaces.
    """
    from .plumbing import chain, star
    s = star(-2, [[-2], [-3], [-5]])
    return [
        (chain([-2], root=0), chain([-3], root=0), "A1"),
        (chain([-4], root=0), chain([-3], root=0), "A2"),
        (chain([2], root=0), chain([-9], root=0), "A1"),
        (chain([-2, -2], root=1), chain([-3], root=0), "A1"),
        (chain([-2, -2], root=1), chain([-1, -3], root=0), "A2"),
        (chain([-2, -2], root=1), chain([-1, -3], root=0), "A1"),
        (_root_last(s, 3), chain([-1, -2], root=0), "A1"),
        (chain([-3, -1], root=1), chain([-1, -2, -2], root=0), "A1"),
        (_root_last(s, 1), chain([-1, -3], root=0), "A1"),
        (chain([-3, -2], root=1), chain([0, -4], root=0), "A1"),
    ]


def splitting_fixtures() -> list[tuple[PlumbingTree, int, PlumbingTree, int, int, str]]:
    """(t1, v1, t2, v2, e, lattice name) with negative definite pieces."""
    from .plumbing import chain, star
    return [
        (chain([-2, -2]), 0, chain([-3, -2]), 0, -1, "A1"),
        (chain([-2, -2]), 0, chain([-3, -2]), 0, -2, "A2"),
        (star(-2, [[-2], [-2], [-3]]), 1, chain([-2, -3]), 0, -1, "A1"),
        (star(-2, [[-2], [-3], [-5]]), 3, star(-2, [[-2], [-2], [-3]]), 2, -2, "A1"),
        (chain([-3, -2]), 1, chain([-2, -5]), 0, 0, "A1"),
        (chain([-2, -2, -2]), 0, chain([-4, -2]), 1, 1, "A1"),
    ]
