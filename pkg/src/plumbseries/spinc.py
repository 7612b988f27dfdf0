"""Spin^c representatives with coefficients in a root lattice.

A representative is a tuple of lattice vectors, one per vertex in vertex
order. Closed classes live in (delta + 2Q^s) / 2Q<B columns>; relative classes
use delta-hat and drop the distinguished column.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Sequence

from .errors import ResourceError, UnsupportedManifoldError, UsageError
from .lattice import RootLattice, Vec, WeylElement, vadd, vscale, vsub
from .linalg import column_echelon, in_lattice, mat_vec_q, reduce_mod_lattice
from .plumbing import PlumbingTree

CLASS_CAP = 10**6

Rep = tuple[Vec, ...]


@dataclass(frozen=True)
class SpinCRep:
    tree: PlumbingTree
    lattice: RootLattice
    a: Rep
    relative: bool = False

    def __post_init__(self):
        a = tuple(tuple(int(x) for x in v) for v in self.a)
        object.__setattr__(self, "a", a)
        if len(a) != self.tree.size or any(len(v) != self.lattice.rank for v in a):
            raise UsageError("representative shape does not match tree and lattice")
        if self.relative and self.tree.root is None:
            raise UsageError("relative representatives need a rooted tree")
        base = delta_hat(self.tree, self.lattice) if self.relative else delta(self.tree, self.lattice)
        if any(x % 2 for u, v in zip(a, base) for x in vsub(u, v)):
            raise UsageError("representative is not in the delta + 2Q^s coset")

    def to_json(self) -> list:
        return [list(v) for v in self.a]

    def coordinate(self, i: int) -> tuple[int, ...]:
        """The i-th simple-root coordinate across all vertices."""
        return tuple(v[i] for v in self.a)


def delta(tree: PlumbingTree, lattice: RootLattice) -> Rep:
    two_rho = lattice.weyl_vector_doubled
    return tuple(vscale(2 - tree.degree(v), two_rho) for v in tree.ids)


def delta_hat(tree: PlumbingTree, lattice: RootLattice) -> Rep:
    if tree.root is None:
        raise UsageError("delta-hat needs a distinguished vertex")
    two_rho = lattice.weyl_vector_doubled
    out = list(delta(tree, lattice))
    k = tree.index(tree.root)
    out[k] = vsub(out[k], two_rho)
    return tuple(out)


def rep(tree: PlumbingTree, lattice: RootLattice, a: Sequence[Sequence[int]], relative: bool = False) -> SpinCRep:
    return SpinCRep(tree, lattice, tuple(tuple(v) for v in a), relative)


def _columns(tree: PlumbingTree, relative: bool) -> list[list[int]]:
    b = tree.framing.entries
    skip = tree.index(tree.root) if relative else None
    return [[2 * b[i][j] for i in range(tree.size)] for j in range(tree.size) if j != skip]


def same_class(x: SpinCRep, y: SpinCRep) -> bool:
    if x.tree != y.tree or x.lattice != y.lattice or x.relative != y.relative:
        raise UsageError("representatives refer to different trees, lattices or kinds")
    if not x.relative:
        inv = x.tree.framing.inverse
        if inv is None:
            raise UnsupportedManifoldError("framing matrix is singular")
        for i in range(x.lattice.rank):
            d = vsub(x.coordinate(i), y.coordinate(i))
            sol = mat_vec_q(inv, d)
            if any(Fraction(c) / 2 != int(Fraction(c) / 2) for c in sol):
                return False
        return True
    basis = column_echelon(_columns(x.tree, True))
    return all(in_lattice(vsub(x.coordinate(i), y.coordinate(i)), basis) for i in range(x.lattice.rank))


def canonical(x: SpinCRep) -> SpinCRep:
    """Centered Hermite-reduced representative of the class of ``x`` (closed case)."""
    if x.tree.framing.det == 0:
        raise UnsupportedManifoldError("framing matrix is singular")
    basis = column_echelon(_columns(x.tree, x.relative))
    coords = [reduce_mod_lattice(x.coordinate(i), basis) for i in range(x.lattice.rank)]
    a = tuple(tuple(c[k] for c in coords) for k in range(x.tree.size))
    return SpinCRep(x.tree, x.lattice, a, x.relative)


def spinc_classes(tree: PlumbingTree, lattice: RootLattice) -> list[SpinCRep]:
    det = tree.framing.det
    if det == 0:
        raise UnsupportedManifoldError("framing matrix is singular")
    count = abs(det) ** lattice.rank
    if count > CLASS_CAP:
        raise ResourceError(f"{count} Spin^c classes exceed the cap {CLASS_CAP}")
    base = delta(tree, lattice)
    if abs(det) == 1:
        return [SpinCRep(tree, lattice, base)]
    # cosets of B Z^s in Z^s are indexed by the pivot box of its echelon form
    pivots_basis = column_echelon([[tree.framing.entries[i][j] for i in range(tree.size)] for j in range(tree.size)])
    box = [range(col[next(i for i, x in enumerate(col) if x)]) for col in pivots_basis]
    rows = [next(i for i, x in enumerate(col) if x) for col in pivots_basis]
    offsets = []
    for choice in product(*box):
        v = [0] * tree.size
        for r, c in zip(rows, choice):
            v[r] = c
        offsets.append(v)
    reduce_basis = column_echelon(_columns(tree, False))
    per_coord = []
    for i in range(lattice.rank):
        start = tuple(v[i] for v in base)
        per_coord.append([reduce_mod_lattice(vadd(start, vscale(2, o)), reduce_basis) for o in offsets])
    reps = []
    for combo in product(*per_coord):
        reps.append(tuple(tuple(c[k] for c in combo) for k in range(tree.size)))
    reps.sort()
    return [SpinCRep(tree, lattice, a) for a in reps]


def class_count(tree: PlumbingTree, lattice: RootLattice) -> int:
    return abs(tree.framing.det) ** lattice.rank


def weyl_act(w: WeylElement, x: SpinCRep) -> SpinCRep:
    return SpinCRep(x.tree, x.lattice, tuple(w.act(v) for v in x.a), x.relative)


def shift(x: SpinCRep, column: int, gamma: Vec) -> SpinCRep:
    """x + 2 gamma B_column."""
    b = x.tree.framing.entries
    a = tuple(vadd(v, vscale(2 * b[k][column], gamma)) for k, v in enumerate(x.a))
    return SpinCRep(x.tree, x.lattice, a, x.relative)


def _check_glue_order(ap: SpinCRep, am: SpinCRep):
    if not (ap.relative and am.relative):
        raise UsageError("gluing needs relative representatives")
    if ap.tree.ids[-1] != ap.tree.root or am.tree.ids[0] != am.tree.root:
        raise UsageError("left root must be last and right root first")


def star_op(ap: Sequence[Vec], am: Sequence[Vec]) -> Rep:
    return tuple(ap[:-1]) + (vadd(ap[-1], am[0]),) + tuple(am[1:])


def glue_spinc(ap: SpinCRep, am: SpinCRep) -> SpinCRep:
    from .plumbing import glue_trees
    _check_glue_order(ap, am)
    if ap.lattice != am.lattice:
        raise UsageError("lattice mismatch")
    return SpinCRep(glue_trees(ap.tree, am.tree), ap.lattice, star_op(ap.a, am.a))


def lambda_mu_act(gamma: Vec, generator: str, ap: SpinCRep, am: SpinCRep) -> tuple[SpinCRep, SpinCRep]:
    _check_glue_order(ap, am)
    m = ap.tree.size - 1
    if generator in ("lambda", "λ"):
        return shift(ap, m, gamma), shift(am, 0, gamma)
    if generator in ("mu", "μ"):
        a_plus = list(ap.a)
        a_minus = list(am.a)
        a_plus[m] = vadd(a_plus[m], vscale(2, gamma))
        a_minus[0] = vsub(a_minus[0], vscale(2, gamma))
        return SpinCRep(ap.tree, ap.lattice, tuple(a_plus), True), SpinCRep(am.tree, am.lattice, tuple(a_minus), True)
    raise UsageError(f"unknown generator {generator!r}")


def self_pairing(tree: PlumbingTree, lattice: RootLattice, a: Sequence[Vec]) -> Fraction:
    """<a, a> = sum_ij (B^-1)_ij <a_i, a_j>."""
    inv = tree.framing.inverse
    if inv is None:
        raise UnsupportedManifoldError("framing matrix is singular")
    c = lattice.cartan
    r = lattice.rank
    # pair via the Cartan matrix once per vertex pair
    ca = [tuple(sum(c[i][j] * v[j] for j in range(r)) for i in range(r)) for v in a]
    total = Fraction(0)
    for i, vi in enumerate(a):
        for j, cj in enumerate(ca):
            if inv[i][j]:
                total += inv[i][j] * sum(x * y for x, y in zip(vi, cj))
    return total


def parse_rep(text: str, tree: PlumbingTree, lattice: RootLattice) -> Rep:
    """Parse ``"v1;v2;..."`` with comma-separated coordinates per vertex."""
    parts = [p for p in text.split(";")]
    try:
        a = tuple(tuple(int(x) for x in p.split(",")) for p in parts)
    except ValueError:
        raise UsageError(f"cannot parse Spin^c representative {text!r}") from None
    if len(a) != tree.size or any(len(v) != lattice.rank for v in a):
        raise UsageError("representative shape does not match the tree")
    return a
