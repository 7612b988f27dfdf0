"""Simply-laced root lattices, their Weyl groups and the Kostant partition function.

Lattice vectors are plain tuples of ints in the simple-root basis. Elements of
half the root lattice (the Weyl vector) are stored doubled.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Callable

from .errors import ConfigurationError, ResourceError, UsageError

Vec = tuple[int, ...]
Mat = tuple[tuple[int, ...], ...]

WEYL_ENUMERATION_CAP = math.factorial(10)


def mat_vec(m: Mat, v: Vec) -> Vec:
    return tuple(sum(a * b for a, b in zip(row, v)) for row in m)


def mat_mul(a: Mat, b: Mat) -> Mat:
    cols = list(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in cols) for row in a)


def identity(r: int) -> Mat:
    return tuple(tuple(int(i == j) for j in range(r)) for i in range(r))


def vadd(a: Vec, b: Vec) -> Vec:
    return tuple(x + y for x, y in zip(a, b))


def vsub(a: Vec, b: Vec) -> Vec:
    return tuple(x - y for x, y in zip(a, b))


def vscale(c: int, a: Vec) -> Vec:
    return tuple(c * x for x in a)


def vneg(a: Vec) -> Vec:
    return tuple(-x for x in a)


def height(a: Vec) -> int:
    return sum(a)


# -- Cartan matrices ---------------------------------------------------------

def _cartan_from_edges(r: int, edges) -> Mat:
    c = [[2 if i == j else 0 for j in range(r)] for i in range(r)]
    for i, j in edges:
        c[i][j] = c[j][i] = -1
    return tuple(tuple(row) for row in c)


def _cartan_a(r: int) -> Mat:
    return _cartan_from_edges(r, [(i, i + 1) for i in range(r - 1)])


def _cartan_d(r: int) -> Mat:
    if r < 4:
        raise ConfigurationError(f"D{r} is not a valid family member (need rank >= 4)")
    edges = [(i, i + 1) for i in range(r - 2)] + [(r - 3, r - 1)]
    return _cartan_from_edges(r, edges)


def _cartan_e(r: int) -> Mat:
    if r not in (6, 7, 8):
        raise ConfigurationError(f"E{r} is not a valid family member")
    # Bourbaki labelling: 1-3-4-5-6(-7-8), with 2 attached to 4.
    edges = [(0, 2), (2, 3), (3, 4), (1, 3)] + [(i, i + 1) for i in range(4, r - 1)]
    return _cartan_from_edges(r, edges)


# Extension point: register further simply-laced families here.
CARTAN_BUILDERS: dict[str, Callable[[int], Mat]] = {
    "A": _cartan_a,
    "D": _cartan_d,
    "E": _cartan_e,
}


# -- Weyl group elements -----------------------------------------------------

@dataclass(frozen=True)
class WeylElement:
    """A lattice automorphism in the Weyl group, possibly extended by iota = -1.

    ``length`` is the number of positive roots sent to negative roots. For
    elements of W this is the word length; for ``iota * w`` outside W it equals
    |positive roots| - length(w), which gives the sign used throughout.
    """

    matrix: Mat
    length: int
    name: str = field(compare=False, default="")
    perm: tuple[int, ...] | None = field(compare=False, default=None)

    def act(self, v: Vec) -> Vec:
        return mat_vec(self.matrix, v)

    @property
    def sign(self) -> int:
        return -1 if self.length % 2 else 1

    @property
    def is_identity(self) -> bool:
        return self.matrix == identity(len(self.matrix))

    def __str__(self) -> str:
        return self.name or repr(self.matrix)


@dataclass(frozen=True, eq=False)
class RootLattice:
    family: str
    rank: int
    cartan: Mat
    positive_roots: tuple[Vec, ...]
    weyl_vector_doubled: Vec

    def __eq__(self, other):
        return isinstance(other, RootLattice) and self.cartan == other.cartan

    def __hash__(self):
        return hash(self.cartan)

    def __repr__(self):
        return f"RootLattice({self.name})"

    def __reduce__(self):
        return (build_lattice, (self.family, self.rank))

    @property
    def name(self) -> str:
        return f"{self.family}{self.rank}"

    @property
    def num_positive_roots(self) -> int:
        return len(self.positive_roots)

    @cached_property
    def rho_squared(self) -> Fraction:
        """<rho, rho>."""
        return pairing(self, self.weyl_vector_doubled, self.weyl_vector_doubled, doubled=True)

    @cached_property
    def cartan_inverse(self) -> tuple[tuple[Fraction, ...], ...]:
        from .linalg import inverse
        return inverse(self.cartan)

    # -- Weyl group --

    def simple_reflection(self, i: int) -> Mat:
        r = self.rank
        # s_i(alpha_j) = alpha_j - C_ij alpha_i; columns are images of alpha_j.
        m = [[int(a == b) for b in range(r)] for a in range(r)]
        for j in range(r):
            m[i][j] -= self.cartan[i][j]
        return tuple(tuple(row) for row in m)

    def count_flipped(self, m: Mat) -> int:
        n = 0
        for alpha in self.positive_roots:
            img = mat_vec(m, alpha)
            if all(x <= 0 for x in img):
                n += 1
        return n

    @cached_property
    def _weyl_group(self) -> tuple[WeylElement, ...]:
        order = weyl_group_order(self.family, self.rank)
        if order > WEYL_ENUMERATION_CAP:
            raise ResourceError(f"|W({self.name})| = {order} exceeds the enumeration cap")
        gens = [self.simple_reflection(i) for i in range(self.rank)]
        ident = identity(self.rank)
        words: dict[Mat, tuple[int, ...]] = {ident: ()}
        frontier = [ident]
        while frontier:
            nxt = []
            for m in frontier:
                for i, g in enumerate(gens):
                    h = mat_mul(g, m)
                    if h not in words:
                        words[h] = (i,) + words[m]
                        nxt.append(h)
            frontier = nxt
        out = []
        for m, word in words.items():
            out.append(WeylElement(m, len(word), _word_name(word), self._perm_of(word)))
        out.sort(key=lambda w: (w.length, w.name))
        return tuple(out)

    def _perm_of(self, word: tuple[int, ...]) -> tuple[int, ...] | None:
        if self.family != "A":
            return None
        p = list(range(self.rank + 1))
        for i in reversed(word):
            p = [i + 1 if x == i else i if x == i + 1 else x for x in p]
        return tuple(p)

    @cached_property
    def identity_element(self) -> WeylElement:
        return self.weyl_elements()[0]

    @cached_property
    def iota(self) -> WeylElement:
        """The lattice map alpha -> -alpha, as an element of W when -1 lies in W."""
        m = tuple(tuple(-x for x in row) for row in identity(self.rank))
        for w in self.weyl_elements():
            if w.matrix == m:
                return w
        return WeylElement(m, self.num_positive_roots, "iota")

    @cached_property
    def minus_one_in_weyl(self) -> bool:
        return self.iota.name != "iota"

    def weyl_elements(self) -> tuple[WeylElement, ...]:
        return self._weyl_group

    @cached_property
    def extended_weyl_elements(self) -> tuple[WeylElement, ...]:
        """W together with iota*W (equal to W when -1 is in W)."""
        base = self.weyl_elements()
        if self.minus_one_in_weyl:
            return base
        extra = []
        for w in base:
            m = tuple(tuple(-x for x in row) for row in w.matrix)
            name = "iota" if w.name == "1" else f"iota*{w.name}"
            extra.append(WeylElement(m, self.count_flipped(m), name))
        return base + tuple(extra)

    @cached_property
    def _element_index(self) -> dict[Mat, WeylElement]:
        return {w.matrix: w for w in self.extended_weyl_elements}

    def element(self, m: Mat) -> WeylElement:
        try:
            return self._element_index[m]
        except KeyError:
            raise UsageError(f"matrix {m} is not in the extended Weyl group of {self.name}") from None

    def mul(self, a: WeylElement, b: WeylElement) -> WeylElement:
        return self.element(mat_mul(a.matrix, b.matrix))

    def inverse(self, a: WeylElement) -> WeylElement:
        # Weyl elements are isometries: M^-1 = C^-1 M^T C
        ident = identity(self.rank)
        for w in self.extended_weyl_elements:
            if mat_mul(w.matrix, a.matrix) == ident:
                return w
        raise UsageError("element has no inverse in the extended Weyl group")

    def by_name(self, name: str) -> WeylElement:
        name = name.strip()
        if name in ("identity", "id", "1", "e"):
            return self.identity_element
        for w in self.extended_weyl_elements:
            if w.name == name:
                return w
        if name == "iota":
            return self.iota
        raise UsageError(f"unknown Weyl element {name!r} for {self.name}")

    # -- Kostant partition function --

    @cached_property
    def _kostant_state(self):
        return {"lock": threading.Lock(), "tables": {}}

    def kostant_table(self, bound: Vec, multiplicity: int = 1) -> dict[Vec, int]:
        """Counts of multisets of positive roots (each taken ``multiplicity`` times
        as distinct colours) summing to every vector in the box [0, bound]."""
        state = self._kostant_state
        with state["lock"]:
            cached = state["tables"].get(multiplicity)
            if cached is not None and all(b <= c for b, c in zip(bound, cached[0])):
                return cached[1]
            if cached is not None:
                bound = tuple(max(b, c) for b, c in zip(bound, cached[0]))
            table = _coin_change(self.positive_roots * multiplicity, bound)
            state["tables"][multiplicity] = (bound, table)
            return table


def _coin_change(coins, bound: Vec) -> dict[Vec, int]:
    boxes = list(product(*(range(b + 1) for b in bound)))
    table = dict.fromkeys(boxes, 0)
    table[tuple(0 for _ in bound)] = 1
    for coin in coins:
        # boxes are in lexicographic order, so vec - coin is visited before vec
        for vec in boxes:
            prev = vsub(vec, coin)
            if all(x >= 0 for x in prev):
                table[vec] += table[prev]
    return table


def _word_name(word: tuple[int, ...]) -> str:
    if not word:
        return "1"
    return "*".join(f"s{i + 1}" for i in word)


def weyl_group_order(family: str, rank: int) -> int:
    if family == "A":
        return math.factorial(rank + 1)
    if family == "D":
        return 2 ** (rank - 1) * math.factorial(rank)
    if family == "E":
        return {6: 51840, 7: 2903040, 8: 696729600}[rank]
    raise ConfigurationError(f"unknown family {family}")


def _positive_roots(cartan: Mat) -> tuple[Vec, ...]:
    r = len(cartan)
    simple = [tuple(int(i == j) for j in range(r)) for i in range(r)]
    roots = set(simple)
    frontier = list(simple)
    while frontier:
        nxt = []
        for beta in frontier:
            for i in range(r):
                # <beta, alpha_i> = (C beta)_i for simply-laced lattices
                p = sum(cartan[i][j] * beta[j] for j in range(r))
                if p == -1:
                    gamma = tuple(beta[j] + (j == i) for j in range(r))
                    if gamma not in roots:
                        roots.add(gamma)
                        nxt.append(gamma)
        frontier = nxt
    return tuple(sorted(roots, key=lambda v: (sum(v), tuple(-x for x in v))))


_LATTICES: dict[tuple[str, int], RootLattice] = {}


def build_lattice(family: str, rank: int | None = None) -> RootLattice:
    """Build a simply-laced root lattice, e.g. ``build_lattice("A", 2)`` or ``build_lattice("A2")``."""
    if rank is None:
        family, rank = family[0].upper(), int(family[1:])
    family = family.upper()
    if rank < 1:
        raise ConfigurationError("rank must be positive")
    if family not in CARTAN_BUILDERS:
        raise ConfigurationError(f"unsupported lattice family {family!r}")
    key = (family, rank)
    if key not in _LATTICES:
        cartan = CARTAN_BUILDERS[family](rank)
        roots = _positive_roots(cartan)
        two_rho = tuple(sum(a[i] for a in roots) for i in range(rank))
        _LATTICES[key] = RootLattice(family, rank, cartan, roots, two_rho)
    return _LATTICES[key]


def pairing(lattice: RootLattice, a: Vec, b: Vec, doubled: bool = False) -> Fraction:
    """The Cartan pairing a^T C b; with ``doubled`` both inputs are stored as 2a, 2b."""
    if len(a) != lattice.rank or len(b) != lattice.rank:
        raise UsageError("rank mismatch in pairing")
    c = lattice.cartan
    val = sum(a[i] * c[i][j] * b[j] for i in range(lattice.rank) for j in range(lattice.rank))
    return Fraction(val, 4) if doubled else Fraction(val)


def kostant_partition(lattice: RootLattice, alpha: Vec) -> int:
    """Number of ways to write ``alpha`` as a sum of positive roots."""
    if any(x < 0 for x in alpha):
        return 0
    return lattice.kostant_table(tuple(alpha))[tuple(alpha)]


def colored_kostant(lattice: RootLattice, alpha: Vec, colours: int) -> int:
    """Number of ways to write ``alpha`` as a sum of positive roots drawn from
    ``colours`` distinguishable copies of the positive system."""
    if colours == 0:
        return int(all(x == 0 for x in alpha))
    if any(x < 0 for x in alpha):
        return 0
    return lattice.kostant_table(tuple(alpha), colours)[tuple(alpha)]


def weyl_elements(lattice: RootLattice) -> tuple[WeylElement, ...]:
    return lattice.weyl_elements()
