"""Weyl assignments on reduced plumbing trees."""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Sequence

from .errors import UsageError
from .lattice import RootLattice, WeylElement
from .plumbing import (
    DEFAULT_BUDGET,
    ContractionScript,
    PlumbingTree,
    contractible_deg2_path,
    is_reduced,
    replay_script,
)


@dataclass(frozen=True)
class ContractiblePath:
    path: tuple[int, ...]
    script: ContractionScript
    delta_pi: int

    @property
    def terminals(self) -> tuple[int, int]:
        return self.path[0], self.path[-1]


def delta_pi(tree: PlumbingTree, script: ContractionScript) -> int:
    """pi(B) - pi(B-bar), B-bar the framing matrix after replaying the script."""
    contracted, _ = replay_script(tree, script)
    return tree.framing.pi - contracted.framing.pi


def degree2_segments(tree: PlumbingTree) -> list[tuple[int, ...]]:
    """Maximal runs of degree-2 vertices together with their two end vertices."""
    if tree.size < 2:
        return []
    out = []
    seen = set()
    for u in tree.ids:
        if tree.degree(u) == 2:
            continue
        for nb in tree.neighbours(u):
            run = [u, nb]
            prev, cur = u, nb
            while tree.degree(cur) == 2:
                nxt = next(x for x in tree.neighbours(cur) if x != prev)
                run.append(nxt)
                prev, cur = cur, nxt
            key = frozenset(run)
            if key not in seen:
                seen.add(key)
                out.append(tuple(run))
    return out


@lru_cache(maxsize=4096)
def maximal_paths(tree: PlumbingTree, budget: int = DEFAULT_BUDGET) -> tuple[ContractiblePath, ...]:
    """Maximal contractible degree-2 paths having a terminal of degree != 2."""
    found = []
    for seg in degree2_segments(tree):
        k = len(seg)
        contractible = {}
        for i in range(k):
            for j in range(i + 1, k):
                script = contractible_deg2_path(tree, seg[i], seg[j], budget)
                if script is not None:
                    contractible[(i, j)] = script
        for (i, j), script in contractible.items():
            if any(a <= i and j <= b and (a, b) != (i, j) for (a, b) in contractible):
                continue
            if tree.degree(seg[i]) == 2 and tree.degree(seg[j]) == 2:
                continue
            found.append(ContractiblePath(tuple(seg[i:j + 1]), script, delta_pi(tree, script)))
    return tuple(found)


@dataclass(frozen=True)
class WeylAssignment:
    tree: PlumbingTree
    lattice: RootLattice
    values: tuple[WeylElement, ...]

    def __post_init__(self):
        if len(self.values) != self.tree.size:
            raise UsageError("one Weyl element per vertex is required")

    def at(self, v: int) -> WeylElement:
        return self.values[self.tree.index(v)]

    def conjugate(self, w: WeylElement) -> WeylAssignment:
        """Componentwise left multiplication by w.

        Degree-2 vertices stay at the identity; their value never enters a
        coefficient or a t-exponent since l_v = 0 there.
        """
        tree = self.tree
        return WeylAssignment(tree, self.lattice, tuple(
            x if tree.degree(v) == 2 else self.lattice.mul(w, x) for v, x in zip(tree.ids, self.values)))

    def to_json(self) -> dict:
        return {str(v): x.name for v, x in zip(self.tree.ids, self.values)}

    def names(self) -> list[str]:
        return [x.name for x in self.values]


def identity_assignment(tree: PlumbingTree, lattice: RootLattice) -> WeylAssignment:
    return WeylAssignment(tree, lattice, (lattice.identity_element,) * tree.size)


def parse_assignment(spec, tree: PlumbingTree, lattice: RootLattice) -> WeylAssignment:
    """``"identity"``, comma-separated names in vertex order, or a JSON map id -> name."""
    if isinstance(spec, dict):
        return WeylAssignment(tree, lattice, tuple(lattice.by_name(spec[str(v)]) for v in tree.ids))
    spec = str(spec).strip()
    if spec in ("identity", "1", "id"):
        return identity_assignment(tree, lattice)
    if spec.startswith("{"):
        return parse_assignment(json.loads(spec), tree, lattice)
    names = [s.strip() for s in spec.split(",")]
    if len(names) != tree.size:
        raise UsageError(f"expected {tree.size} Weyl elements, got {len(names)}")
    return WeylAssignment(tree, lattice, tuple(lattice.by_name(n) for n in names))


def _constraints(tree: PlumbingTree, budget: int):
    """Union-find over degree != 2 vertices plus a node ONE for the identity."""
    ONE = None
    parent: dict = {ONE: ONE}
    parity: dict = {ONE: 0}
    for v in tree.ids:
        if tree.degree(v) != 2:
            parent[v] = v
            parity[v] = 0

    def find(x):
        if parent[x] == x:
            return x, 0
        r, p = find(parent[x])
        parent[x] = r
        parity[x] ^= p
        return r, parity[x]

    consistent = True
    for cp in maximal_paths(tree, budget):
        v, v2 = cp.terminals
        a = v if tree.degree(v) != 2 else ONE
        b = v2 if tree.degree(v2) != 2 else ONE
        p = cp.delta_pi % 2
        ra, pa = find(a)
        rb, pb = find(b)
        if ra == rb:
            if pa ^ pb != p:
                consistent = False
            continue
        # keep ONE as a root so fixed components are easy to spot
        if rb is ONE:
            ra, rb, pa, pb = rb, ra, pb, pa
        parent[rb] = ra
        parity[rb] = pa ^ pb ^ p
    return find, consistent


def free_count(tree: PlumbingTree, budget: int = DEFAULT_BUDGET) -> int:
    """n with |assignments| = |W|^n."""
    nondeg2 = sum(1 for v in tree.ids if tree.degree(v) != 2)
    return nondeg2 - len(maximal_paths(tree, budget))


def enumerate_assignments(tree: PlumbingTree, lattice: RootLattice, budget: int = DEFAULT_BUDGET,
                          check_reduced: bool = True) -> list[WeylAssignment]:
    if check_reduced and not is_reduced(tree, budget):
        raise UsageError("Weyl assignments are defined on reduced trees only")
    find, consistent = _constraints(tree, budget)
    if not consistent:
        return []
    iota = lattice.iota
    ident = lattice.identity_element
    roots: list = []
    info = {}
    for v in tree.ids:
        if tree.degree(v) == 2:
            continue
        r, p = find(v)
        info[v] = (r, p)
        if r is not None and r not in roots:
            roots.append(r)
    out = []
    for choice in product(lattice.weyl_elements(), repeat=len(roots)):
        base = dict(zip(roots, choice))
        vals = []
        for v in tree.ids:
            if tree.degree(v) == 2:
                vals.append(ident)
                continue
            r, p = info[v]
            x = ident if r is None else base[r]
            vals.append(lattice.mul(iota, x) if p else x)
        out.append(WeylAssignment(tree, lattice, tuple(vals)))
    return out


def validate(xi: WeylAssignment, budget: int = DEFAULT_BUDGET) -> bool:
    tree, lattice = xi.tree, xi.lattice
    in_w = {w.matrix for w in lattice.weyl_elements()}
    constrained = set()
    for v, x in zip(tree.ids, xi.values):
        if tree.degree(v) == 2 and not x.is_identity:
            return False
    for cp in maximal_paths(tree, budget):
        v, v2 = cp.terminals
        constrained.update((v, v2))
        rhs = xi.at(v2)
        if cp.delta_pi % 2:
            rhs = lattice.mul(lattice.iota, rhs)
        if xi.at(v).matrix != rhs.matrix:
            return False
    # values outside W only arise through iota-forcing along a path
    return all(x.matrix in in_w or v in constrained for v, x in zip(tree.ids, xi.values))


def weyl_orbits(assignments: Sequence[WeylAssignment]) -> list[list[WeylAssignment]]:
    if not assignments:
        return []
    lattice = assignments[0].lattice
    key = {tuple(x.matrix for x in a.values): a for a in assignments}
    seen = set()
    orbits = []
    for a in assignments:
        k = tuple(x.matrix for x in a.values)
        if k in seen:
            continue
        orbit = []
        for w in lattice.weyl_elements():
            b = a.conjugate(w)
            kb = tuple(x.matrix for x in b.values)
            if kb not in seen and kb in key:
                seen.add(kb)
                orbit.append(key[kb])
        orbits.append(orbit)
    return orbits

