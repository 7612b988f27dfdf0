"""Plumbing trees, framing matrices and the Neumann moves.

Vertex order is part of a tree's value: matrix rows, Spin^c coordinates and
series exponents all follow it. New vertices created by a move are appended
and receive fresh ids (``max id + 1`` and so on).
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import IntegrityError, MoveInapplicableError, UsageError
from .linalg import determinant, inertia, inverse


@dataclass(frozen=True)
class FramingMatrix:
    entries: tuple[tuple[int, ...], ...]
    sigma: int
    pi: int
    det: int
    inverse: tuple[tuple[Fraction, ...], ...] | None

    @property
    def size(self) -> int:
        return len(self.entries)

    @property
    def trace(self) -> int:
        return sum(self.entries[i][i] for i in range(self.size))

    @property
    def negative_definite(self) -> bool:
        return self.sigma == -self.size

    @property
    def invertible(self) -> bool:
        return self.det != 0


def framing_data(entries: Sequence[Sequence[int]]) -> FramingMatrix:
    entries = tuple(tuple(int(x) for x in row) for row in entries)
    pos, neg, _ = inertia(entries) if entries else (0, 0, 0)
    det = int(determinant(entries)) if entries else 1
    inv = inverse(entries) if det else None
    return FramingMatrix(entries, pos - neg, pos, det, inv)


@dataclass(frozen=True)
class PlumbingTree:
    vertices: tuple[tuple[int, int], ...]
    edges: tuple[tuple[int, int], ...] = ()
    root: int | None = None

    def __post_init__(self):
        verts = tuple((int(i), int(w)) for i, w in self.vertices)
        edges = tuple(sorted(tuple(sorted((int(a), int(b)))) for a, b in self.edges))
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", edges)
        ids = [i for i, _ in verts]
        if not ids:
            raise UsageError("a plumbing tree needs at least one vertex")
        if len(set(ids)) != len(ids):
            raise UsageError("vertex ids must be unique")
        idset = set(ids)
        if len(set(edges)) != len(edges) or any(a == b or a not in idset or b not in idset for a, b in edges):
            raise UsageError("edges must join distinct existing vertices, without repeats")
        if len(edges) != len(ids) - 1 or not _connected(ids, edges):
            raise UsageError("the plumbing graph must be a tree")
        if self.root is not None and self.root not in idset:
            raise UsageError(f"root {self.root} is not a vertex")

    # -- accessors --

    @cached_property
    def ids(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.vertices)

    @cached_property
    def _weights(self) -> dict[int, int]:
        return dict(self.vertices)

    @cached_property
    def _index(self) -> dict[int, int]:
        return {v: k for k, v in enumerate(self.ids)}

    @cached_property
    def _adjacency(self) -> dict[int, tuple[int, ...]]:
        adj: dict[int, list[int]] = {v: [] for v in self.ids}
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        idx = self._index
        return {v: tuple(sorted(n, key=idx.__getitem__)) for v, n in adj.items()}

    @property
    def size(self) -> int:
        return len(self.vertices)

    def weight(self, v: int) -> int:
        return self._weights[v]

    def index(self, v: int) -> int:
        try:
            return self._index[v]
        except KeyError:
            raise UsageError(f"no vertex with id {v}") from None

    def neighbours(self, v: int) -> tuple[int, ...]:
        return self._adjacency[v]

    def degree(self, v: int) -> int:
        return len(self._adjacency[v])

    def degrees(self) -> tuple[int, ...]:
        return tuple(self.degree(v) for v in self.ids)

    def has_edge(self, a: int, b: int) -> bool:
        return tuple(sorted((a, b))) in set(self.edges)

    @cached_property
    def framing(self) -> FramingMatrix:
        idx = self._index
        s = self.size
        m = [[0] * s for _ in range(s)]
        for v, w in self.vertices:
            m[idx[v]][idx[v]] = w
        for a, b in self.edges:
            m[idx[a]][idx[b]] = m[idx[b]][idx[a]] = 1
        return framing_data(m)

    def fresh_id(self, k: int = 1) -> int:
        return max(self.ids) + k

    # -- rebuilding --

    def replace(self, vertices=None, edges=None, root=...) -> PlumbingTree:
        return PlumbingTree(
            self.vertices if vertices is None else tuple(vertices),
            self.edges if edges is None else tuple(edges),
            self.root if root is ... else root,
        )

    def with_weights(self, changes: dict[int, int]) -> PlumbingTree:
        return self.replace(vertices=[(v, w + changes.get(v, 0)) for v, w in self.vertices])

    def reordered(self, order: Sequence[int]) -> PlumbingTree:
        if sorted(order) != sorted(self.ids):
            raise UsageError("reordering must be a permutation of the vertex ids")
        return self.replace(vertices=[(v, self.weight(v)) for v in order])

    def relabeled(self) -> PlumbingTree:
        """Ids renamed 0..s-1 following vertex order."""
        new = {v: k for k, v in enumerate(self.ids)}
        return PlumbingTree(
            tuple((new[v], w) for v, w in self.vertices),
            tuple((new[a], new[b]) for a, b in self.edges),
            None if self.root is None else new[self.root],
        )

    def with_root(self, root: int | None) -> PlumbingTree:
        return self.replace(root=root)

    def branch(self, v: int, u: int) -> list[int]:
        """Vertices of the component of the tree minus v that contains u."""
        seen = {v, u}
        out = [u]
        stack = [u]
        while stack:
            x = stack.pop()
            for y in self.neighbours(x):
                if y not in seen:
                    seen.add(y)
                    out.append(y)
                    stack.append(y)
        return out

    def path(self, a: int, b: int) -> list[int]:
        prev = {a: None}
        queue = deque([a])
        while queue:
            x = queue.popleft()
            if x == b:
                break
            for y in self.neighbours(x):
                if y not in prev:
                    prev[y] = x
                    queue.append(y)
        out = [b]
        while out[-1] != a:
            out.append(prev[out[-1]])
        return out[::-1]

    # -- serialization --

    def to_json(self) -> dict:
        data = {
            "vertices": [{"id": v, "weight": w} for v, w in self.vertices],
            "edges": [list(e) for e in self.edges],
        }
        if self.root is not None:
            data["root"] = self.root
        return data

    @classmethod
    def from_json(cls, data) -> PlumbingTree:
        if isinstance(data, str):
            data = json.loads(data)
        try:
            verts = [(d["id"], d["weight"]) for d in data["vertices"]]
            edges = [tuple(e) for e in data.get("edges", [])]
        except (KeyError, TypeError) as exc:
            raise UsageError(f"malformed tree JSON: {exc}") from None
        return cls(tuple(verts), tuple(edges), data.get("root"))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def _connected(ids, edges) -> bool:
    adj = {v: [] for v in ids}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    seen = {ids[0]}
    stack = [ids[0]]
    while stack:
        for y in adj[stack.pop()]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == len(ids)


def chain(weights: Iterable[int], root: int | None = None) -> PlumbingTree:
    weights = list(weights)
    return PlumbingTree(tuple(enumerate(weights)), tuple((i, i + 1) for i in range(len(weights) - 1)), root)


def star(center: int, legs: Sequence[Sequence[int]]) -> PlumbingTree:
    """Center vertex 0 followed by each leg listed outward from the center."""
    verts = [(0, center)]
    edges = []
    nxt = 1
    for leg in legs:
        prev = 0
        for w in leg:
            verts.append((nxt, w))
            edges.append((prev, nxt))
            prev = nxt
            nxt += 1
    return PlumbingTree(tuple(verts), tuple(edges))


def canonical_form(tree: PlumbingTree) -> str:
    """Isomorphism invariant of the weighted (rooted) tree, ignoring ids and order."""
    def encode(v, parent):
        kids = sorted(encode(u, v) for u in tree.neighbours(v) if u != parent)
        mark = "*" if v == tree.root else ""
        return f"({tree.weight(v)}{mark}{''.join(kids)})"
    return min(encode(v, None) for v in tree.ids)


def isomorphic(a: PlumbingTree, b: PlumbingTree) -> bool:
    return a.size == b.size and canonical_form(a) == canonical_form(b)


# -- Neumann moves ------------------------------------------------------------

MOVE_KINDS = ("A+", "A-", "B+", "B-", "C")


@dataclass(frozen=True)
class NeumannMove:
    """One move of the plumbing calculus.

    ``contract`` selects the direction (top tree to bottom tree). Locations:
    A expansion ``at=(u, v)`` an edge; A contraction ``at=(v,)`` the +-1 vertex;
    B expansion ``at=(v,)``; B contraction ``at=(leaf,)``; C expansion
    ``at=(v,)`` with ``params=(m1, moved_neighbours)``; C contraction
    ``at=(zero_vertex,)``.
    """

    kind: str
    contract: bool
    at: tuple[int, ...]
    params: tuple = ()

    def __post_init__(self):
        if self.kind not in MOVE_KINDS:
            raise UsageError(f"unknown move kind {self.kind!r}")
        object.__setattr__(self, "at", tuple(self.at))
        need = 2 if self.kind[0] == "A" and not self.contract else 1
        if len(self.at) != need:
            raise UsageError(f"move {self.label} needs {need} location id(s)")

    @property
    def sign(self) -> int:
        return 1 if self.kind.endswith("+") else -1

    @property
    def label(self) -> str:
        return f"{self.kind}{'' if self.contract else '^-1'}"

    def to_json(self) -> dict:
        data = {"kind": self.kind, "contract": self.contract, "at": list(self.at)}
        if self.params:
            data["params"] = [self.params[0], list(self.params[1])]
        return data

    @classmethod
    def from_json(cls, data: dict) -> NeumannMove:
        params = ()
        if data.get("params"):
            params = (int(data["params"][0]), tuple(data["params"][1]))
        return cls(data["kind"], bool(data.get("contract", False)), tuple(data["at"]), params)


def apply_move(tree: PlumbingTree, move: NeumannMove) -> PlumbingTree:
    k = move.kind[0]
    if k == "A":
        return _contract_a(tree, move) if move.contract else _expand_a(tree, move)
    if k == "B":
        return _contract_b(tree, move) if move.contract else _expand_b(tree, move)
    return _contract_c(tree, move) if move.contract else _expand_c(tree, move)


def _fail(msg: str):
    raise MoveInapplicableError(msg)


def _expand_a(tree, move):
    u, v = move.at
    if not tree.has_edge(u, v):
        _fail(f"{move.label}: ({u}, {v}) is not an edge")
    eps = move.sign
    new = tree.fresh_id()
    verts = [(x, w + eps if x in (u, v) else w) for x, w in tree.vertices] + [(new, eps)]
    edges = [e for e in tree.edges if e != tuple(sorted((u, v)))] + [(u, new), (new, v)]
    return tree.replace(vertices=verts, edges=edges)


def _contract_a(tree, move):
    (v,) = move.at
    eps = move.sign
    if tree.weight(v) != eps or tree.degree(v) != 2:
        _fail(f"{move.label}: vertex {v} is not a degree-2 vertex of weight {eps:+d}")
    if v == tree.root:
        _fail(f"{move.label}: the distinguished vertex cannot be removed")
    u1, u2 = tree.neighbours(v)
    verts = [(x, w - eps if x in (u1, u2) else w) for x, w in tree.vertices if x != v]
    edges = [e for e in tree.edges if v not in e] + [(u1, u2)]
    return tree.replace(vertices=verts, edges=edges)


def _expand_b(tree, move):
    (v,) = move.at
    tree.index(v)
    eps = move.sign
    new = tree.fresh_id()
    verts = [(x, w + eps if x == v else w) for x, w in tree.vertices] + [(new, eps)]
    return tree.replace(vertices=verts, edges=list(tree.edges) + [(v, new)])


def _contract_b(tree, move):
    (v,) = move.at
    eps = move.sign
    if tree.weight(v) != eps or tree.degree(v) != 1:
        _fail(f"{move.label}: vertex {v} is not a leaf of weight {eps:+d}")
    if v == tree.root:
        _fail(f"{move.label}: the distinguished vertex cannot be removed")
    (u,) = tree.neighbours(v)
    verts = [(x, w - eps if x == u else w) for x, w in tree.vertices if x != v]
    return tree.replace(vertices=verts, edges=[e for e in tree.edges if v not in e])


def _expand_c(tree, move):
    (v,) = move.at
    if len(move.params) != 2:
        _fail("C expansion needs params (m1, moved_neighbours)")
    m1, moved = move.params
    moved = tuple(moved)
    if any(u not in tree.neighbours(v) for u in moved):
        _fail(f"C^-1: {moved} are not all neighbours of {v}")
    zero, other = tree.fresh_id(1), tree.fresh_id(2)
    verts = [(x, m1 if x == v else w) for x, w in tree.vertices] + [(zero, 0), (other, tree.weight(v) - m1)]
    edges = [e for e in tree.edges if not (v in e and (e[0] in moved or e[1] in moved))]
    edges += [(v, zero), (zero, other)] + [(other, u) for u in moved]
    return tree.replace(vertices=verts, edges=edges)


def _contract_c(tree, move):
    (z,) = move.at
    if tree.weight(z) != 0 or tree.degree(z) != 2:
        _fail(f"C: vertex {z} is not a degree-2 vertex of weight 0")
    if z == tree.root:
        _fail("C: the distinguished vertex cannot be removed")
    u1, u2 = tree.neighbours(z)  # sorted by vertex order
    if u2 == tree.root:
        u1, u2 = u2, u1
    total = tree.weight(u1) + tree.weight(u2)
    verts = [(x, total if x == u1 else w) for x, w in tree.vertices if x not in (z, u2)]
    edges = []
    for a, b in tree.edges:
        if z in (a, b):
            continue
        if u2 in (a, b):
            other = b if a == u2 else a
            edges.append((u1, other))
        else:
            edges.append((a, b))
    return tree.replace(vertices=verts, edges=edges)


def inverse_move(before: PlumbingTree, move: NeumannMove, after: PlumbingTree) -> NeumannMove:
    """A move taking ``after`` back to ``before`` (up to relabelling)."""
    kind = move.kind
    if not move.contract:
        return NeumannMove(kind, True, (before.fresh_id(),))
    (v,) = move.at
    if kind[0] == "A":
        u1, u2 = before.neighbours(v)
        return NeumannMove(kind, False, (u1, u2))
    if kind[0] == "B":
        (u,) = before.neighbours(v)
        return NeumannMove(kind, False, (u,))
    u1, u2 = before.neighbours(v)
    if u2 == before.root:
        u1, u2 = u2, u1
    moved = tuple(x for x in before.neighbours(u2) if x != v)
    return NeumannMove("C", False, (u1,), (before.weight(u1), moved))


# -- contractibility search on degree-2 paths ----------------------------------

@dataclass(frozen=True)
class ChainState:
    weights: tuple[int, ...]
    free_left: bool
    free_right: bool


@dataclass(frozen=True)
class ContractionScript:
    """Chain-level moves that contract a path to one vertex.

    Each step is ``(kind, contract, index, extra)`` acting on the current
    chain (indices count from the path's first terminal).
    """

    path: tuple[int, ...]
    steps: tuple[tuple, ...]
    budget: int


DEFAULT_BUDGET = 6
SEARCH_NODE_CAP = 200_000


def _chain_successors(state: ChainState, budget: int, max_len: int):
    w = list(state.weights)
    n = len(w)
    fl, fr = state.free_left, state.free_right

    def ok(ws):
        return all(abs(x) <= budget for x in ws)

    for i in range(1, n - 1):
        if w[i] in (1, -1):
            e = w[i]
            nw = w[: i - 1] + [w[i - 1] - e, w[i + 1] - e] + w[i + 2:]
            if ok(nw):
                yield ("A+" if e > 0 else "A-", True, i, None), ChainState(tuple(nw), fl, fr)
        if w[i] == 0:
            nw = w[: i - 1] + [w[i - 1] + w[i + 1]] + w[i + 2:]
            if ok(nw):
                yield ("C", True, i, None), ChainState(tuple(nw), fl, fr)
    if n >= 2:
        # removing a free end leaves a free end behind (or a single vertex)
        if fl and w[0] in (1, -1):
            e = w[0]
            nw = [w[1] - e] + w[2:]
            if ok(nw):
                yield ("B+" if e > 0 else "B-", True, 0, None), ChainState(tuple(nw), True, fr)
        if fr and w[-1] in (1, -1):
            e = w[-1]
            nw = w[:-2] + [w[-2] - e]
            if ok(nw):
                yield ("B+" if e > 0 else "B-", True, n - 1, None), ChainState(tuple(nw), fl, True)
    if n + 1 <= max_len:
        for i in range(n - 1):
            for e in (1, -1):
                nw = w[:i] + [w[i] + e, e, w[i + 1] + e] + w[i + 2:]
                if ok(nw):
                    yield ("A+" if e > 0 else "A-", False, i, None), ChainState(tuple(nw), fl, fr)
    if n + 2 <= max_len:
        for i in range(n):
            for m1 in range(-budget, budget + 1):
                m2 = w[i] - m1
                if abs(m2) > budget:
                    continue
                nw = w[:i] + [m1, 0, m2] + w[i + 1:]
                yield ("C", False, i, m1), ChainState(tuple(nw), fl, fr)


def contract_chain(state: ChainState, budget: int, max_len: int | None = None) -> tuple | None:
    """Breadth-first search for a move sequence reducing the chain to one vertex."""
    max_len = len(state.weights) if max_len is None else max_len
    if len(state.weights) == 1:
        return ()
    if any(abs(x) > budget for x in state.weights):
        budget = max(abs(x) for x in state.weights)
    prev = {state: None}
    queue = deque([state])
    while queue:
        cur = queue.popleft()
        for step, nxt in _chain_successors(cur, budget, max_len):
            if nxt in prev:
                continue
            prev[nxt] = (cur, step)
            if len(nxt.weights) == 1:
                steps = []
                node = nxt
                while prev[node] is not None:
                    node, st = prev[node]
                    steps.append(st)
                return tuple(reversed(steps))
            if len(prev) > SEARCH_NODE_CAP:
                return None
            queue.append(nxt)
    return None


def path_state(tree: PlumbingTree, path: Sequence[int]) -> ChainState:
    first, last = path[0], path[-1]
    return ChainState(
        tuple(tree.weight(v) for v in path),
        tree.degree(first) == 1 and first != tree.root,
        tree.degree(last) == 1 and last != tree.root,
    )


def is_degree2_path(tree: PlumbingTree, path: Sequence[int]) -> bool:
    if len(path) < 2:
        return False
    if any(not tree.has_edge(a, b) for a, b in zip(path, path[1:])):
        return False
    return all(tree.degree(v) == 2 for v in path[1:-1])


def contractible_deg2_path(tree: PlumbingTree, v: int, v2: int, budget: int = DEFAULT_BUDGET) -> ContractionScript | None:
    path = tuple(tree.path(v, v2))
    if not is_degree2_path(tree, path):
        raise UsageError(f"the path {v}..{v2} is not a degree-2 path")
    if tree.root is not None and tree.root in path[1:-1]:
        # interior vertices get removed; the distinguished vertex must survive
        return None
    steps = contract_chain(path_state(tree, path), budget)
    if steps is None:
        return None
    script = ContractionScript(path, steps, budget)
    replay_script(tree, script)  # soundness: the script must replay on the tree
    return script


def replay_script(tree: PlumbingTree, script: ContractionScript) -> tuple[PlumbingTree, int]:
    """Apply a chain script to the tree; returns the new tree and the surviving vertex."""
    ids = list(script.path)
    cur = tree
    try:
        for kind, contract, i, extra in script.steps:
            if contract:
                if kind[0] == "A" or kind == "C":
                    cur = apply_move(cur, NeumannMove(kind, True, (ids[i],)))
                    if kind == "C":
                        u1, u2 = ids[i - 1], ids[i + 1]
                        survivor = u1 if u1 in cur.ids else u2
                        ids[i - 1: i + 2] = [survivor]
                    else:
                        del ids[i]
                else:
                    cur = apply_move(cur, NeumannMove(kind, True, (ids[i],)))
                    del ids[i]
            elif kind[0] == "A":
                new = cur.fresh_id()
                cur = apply_move(cur, NeumannMove(kind, False, (ids[i], ids[i + 1])))
                ids.insert(i + 1, new)
            else:
                v = ids[i]
                right = ids[i + 1] if i + 1 < len(ids) else None
                moved = [right] if right is not None else []
                if i == len(ids) - 1:
                    moved += [u for u in cur.neighbours(v) if u not in ids]
                zero, other = cur.fresh_id(1), cur.fresh_id(2)
                cur = apply_move(cur, NeumannMove("C", False, (v,), (extra, tuple(moved))))
                ids[i: i + 1] = [v, zero, other]
    except (MoveInapplicableError, IndexError) as exc:
        raise IntegrityError(f"contraction script does not replay: {exc}") from None
    if len(ids) != 1:
        raise IntegrityError("contraction script did not reach a single vertex")
    return cur, ids[0]


# -- reducedness ----------------------------------------------------------------

@dataclass(frozen=True)
class ReducednessReport:
    reduced: bool
    budget: int
    reducible_vertices: tuple[int, ...] = ()
    note: str = field(default="")

    def to_json(self) -> dict:
        return {
            "reduced": self.reduced,
            "reducible_vertices": list(self.reducible_vertices),
            "annotation": f"reducedness verified up to budget {self.budget}",
        }


def _absorb_branch(tree: PlumbingTree, v: int, u: int, budget: int) -> PlumbingTree | None:
    """Try to contract the branch of ``v`` through neighbour ``u`` into ``v``."""
    cur = tree
    parent, x = v, u
    # simplify sub-branches hanging off the chain, walking outward
    while True:
        kids = [y for y in cur.neighbours(x) if y != parent]
        if len(kids) > 1:
            for y in kids:
                nxt = _absorb_branch(cur, x, y, budget)
                if nxt is not None:
                    cur = nxt
            kids = [y for y in cur.neighbours(x) if y != parent]
            if len(kids) > 1:
                return None
        if not kids:
            break
        parent, x = x, kids[0]
    path = cur.path(v, x)
    state = path_state(cur, path)
    state = ChainState(state.weights, False, x != cur.root)
    if not state.free_right:
        return None
    steps = contract_chain(state, budget)
    if steps is None:
        return None
    new, survivor = replay_script(cur, ContractionScript(tuple(path), steps, budget))
    return new if survivor == v else rename(new, survivor, v)


def rename(tree: PlumbingTree, old: int, new: int) -> PlumbingTree:
    def f(x):
        return new if x == old else x
    return PlumbingTree(
        tuple((f(v), w) for v, w in tree.vertices),
        tuple((f(a), f(b)) for a, b in tree.edges),
        None if tree.root is None else f(tree.root),
    )


def reducible_vertices(tree: PlumbingTree, budget: int = DEFAULT_BUDGET) -> tuple[int, ...]:
    out = []
    for v in tree.ids:
        if tree.degree(v) < 3:
            continue
        cur = tree
        for u in tree.neighbours(v):
            if u not in cur.ids:
                continue
            nxt = _absorb_branch(cur, v, u, budget)
            if nxt is not None and v in nxt.ids:
                cur = nxt
        if cur.degree(v) <= 2:
            out.append(v)
    return tuple(out)


def is_reduced(tree: PlumbingTree, budget: int = DEFAULT_BUDGET) -> bool:
    return not reducible_vertices(tree, budget)


def reducedness(tree: PlumbingTree, budget: int = DEFAULT_BUDGET) -> ReducednessReport:
    bad = reducible_vertices(tree, budget)
    return ReducednessReport(not bad, budget, bad)


# -- gluing and splitting -------------------------------------------------------

def glue_trees(tp: PlumbingTree, tm: PlumbingTree) -> PlumbingTree:
    """Identify the root of ``tp`` (its last vertex) with the root of ``tm`` (its first)."""
    if tp.root is None or tm.root is None:
        raise UsageError("both trees must have a distinguished vertex")
    if tp.ids[-1] != tp.root or tm.ids[0] != tm.root:
        raise UsageError("the left root must be the last vertex and the right root the first")
    m = tp.size
    left = {v: k for k, v in enumerate(tp.ids)}
    right = {v: m - 1 + k for k, v in enumerate(tm.ids)}
    verts = [(left[v], w) for v, w in tp.vertices]
    verts[-1] = (m - 1, tp.weight(tp.root) + tm.weight(tm.root))
    verts += [(right[v], w) for v, w in tm.vertices[1:]]
    edges = [(left[a], left[b]) for a, b in tp.edges] + [(right[a], right[b]) for a, b in tm.edges]
    return PlumbingTree(tuple(verts), tuple(edges))


def glue_matrix(bp: Sequence[Sequence[int]], bm: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    """Block sum overlapping in the last row/column of ``bp`` and the first of ``bm``."""
    m, n = len(bp), len(bm)
    s = m + n - 1
    out = [[0] * s for _ in range(s)]
    for i in range(m):
        for j in range(m):
            out[i][j] += bp[i][j]
    for i in range(n):
        for j in range(n):
            out[m - 1 + i][m - 1 + j] += bm[i][j]
    return tuple(tuple(r) for r in out)


@dataclass(frozen=True)
class SplitLayout:
    tree: PlumbingTree
    v0: int
    ve: int
    star1: int
    star2: int
    part1: tuple[int, ...]
    part2: tuple[int, ...]


def split_tree(t1: PlumbingTree, v1: int, t2: PlumbingTree, v2: int, e: int) -> PlumbingTree:
    return split_layout(t1, v1, t2, v2, e).tree


def split_layout(t1: PlumbingTree, v1: int, t2: PlumbingTree, v2: int, e: int) -> SplitLayout:
    """Build the tree with v0 (weight 0) - ve (weight e) joined to v1 and v2.

    Vertex order: v0, ve, then t1 with v1 first, then t2 with v2 first. Ids
    are renumbered 0..s-1 in that order.
    """
    for t, v in ((t1, v1), (t2, v2)):
        if t.degree(v) != 1:
            raise UsageError(f"vertex {v} must have degree 1 in its tree")
    o1 = [v1] + [v for v in t1.ids if v != v1]
    o2 = [v2] + [v for v in t2.ids if v != v2]
    n1 = {v: 2 + k for k, v in enumerate(o1)}
    n2 = {v: 2 + len(o1) + k for k, v in enumerate(o2)}
    verts = [(0, 0), (1, e)] + [(n1[v], t1.weight(v)) for v in o1] + [(n2[v], t2.weight(v)) for v in o2]
    edges = [(0, 1), (1, n1[v1]), (1, n2[v2])]
    edges += [(n1[a], n1[b]) for a, b in t1.edges] + [(n2[a], n2[b]) for a, b in t2.edges]
    tree = PlumbingTree(tuple(verts), tuple(edges))
    return SplitLayout(tree, 0, 1, n1[v1], n2[v2], tuple(n1[v] for v in o1), tuple(n2[v] for v in o2))


def leaf_first(tree: PlumbingTree, leaf: int) -> PlumbingTree:
    if tree.degree(leaf) != 1 and tree.size > 1:
        raise UsageError(f"vertex {leaf} is not a leaf")
    return tree.reordered([leaf] + [v for v in tree.ids if v != leaf])
