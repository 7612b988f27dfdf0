"""Executable forms of the invariance, gluing and splitting statements.

Each right-hand side is assembled from the series engine with its own
window bookkeeping, so a comparison against the left-hand side is a genuine
check and never a tautology.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import isqrt

from .assignments import WeylAssignment, enumerate_assignments, validate
from .errors import IntegrityError, TruncationError, UsageError
from .lattice import RootLattice, Vec, WeylElement, height, pairing, vadd, vneg, vscale, vsub
from .laurent import Series, Window, add, canonical_text, const_z, mul, sort_key
from .plumbing import NeumannMove, PlumbingTree, apply_move, glue_trees, inverse_move, is_reduced, split_layout
from .series import Tau, Truncation, prefactor, y_closed, y_knot, y_restricted
from .spinc import SpinCRep, delta_hat, same_class, self_pairing, spinc_classes


# -- move transport -----------------------------------------------------------

def _xi_fix_degree2(tree: PlumbingTree, lattice: RootLattice, values: dict) -> WeylAssignment:
    ident = lattice.identity_element
    return WeylAssignment(tree, lattice, tuple(ident if tree.degree(v) == 2 else values[v] for v in tree.ids))


def _flip(a: dict, xi: dict, side, lattice: RootLattice) -> tuple[dict, dict]:
    a, xi = dict(a), dict(xi)
    for x in side:
        a[x] = vneg(a[x])
        xi[x] = lattice.mul(lattice.iota, xi[x])
    return a, xi


def _expand(tree: PlumbingTree, tau: Tau, move: NeumannMove) -> tuple[PlumbingTree, Tau]:
    """R and S for an expansion (bottom tree to top tree)."""
    lattice = tau.lattice
    new = apply_move(tree, move)
    iota = lattice.iota
    two_rho = lattice.weyl_vector_doubled
    zero = (0,) * lattice.rank
    a = {v: tau.a.a[k] for k, v in enumerate(tree.ids)}
    xi = {v: tau.xi.values[k] for k, v in enumerate(tree.ids)}
    kind = move.kind
    if kind in ("A-", "A+"):
        u, v = move.at
        added = new.fresh_id() - 1
        a[added] = zero
        xi[added] = lattice.identity_element
        if kind == "A+":
            # flip the side of v unless that breaks the path conditions
            sides = (tree.branch(u, v), tree.branch(v, u))
            flips = [_flip(a, xi, side, lattice) for side in sides]
            ok = [f for f in flips if validate(_xi_fix_degree2(new, lattice, f[1]))]
            a, xi = (ok or flips)[0]
    elif kind in ("B-", "B+"):
        (v,) = move.at
        leaf = new.fresh_id() - 1
        a[v] = vadd(a[v], two_rho)
        a[leaf] = vneg(two_rho) if kind == "B-" else two_rho
        xi[leaf] = xi[v] if kind == "B-" else lattice.mul(iota, xi[v])
    else:
        (v,) = move.at
        _, moved = move.params
        z0, v2 = new.fresh_id() - 2, new.fresh_id() - 1
        flat = set()
        for u in moved:
            flat.update(tree.branch(v, u))
        a, xi = _flip(a, xi, flat, lattice)
        xi[z0] = lattice.identity_element
        xi[v2] = lattice.mul(iota, xi[v])
        base = dict(a)
        for beta in product((0, 1), repeat=lattice.rank):
            a = dict(base)
            a[v] = vadd(base[v], beta)
            a[z0] = zero
            a[v2] = tuple(beta)
            try:
                rep = SpinCRep(new, lattice, tuple(a[x] for x in new.ids))
                break
            except UsageError:
                continue
        else:
            raise IntegrityError("no beta puts the transported representative in the delta coset")
        return new, Tau(lattice, rep, _xi_fix_degree2(new, lattice, xi))
    rep = SpinCRep(new, lattice, tuple(a[x] for x in new.ids))
    return new, Tau(lattice, rep, _xi_fix_degree2(new, lattice, xi))


def _relabel_to(expanded: PlumbingTree, target: PlumbingTree, mapping: dict) -> tuple[list[int], PlumbingTree]:
    """Rename ``expanded`` by ``mapping`` and order like ``target``; check they agree."""
    ren = PlumbingTree(
        tuple((mapping.get(v, v), w) for v, w in expanded.vertices),
        tuple((mapping.get(a, a), mapping.get(b, b)) for a, b in expanded.edges),
        expanded.root,
    ).reordered(list(target.ids))
    if sorted(ren.vertices) != sorted(target.vertices) or {frozenset(e) for e in ren.edges} != {frozenset(e) for e in target.edges}:
        raise IntegrityError("inverse move does not reproduce the original tree")
    return list(target.ids), ren


def transport(tree: PlumbingTree, tau: Tau, move: NeumannMove, check_reduced: bool = True) -> tuple[PlumbingTree, Tau]:
    """Carry tau across a Neumann move.

    Expansions use the explicit R/S maps. Contractions pick the unique class
    and assignment on the smaller tree whose transport is (tree, tau).
    """
    if tau.tree != tree:
        raise UsageError("tau refers to a different tree")
    target = apply_move(tree, move)
    if check_reduced:
        for t in (tree, target):
            if not is_reduced(t):
                raise UsageError("transport is defined between reduced trees")
    if not move.contract:
        return _expand(tree, tau, move)
    back = inverse_move(tree, move, target)
    lattice = tau.lattice
    probe = apply_move(target, back)
    fresh = [probe.fresh_id() - 2, probe.fresh_id() - 1] if move.kind == "C" else [probe.fresh_id() - 1]
    (removed,) = move.at
    if move.kind == "C":
        u1, u2 = tree.neighbours(removed)
        if u2 == tree.root:
            u1, u2 = u2, u1
        mapping = {fresh[0]: removed, fresh[1]: u2}
    else:
        mapping = {fresh[0]: removed}
    _relabel_to(probe, tree, mapping)

    def pushed(a_small, xi_small):
        big, t2 = _expand(target, Tau(lattice, a_small, xi_small), back)
        pos = {mapping.get(v, v): k for k, v in enumerate(big.ids)}
        a_big = tuple(t2.a.a[pos[v]] for v in tree.ids)
        xi_big = tuple(t2.xi.values[pos[v]] for v in tree.ids)
        return a_big, xi_big

    ident = WeylAssignment(target, lattice, (lattice.identity_element,) * target.size)
    found_a = None
    for cls in spinc_classes(target, lattice):
        a_big, _ = pushed(cls, ident)
        if same_class(SpinCRep(tree, lattice, a_big), tau.a):
            found_a = cls
            break
    if found_a is None:
        raise IntegrityError("no Spin^c class on the contracted tree maps to the given class")
    want = tuple(x.matrix for x in tau.xi.values)
    for xi_small in enumerate_assignments(target, lattice, check_reduced=check_reduced):
        _, xi_big = pushed(found_a, xi_small)
        if tuple(x.matrix for x in xi_big) == want:
            return target, Tau(lattice, found_a, xi_small)
    raise IntegrityError("no Weyl assignment on the contracted tree maps to the given assignment")


# -- comparison ---------------------------------------------------------------

@dataclass(frozen=True)
class Comparison:
    verdict: str
    window: Window
    first_diff: tuple | None = None

    @property
    def equal(self) -> bool:
        return self.verdict == "equal"

    def to_json(self) -> dict:
        out = {"verdict": self.verdict, "window": self.window.to_json()}
        if self.first_diff is not None:
            key, ca, cb = self.first_diff
            out["first_diff"] = {"q": str(key[0]), "t": list(key[1]), "z": list(key[2]), "left": ca, "right": cb}
        return out


def compare(a: Series, b: Series) -> Comparison:
    """Equality on the intersection of the certified windows."""
    if a.rank != b.rank:
        raise UsageError("rank mismatch")
    try:
        w = a.window.intersect(b.window)
    except TruncationError:
        return Comparison("inconclusive", Window())
    if w.is_empty:
        return Comparison("inconclusive", w)
    keys = {k for k in a.terms if w.contains(k)} | {k for k in b.terms if w.contains(k)}
    for k in sorted(keys, key=sort_key):
        ca, cb = a.terms.get(k, 0), b.terms.get(k, 0)
        if ca != cb:
            return Comparison("unequal", w, (k, ca, cb))
    return Comparison("equal", w)


def describe_diff(c: Comparison, rank: int) -> str:
    if c.first_diff is None:
        return c.verdict
    key, ca, cb = c.first_diff
    mono = canonical_text(Series(rank, {key: 1}), factor=False)
    return f"{c.verdict}: {mono} has coefficient {ca} vs {cb}"


# -- gluing -------------------------------------------------------------------

def split_rep(a: SpinCRep, tp: PlumbingTree, tm: PlumbingTree) -> tuple[SpinCRep, SpinCRep]:
    """Relative representatives with a = a+ * a-, taking a+ at the root equal to delta-hat."""
    m = tp.size
    lattice = a.lattice
    root_plus = delta_hat(tp, lattice)[-1]
    ap = tuple(a.a[: m - 1]) + (root_plus,)
    am = (vsub(a.a[m - 1], root_plus),) + tuple(a.a[m:])
    return SpinCRep(tp, lattice, ap, True), SpinCRep(tm, lattice, am, True)


def _restrict_xi(xi: WeylAssignment, tree: PlumbingTree, lo: int, hi: int) -> WeylAssignment:
    return WeylAssignment(tree, xi.lattice, tuple(xi.values[lo:hi]))


def gluing_square(glued: PlumbingTree, tp: PlumbingTree, tm: PlumbingTree, a: SpinCRep, ap: SpinCRep, am: SpinCRep) -> Fraction:
    lattice = a.lattice
    rr = lattice.rho_squared
    s = Fraction(3, 2) * (glued.framing.sigma - tp.framing.sigma - tm.framing.sigma) * rr
    return (s - self_pairing(glued, lattice, a.a) / 8 + self_pairing(tp, lattice, ap.a) / 8
            + self_pairing(tm, lattice, am.a) / 8)


def gluing_triangle(glued: PlumbingTree, tp: PlumbingTree, tm: PlumbingTree, lattice: RootLattice) -> int:
    return lattice.num_positive_roots * (glued.framing.pi - tp.framing.pi - tm.framing.pi)


def _gamma_box(tree: PlumbingTree, lattice: RootLattice, col: int, radius: Fraction, rep) -> list[tuple[int, int]]:
    """Range of gamma_i from one side: |gamma_i + (B^-1 a)_{col,i}/2| <= sqrt(R (-B^-1)_cc C^-1_ii)/2."""
    inv = tree.framing.inverse
    cinv = lattice.cartan_inverse
    out = []
    for i in range(lattice.rank):
        centre = -sum(inv[col][u] * rep[u][i] for u in range(tree.size)) / 2
        bound = radius * (-inv[col][col]) * cinv[i][i] / 4
        rad = isqrt(int(bound)) + 1  # integer envelope of the square root
        out.append((int(centre // 1) - rad, -int(-centre // 1) + rad))
    return out


@dataclass(frozen=True)
class GluingReport:
    series: Series
    gamma_box: tuple[tuple[int, int], ...]
    triangle: int
    square: Fraction


def gluing_rhs(tp: PlumbingTree, tm: PlumbingTree, ap: SpinCRep, am: SpinCRep, xi: WeylAssignment,
               tr: Truncation, mutate_gamma_zero: bool = False) -> GluingReport:
    """(-1)^tri q^sq sum_gamma [Y+_gamma(z) Y-_gamma(z)]_0 on the window q < tr.q_max."""
    lattice = ap.lattice
    glued = glue_trees(tp, tm)
    if xi.tree != glued:
        raise UsageError("the Weyl assignment must live on the glued tree")
    for t in (tp, tm):
        if t.degree(t.root) > 1:
            raise UsageError("roots of degree at most one keep the z-series finite")
    a = SpinCRep(glued, lattice, _star(ap.a, am.a))
    m = tp.size
    xp = _restrict_xi(xi, tp, 0, m)
    xm = _restrict_xi(xi, tm, m - 1, glued.size)
    tri = gluing_triangle(glued, tp, tm, lattice)
    sq = gluing_square(glued, tp, tm, a, ap, am)
    sign = -1 if tri % 2 else 1
    fp, fm = prefactor(tp, lattice)[1], prefactor(tm, lattice)[1]

    finite = all(t.degree(v) <= 2 for t in (tp, tm) for v in t.ids if v != t.root)
    if tr.q_max is None:
        raise UsageError("gluing needs a q window")
    target = tr.q_max - sq
    if not finite and not (tp.framing.negative_definite and tm.framing.negative_definite):
        raise TruncationError("gluing windows need negative definite pieces or finite supports")

    if tp.framing.negative_definite and tm.framing.negative_definite:
        radius = 8 * (target - fp - fm)
        box_p = _gamma_box(tp, lattice, m - 1, max(radius, Fraction(0)), ap.a)
        box_m = _gamma_box(tm, lattice, 0, max(radius, Fraction(0)), am.a)
        box = tuple((max(x[0], y[0]), min(x[1], y[1])) for x, y in zip(box_p, box_m))
        qp = target - fm
        qm = target - fp
    else:
        box = _finite_gamma_box(glued, lattice, a, m - 1)
        qp = qm = None
    if tr.gamma_height is not None:
        need = max((max(abs(lo), abs(hi)) for lo, hi in box), default=0)
        if tr.gamma_height < need:
            raise TruncationError(f"gamma cap {tr.gamma_height} is below the certified need {need}")
    if mutate_gamma_zero:
        box = tuple((0, 0) for _ in box)

    total = Series.zero(lattice.rank)
    for gamma in product(*[range(lo, hi + 1) for lo, hi in box]):
        bp = _shift_col(ap, m - 1, gamma)
        bm = _shift_col(am, 0, gamma)
        sub = Truncation(q_max=qp, kostant_depth=tr.kostant_depth, check_reduced=False)
        sub_m = Truncation(q_max=qm, kostant_depth=tr.kostant_depth, check_reduced=False)
        yp = y_knot(tp, Tau(lattice, bp, xp), sub)
        ym = y_knot(tm, Tau(lattice, bm, xm), sub_m)
        total = add(total, const_z(mul(yp, ym)))
    out = total.shift(sign, q=sq).restrict(Window(q_max=tr.q_max))
    return GluingReport(out, box, tri, sq)


def _star(ap, am):
    return tuple(ap[:-1]) + (vadd(ap[-1], am[0]),) + tuple(am[1:])


def _shift_col(x: SpinCRep, col: int, gamma) -> SpinCRep:
    b = x.tree.framing.entries
    a = tuple(vadd(v, vscale(2 * b[k][col], gamma)) for k, v in enumerate(x.a))
    return SpinCRep(x.tree, x.lattice, a, True)


def _finite_gamma_box(glued: PlumbingTree, lattice: RootLattice, a: SpinCRep, col: int):
    """gamma = v_col with v = B^-1(ell - a)/2 and ell in the finite vertex supports."""
    inv = glued.framing.inverse
    two_rho = lattice.weyl_vector_doubled
    out = []
    for i in range(lattice.rank):
        # |ell_{u,i}| <= 2 |2rho_i| covers the supports of D^2, D and 1
        span = sum(abs(inv[col][u]) * (2 * abs(two_rho[i]) + abs(a.a[u][i])) for u in range(glued.size)) / 2
        out.append((-int(span) - 1, int(span) + 1))
    return tuple(out)


def gluing_lhs(tp: PlumbingTree, tm: PlumbingTree, a: SpinCRep, xi: WeylAssignment, tr: Truncation) -> Series:
    glued = glue_trees(tp, tm)
    return y_closed(glued, Tau(a.lattice, a, xi), tr)


# -- splitting ----------------------------------------------------------------

@dataclass(frozen=True)
class SplitData:
    tree: PlumbingTree
    tau: Tau
    tree1: PlumbingTree
    tree2: PlumbingTree
    tau1: Tau
    tau2: Tau
    x: WeylElement
    xi_v0: WeylElement


def split_data(t1: PlumbingTree, v1: int, t2: PlumbingTree, v2: int, e: int, tau_circ: Tau) -> SplitData:
    """Induced tuples on the two pieces.

    The representative is first moved within its class so that its v0 entry
    is -2 rho; the pieces then read off (a_* + 2 rho, a_sharp).
    """
    lay = split_layout(t1, v1, t2, v2, e)
    tree = lay.tree
    if tau_circ.tree != tree:
        raise UsageError("tau must live on the split tree (see split_layout)")
    lattice = tau_circ.lattice
    two_rho = lattice.weyl_vector_doubled
    a = [tuple(v) for v in tau_circ.a.a]
    # column of v_e is e_{v0} + e * e_{ve} + e_{*1} + e_{*2}; adding 2 y B_{ve} fixes the v0 entry
    diff = vsub(vneg(two_rho), a[0])
    if any(c % 2 for c in diff):
        raise IntegrityError("v0 entry has the wrong parity")
    y = tuple(c // 2 for c in diff)
    b = tree.framing.entries
    a = [vadd(v, vscale(2 * b[k][1], y)) for k, v in enumerate(a)]
    rel1 = [tree.index(v) for v in lay.part1]
    rel2 = [tree.index(v) for v in lay.part2]
    o1 = [v1] + [v for v in t1.ids if v != v1]
    o2 = [v2] + [v for v in t2.ids if v != v2]
    p1 = t1.reordered(o1)
    p2 = t2.reordered(o2)
    a1 = [vadd(a[rel1[0]], two_rho)] + [a[k] for k in rel1[1:]]
    a2 = [vadd(a[rel2[0]], two_rho)] + [a[k] for k in rel2[1:]]
    xi = tau_circ.xi
    vals1 = [xi.values[k] for k in rel1]
    vals2 = [xi.values[k] for k in rel2]
    # the value at v*_i is forced to agree with its neighbour in Gamma_i
    nb1 = p1.neighbours(v1)
    nb2 = p2.neighbours(v2)
    if nb1:
        vals1[0] = vals1[o1.index(nb1[0])]
    if nb2:
        vals2[0] = vals2[o2.index(nb2[0])]
    tau1 = Tau(lattice, SpinCRep(p1, lattice, tuple(a1)), WeylAssignment(p1, lattice, tuple(vals1)))
    tau2 = Tau(lattice, SpinCRep(p2, lattice, tuple(a2)), WeylAssignment(p2, lattice, tuple(vals2)))
    tau_n = Tau(lattice, SpinCRep(tree, lattice, tuple(a)), xi)
    return SplitData(tree, tau_n, p1, p2, tau1, tau2, xi.values[1], xi.values[0])


def _alpha_factor(lattice: RootLattice, w: WeylElement, x: WeylElement, shift_t: Vec, t_min: int | None) -> Series:
    """sum_alpha (-1)^{l(xw)} k(alpha) q^{-<w rho, x(rho + alpha)>} t^{shift - 2rho - 2alpha}."""
    two_rho = lattice.weyl_vector_doubled
    top = height(shift_t) - height(two_rho)
    if t_min is None:
        raise UsageError("the alpha sum needs a t-height bound")
    cap = max(-1, (top - t_min) // 2)
    table = lattice.kostant_table((max(cap, 0),) * lattice.rank)
    sign = lattice.mul(x, w).sign
    wr = w.act(two_rho)
    terms = {}
    zero = (0,) * lattice.rank
    for alpha, k in table.items():
        if not k or height(alpha) > cap:
            continue
        rho_alpha = vadd(two_rho, vscale(2, alpha))
        q = -pairing(lattice, wr, x.act(rho_alpha), doubled=True)
        t = vsub(shift_t, rho_alpha)
        key = (q, t, zero)
        terms[key] = terms.get(key, 0) + sign * k
    return Series(lattice.rank, {k: v for k, v in terms.items() if v},
                  Window(t_height_min=t_min, t_ceiling=top))


def splitting_rhs(data: SplitData, t_min: int, drop_r_factor: bool = False, kostant_depth: int | None = None) -> Series:
    """The right-hand side in its proved form with x = xi(v_e), complete for t-height >= t_min."""
    lattice = data.tau.lattice
    x = data.x
    x0_inv = lattice.inverse(data.xi_v0)
    s1_inv = lattice.inverse(data.tau1.xi.values[0])
    s2_inv = lattice.inverse(data.tau2.xi.values[0])
    two_rho = lattice.weyl_vector_doubled
    total = None
    for w in lattice.weyl_elements():
        wr = w.act(two_rho)
        shift = vneg(vadd(vadd(x0_inv.act(wr), s1_inv.act(wr)), s2_inv.act(wr)))
        d_top = height(shift) - height(two_rho)
        c1 = _restricted_ceiling(data.tree1, data.tau1, w)
        c2 = _restricted_ceiling(data.tree2, data.tau2, w)
        top_r = 0 if drop_r_factor else d_top
        y1 = y_restricted(data.tree1, data.tau1, w, Truncation(t_height_min=t_min - c2 - top_r, kostant_depth=kostant_depth))
        y2 = y_restricted(data.tree2, data.tau2, w, Truncation(t_height_min=t_min - c1 - top_r, kostant_depth=kostant_depth))
        prod = mul(y1, y2)
        if not drop_r_factor:
            prod = mul(prod, _alpha_factor(lattice, w, x, shift, t_min - c1 - c2))
        total = prod if total is None else add(total, prod)
    return total.restrict(Window(t_height_min=t_min))


def _restricted_ceiling(tree: PlumbingTree, tau: Tau, w: WeylElement) -> int:
    from .series import closed_plan
    _, _, cert = closed_plan(tree, tau, Truncation(t_height_min=0, check_reduced=False),
                             fixed={0: w.act(tau.lattice.weyl_vector_doubled)})
    return cert.t_ceiling


def weyl_sign_identity(lattice: RootLattice) -> bool:
    """(-1)^{l(iota w)} = (-1)^{|D+|} (-1)^{l(w)} for all w."""
    iota = lattice.iota
    p = lattice.num_positive_roots
    return all(lattice.mul(iota, w).sign == (-1) ** p * w.sign for w in lattice.weyl_elements())
