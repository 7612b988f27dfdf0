"""The invariant series Y_tau(q,t), Y_tau(q,t,z) and restricted series Y^w.

Candidates ``ell`` are assembled from per-vertex supports of the Kostant
collection and filtered by lattice membership. Completeness is certified
either by an ellipsoid bound on the q-exponent (negative definite framing
matrix) or by a cone bound on the t-height (any invertible framing matrix).
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from typing import Sequence

from .assignments import WeylAssignment
from .errors import TruncationError, UnsupportedManifoldError, UsageError
from .kostant import collection_window_height, kostant_collection, required_depth
from .lattice import RootLattice, Vec, WeylElement, height, mat_vec, vadd, vneg, vscale, vsub
from .laurent import Series, Window
from .laurent import specialize_t1 as _specialize
from .linalg import determinant, inverse
from .plumbing import PlumbingTree, is_reduced
from .spinc import SpinCRep, self_pairing


@dataclass(frozen=True)
class Tau:
    lattice: RootLattice
    a: SpinCRep
    xi: WeylAssignment

    def __post_init__(self):
        if self.a.tree != self.xi.tree:
            raise UsageError("Spin^c representative and Weyl assignment live on different trees")
        if self.a.lattice != self.lattice or self.xi.lattice != self.lattice:
            raise UsageError("lattice mismatch inside tau")

    @property
    def tree(self) -> PlumbingTree:
        return self.a.tree

    def act(self, w: WeylElement) -> Tau:
        """w . tau = (Q, w(a), w(xi))."""
        a = SpinCRep(self.tree, self.lattice, tuple(w.act(v) for v in self.a.a), self.a.relative)
        return Tau(self.lattice, a, self.xi.conjugate(w))


@dataclass(frozen=True)
class Truncation:
    """What to compute and how far.

    ``q_max`` is absolute (terms with q-exponent < q_max are certified).
    ``kostant_depth`` is derived from the window when left as ``None``; an
    explicit value that is too small for the window raises.
    """

    q_max: Fraction | None = None
    t_height_min: int | None = None
    kostant_depth: int | None = None
    gamma_height: int | None = None
    workers: int = 1
    check_reduced: bool = True

    def __post_init__(self):
        if self.q_max is not None:
            object.__setattr__(self, "q_max", Fraction(self.q_max))
        for name in ("kostant_depth", "gamma_height"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise UsageError(f"{name} must be non-negative")
        if self.workers < 1:
            raise UsageError("workers must be positive")


@dataclass
class Certificate:
    """Machine-readable justification of a reported window."""

    mode: str
    prefactor_q: Fraction
    radius: Fraction | None = None
    coordinate_bounds: dict = field(default_factory=dict)
    depths: dict = field(default_factory=dict)
    t_ceiling: int | None = None
    vertex_t_floor: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"mode": self.mode, "prefactor_q": str(self.prefactor_q), "depths": {str(k): v for k, v in self.depths.items()}}
        if self.radius is not None:
            out["ellipsoid_radius"] = str(self.radius)
            out["coordinate_bounds"] = {str(k): list(v) for k, v in self.coordinate_bounds.items()}
        if self.t_ceiling is not None:
            out["t_ceiling"] = self.t_ceiling
            out["vertex_t_floor"] = {str(k): v for k, v in self.vertex_t_floor.items()}
        return out


# -- pointwise pieces ---------------------------------------------------------

def t_exponent(xi: WeylAssignment, ell: Sequence[Vec]) -> Vec:
    """xi^{-1}(ell) = sum_v xi_v^{-1}(ell_v)."""
    lattice = xi.lattice
    out = (0,) * lattice.rank
    for x, v in zip(xi.values, ell):
        out = vadd(out, lattice.inverse(x).act(v))
    return out


def coefficient_c(tree: PlumbingTree, xi: WeylAssignment, ell: Sequence[Vec], depth: int) -> int:
    """prod_v [K_{xi_v, deg v}]_{ell_v}."""
    out = 1
    for v, x, lv in zip(tree.ids, xi.values, ell):
        k = kostant_collection(xi.lattice, x, tree.degree(v), depth)
        lv = tuple(lv)
        if not k.window.contains((Fraction(0), (0,) * xi.lattice.rank, lv)):
            raise TruncationError(f"coefficient at vertex {v} lies outside the certified Kostant window")
        out *= k.coefficient(z=lv)
        if not out:
            return 0
    return out


def prefactor(tree: PlumbingTree, lattice: RootLattice) -> tuple[int, Fraction]:
    """Sign and q-power (-1)^{|D+| pi} q^{(3 sigma - tr B)<rho,rho>/2}."""
    f = tree.framing
    sign = -1 if (lattice.num_positive_roots * f.pi) % 2 else 1
    return sign, Fraction(3 * f.sigma - f.trace, 2) * lattice.rho_squared


# -- enumeration plan ---------------------------------------------------------

@dataclass
class _Plan:
    rank: int
    order: list[int]                 # tree indices enumerated from supports
    supports: list[list[tuple]]      # per order entry: (ell, coeff, member_contrib, t_contrib, C ell)
    adj: list[list[int]]             # adjugate of the enumerated block
    modulus: int                     # 2 |det| of that block
    sign: int
    pref: Fraction
    cartan: tuple
    # closed: the quadratic form uses adj directly; knot: extra data
    det: int = 1
    knot: dict | None = None
    q_max: Fraction | None = None
    t_min: int | None = None


def _support(lattice: RootLattice, x: WeylElement, n: int, depth: int) -> list[tuple[Vec, int]]:
    s = kostant_collection(lattice, x, n, depth)
    return sorted((z, c) for (_, _, z), c in s.terms.items())


def _twisted_height(lattice: RootLattice, x: WeylElement, v: Vec) -> int:
    return height(lattice.inverse(x).act(v))


def _box_bounds(tree: PlumbingTree, lattice: RootLattice, radius: Fraction) -> dict[int, tuple[int, ...]]:
    b = tree.framing.entries
    cinv = lattice.cartan_inverse
    out = {}
    for k, v in enumerate(tree.ids):
        out[k] = tuple(isqrt(max(0, int(radius * (-b[k][k]) * cinv[i][i]))) for i in range(lattice.rank))
    return out


def _min_twisted_height_on_box(lattice: RootLattice, x: WeylElement, bounds: Vec) -> int:
    m = lattice.inverse(x).matrix
    r = lattice.rank
    return -sum(abs(sum(m[j][i] for j in range(r))) * bounds[i] for i in range(r))


def _vertex_candidates(tree, lattice, xi, k, depth_of, box, t_floor):
    v = tree.ids[k]
    x = xi.values[k]
    n = tree.degree(v)
    out = []
    for ell, c in _support(lattice, x, n, depth_of(k)):
        if box is not None and any(abs(e) > b for e, b in zip(ell, box[k])):
            continue
        if t_floor is not None and _twisted_height(lattice, x, ell) < t_floor[k]:
            continue
        out.append((ell, c))
    return out


def _prepare(tree: PlumbingTree, tau: Tau, tr: Truncation, knot: bool, fixed: dict[int, Vec] | None = None):
    """Build the enumeration plan together with its window and certificate."""
    lattice = tau.lattice
    xi = tau.xi
    f = tree.framing
    if f.det == 0:
        raise UnsupportedManifoldError("framing matrix is singular")
    if tr.check_reduced and not is_reduced(tree):
        raise UsageError("tree is not reduced")
    sign, pref = prefactor(tree, lattice)
    r = lattice.rank
    root_k = tree.index(tree.root) if knot else None
    enum = [k for k in range(tree.size) if k != root_k]
    infinite = [k for k in enum if tree.degree(tree.ids[k]) >= 3 and not (fixed and k in fixed)]

    box = None
    t_floor = None
    depths: dict[int, int] = {}
    cert = Certificate(mode="exact", prefactor_q=pref)
    window = Window()

    if infinite or tr.q_max is not None or tr.t_height_min is not None:
        use_q = tr.q_max is not None and f.negative_definite
        if infinite and not use_q and tr.t_height_min is None:
            if tr.q_max is not None:
                raise TruncationError("a q-window needs a negative definite framing matrix; give a t-height bound")
            raise UsageError("an infinite series needs q_max or t_height_min")
        if knot and infinite and not use_q:
            raise TruncationError("knot series with degree >= 3 vertices need a negative definite q-window")
        if use_q:
            radius = 8 * (tr.q_max - pref)
            box = _box_bounds(tree, lattice, max(radius, Fraction(0)))
            cert.mode = "q-ellipsoid"
            cert.radius = radius
            cert.coordinate_bounds = {tree.ids[k]: box[k] for k in enum}
            window = Window(q_max=tr.q_max, q_floor=pref)
            for k in infinite:
                h = _min_twisted_height_on_box(lattice, xi.values[k], box[k])
                depths[k] = required_depth(lattice, tree.degree(tree.ids[k]), h)
        if tr.t_height_min is not None and not knot:
            ceilings = {}
            for k in enum:
                x = xi.values[k]
                n = tree.degree(tree.ids[k])
                if fixed and k in fixed:
                    ceilings[k] = _twisted_height(lattice, x, fixed[k])
                elif n >= 3:
                    ceilings[k] = -(n - 2) * height(lattice.weyl_vector_doubled)
                else:
                    ceilings[k] = max(_twisted_height(lattice, x, e) for e, _ in _support(lattice, x, n, 0))
            total = sum(ceilings.values())
            t_floor = {k: tr.t_height_min - (total - ceilings[k]) for k in enum}
            for k in infinite:
                need = required_depth(lattice, tree.degree(tree.ids[k]), t_floor[k])
                depths[k] = min(depths.get(k, need), need) if use_q else need
            cert.mode = "q-ellipsoid+t-cone" if use_q else "t-cone"
            cert.t_ceiling = total
            cert.vertex_t_floor = {tree.ids[k]: t_floor[k] for k in enum}
            window = window.intersect(Window(t_height_min=tr.t_height_min))
            window = Window(q_max=window.q_max, t_height_min=window.t_height_min, q_floor=pref if use_q else None, t_ceiling=total)
        if not infinite and not use_q and tr.t_height_min is None:
            # finite series; q_max only narrows the report
            window = Window(q_max=tr.q_max)
            cert.mode = "exact"

    if tr.kostant_depth is not None:
        for k in infinite:
            if tr.kostant_depth < depths[k]:
                raise TruncationError(
                    f"Kostant depth {tr.kostant_depth} does not certify the window at vertex {tree.ids[k]} "
                    f"(needs {depths[k]})")
            depths[k] = tr.kostant_depth
    cert.depths = {tree.ids[k]: d for k, d in depths.items()}

    # per-vertex candidates
    def depth_of(k):
        return depths.get(k, 0)

    cands = {}
    for k in enum:
        if fixed and k in fixed:
            x = xi.values[k]
            s = kostant_collection(lattice, x, tree.degree(tree.ids[k]), 0)
            ell = tuple(fixed[k])
            c = s.coefficient(z=ell)
            cands[k] = [(ell, c)] if c else []
        else:
            cands[k] = _vertex_candidates(tree, lattice, xi, k, depth_of, box, t_floor)
        if infinite and k in infinite:
            low = collection_window_height(lattice, tree.degree(tree.ids[k]), depth_of(k))
            for ell, _ in cands[k]:
                if _twisted_height(lattice, xi.values[k], ell) < low:
                    raise TruncationError("candidate outside the certified Kostant window")

    b = f.entries
    sub = [[b[i][j] for j in enum] for i in enum]
    det = int(determinant(sub)) if sub else 1
    if det == 0:
        raise UnsupportedManifoldError("the framing block without the root is singular")
    inv = inverse(sub) if sub else []
    adj = [[int(inv[i][j] * det) for j in range(len(enum))] for i in range(len(enum))]
    a = tau.a.a
    cartan = lattice.cartan
    supports = []
    for col, k in enumerate(enum):
        rows = []
        x_inv = lattice.inverse(xi.values[k])
        for ell, c in cands[k]:
            d = vsub(ell, a[k])
            contrib = tuple(adj[row][col] * d[i] for row in range(len(enum)) for i in range(r))
            rows.append((ell, c, contrib, x_inv.act(ell), mat_vec(cartan, ell)))
        supports.append(rows)

    knot_data = None
    if knot:
        knot_data = {
            "root": root_k,
            "a_root": a[root_k],
            "b_root": [b[root_k][j] for j in enum],
            "x_inv_root": lattice.inverse(xi.values[root_k]).matrix,
            "full_inv": f.inverse,
            "enum": enum,
        }
    plan = _Plan(
        rank=r, order=enum, supports=supports, adj=adj, modulus=2 * abs(det), sign=sign, pref=pref,
        cartan=cartan, det=det, knot=knot_data, q_max=window.q_max, t_min=window.t_height_min,
    )
    return plan, window, cert


# -- enumeration --------------------------------------------------------------

def _run(plan: _Plan, first: Sequence[int] | None = None) -> dict:
    """DFS over the product of supports; ``first`` restricts the first factor."""
    n = len(plan.order)
    r = plan.rank
    out: dict = {}
    zero_r = (0,) * r
    width = n * r
    mod = plan.modulus
    supports = list(plan.supports)
    if first is not None and n:
        supports[0] = [supports[0][i] for i in first]

    chosen: list = [None] * n

    def finish(member, tsum, coeff):
        if any(m % mod for m in member):
            return
        if plan.knot is None:
            quad = 0
            for i in range(n):
                li, _, _, _, cli = chosen[i]
                for j in range(n):
                    a = plan.adj[i][j]
                    if a:
                        quad += a * sum(x * y for x, y in zip(chosen[j][0], cli))
            q = plan.pref - Fraction(quad, 8 * plan.det)
            key = (q, tsum, zero_r)
        else:
            kd = plan.knot
            v = [tuple(member[row * r + i] // mod * (1 if plan.det > 0 else -1) for i in range(r)) for row in range(n)]
            ell_root = kd["a_root"]
            for coef, vv in zip(kd["b_root"], v):
                if coef:
                    ell_root = vadd(ell_root, vscale(2 * coef, vv))
            ell = [None] * (n + 1)
            for pos, k in enumerate(kd["enum"]):
                ell[k] = chosen[pos][0]
            ell[kd["root"]] = ell_root
            quad = Fraction(0)
            inv = kd["full_inv"]
            cl = [mat_vec(plan.cartan, e) for e in ell]
            for i in range(n + 1):
                for j in range(n + 1):
                    if inv[i][j]:
                        quad += inv[i][j] * sum(x * y for x, y in zip(ell[i], cl[j]))
            q = plan.pref - quad / 8
            t = vadd(tsum, mat_vec(kd["x_inv_root"], ell_root))
            key = (q, t, vneg(ell_root))
        if plan.q_max is not None and key[0] >= plan.q_max:
            return
        if plan.t_min is not None and sum(key[1]) < plan.t_min:
            return
        out[key] = out.get(key, 0) + plan.sign * coeff

    def rec(pos, member, tsum, coeff):
        if pos == n:
            finish(member, tsum, coeff)
            return
        for cand in supports[pos]:
            ell, c, contrib, tv, _ = cand
            chosen[pos] = cand
            rec(pos + 1, tuple(m + d for m, d in zip(member, contrib)), vadd(tsum, tv), coeff * c)

    rec(0, (0,) * width, zero_r, 1)
    return {k: v for k, v in out.items() if v}


def _execute(plan: _Plan, workers: int) -> dict:
    if workers <= 1 or not plan.order or len(plan.supports[0]) < 2:
        return _run(plan)
    size = len(plan.supports[0])
    chunks = [list(range(i, size, workers)) for i in range(min(workers, size))]
    with ProcessPoolExecutor(max_workers=len(chunks)) as pool:
        parts = list(pool.map(_run, [plan] * len(chunks), chunks))
    merged: dict = {}
    for part in parts:
        for k, v in part.items():
            merged[k] = merged.get(k, 0) + v
    return {k: v for k, v in merged.items() if v}


# -- public series ------------------------------------------------------------

def _check_tau(tree: PlumbingTree, tau: Tau, relative: bool):
    if tau.tree != tree:
        raise UsageError("tau refers to a different tree")
    if tau.a.relative != relative:
        raise UsageError("relative representative expected" if relative else "closed representative expected")


def closed_plan(tree: PlumbingTree, tau: Tau, tr: Truncation, fixed: dict[int, Vec] | None = None):
    _check_tau(tree, tau, False)
    return _prepare(tree, tau, tr, knot=False, fixed=fixed)


def y_closed(tree: PlumbingTree, tau: Tau, tr: Truncation = Truncation()) -> Series:
    plan, window, _ = closed_plan(tree, tau, tr)
    return Series(tau.lattice.rank, _execute(plan, tr.workers), window)


def y_closed_with_certificate(tree: PlumbingTree, tau: Tau, tr: Truncation = Truncation()) -> tuple[Series, Certificate]:
    plan, window, cert = closed_plan(tree, tau, tr)
    return Series(tau.lattice.rank, _execute(plan, tr.workers), window), cert


def y_restricted(tree: PlumbingTree, tau: Tau, w: WeylElement, tr: Truncation = Truncation()) -> Series:
    """Terms of Y_tau whose first coordinate equals 2 w(rho)."""
    first = tree.ids[0]
    if tree.degree(first) != 1:
        raise UsageError("the first vertex must be a leaf")
    plan, window, _ = closed_plan(tree, tau, tr, fixed={0: w.act(tau.lattice.weyl_vector_doubled)})
    return Series(tau.lattice.rank, _execute(plan, tr.workers), window)


def y_knot(tree: PlumbingTree, tau: Tau, tr: Truncation = Truncation()) -> Series:
    """Y_tau(q,t,z) of the knot complement; the root keeps its z-series factor."""
    if tree.root is None:
        raise UsageError("knot series need a rooted tree")
    _check_tau(tree, tau, True)
    lattice = tau.lattice
    plan, window, _ = _prepare(tree, tau, tr, knot=True)
    base = _execute(plan, tr.workers)
    root = tree.root
    x0 = tau.xi.at(root)
    n0 = 1 + tree.degree(root)
    depth = tr.kostant_depth if tr.kostant_depth is not None else 0
    if n0 >= 3 and tr.kostant_depth is None:
        raise UsageError("a root of degree >= 2 needs an explicit Kostant depth for its z-series")
    k0 = kostant_collection(lattice, x0, n0, depth)
    w0 = k0.window
    terms: dict = {}
    zmin = None
    zceil = None
    for (q, t, z), c in base.items():
        for (_, _, z2), c2 in k0.terms.items():
            key = (q, t, vadd(z, z2))
            terms[key] = terms.get(key, 0) + c * c2
        if w0.z_height_min is not None:
            shift = w0.z_height(z)
            zmin = w0.z_height_min + shift if zmin is None else max(zmin, w0.z_height_min + shift)
            zc = w0.z_ceiling + shift
            zceil = zc if zceil is None else max(zceil, zc)
    if w0.z_height_min is not None:
        if zmin is None:
            zmin = w0.z_height_min
        window = Window(q_max=window.q_max, t_height_min=window.t_height_min, z_height_min=zmin, z_twist=w0.z_twist,
                        q_floor=window.q_floor, t_ceiling=window.t_ceiling, z_ceiling=zceil)
    keep = {k: v for k, v in terms.items() if v and window.contains(k)}
    return Series(lattice.rank, keep, window)


def specialize_t1(s: Series) -> Series:
    return _specialize(s)


def make_tau(tree: PlumbingTree, lattice: RootLattice, a, xi: WeylAssignment | None = None, relative: bool = False) -> Tau:
    from .assignments import identity_assignment
    rep = a if isinstance(a, SpinCRep) else SpinCRep(tree, lattice, tuple(tuple(v) for v in a), relative)
    return Tau(lattice, rep, xi if xi is not None else identity_assignment(tree, lattice))


def leading_shift(tree: PlumbingTree, tau: Tau) -> Fraction:
    """Fractional part shared by every q-exponent of Y_tau."""
    pref = prefactor(tree, tau.lattice)[1]
    s = pref - self_pairing(tree, tau.lattice, tau.a.a) / 8
    return s - (s.numerator // s.denominator)
