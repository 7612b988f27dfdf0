"""Ground truth computed from closed forms or by naive scanning.

Nothing here goes through the series engine. The shared pieces are the
lattice data (Cartan matrix, Weyl group, Kostant counts) and the Laurent
container.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from typing import Sequence

from .errors import UnsupportedManifoldError, UsageError
from .lattice import RootLattice, Vec, build_lattice, colored_kostant, height, pairing, vadd
from .laurent import Series, Window
from .linalg import determinant, inertia, inverse

A1 = build_lattice("A", 1)


def lens_series(p: int, label: int, lattice: RootLattice = A1) -> Series:
    """A_1 series of L(p,1) (one vertex of weight p) in the class a = label * alpha."""
    if lattice != A1:
        raise UsageError("the lens closed form is stated for A1")
    if p == 0:
        raise UsageError("p must be non-zero")
    if label % 2:
        raise UsageError("class labels are even")
    sigma = 1 if p > 0 else -1
    base = Fraction(3 * sigma - p, 4)
    m = 2 * abs(p)
    terms: dict = {}
    # for |p| <= 2 several cases hit the same class and simply add up
    for ell, coeff, q in ((0, 2 * sigma, base), (2, -sigma, base - Fraction(1, p)), (-2, -sigma, base - Fraction(1, p))):
        if (label - ell) % m == 0:
            key = (q, (ell,), (0,))
            terms[key] = terms.get(key, 0) + coeff
    return Series(1, {k: c for k, c in terms.items() if c})


def _orbit(lattice: RootLattice) -> list[tuple[Vec, int]]:
    """(2 w(rho), (-1)^l(w)) over W."""
    return [(w.act(lattice.weyl_vector_doubled), w.sign) for w in lattice.weyl_elements()]


def _quad(lattice: RootLattice, inv, f: Sequence[Vec]) -> Fraction:
    """<f, f> = sum_ij (B^-1)_ij <f_i, f_j>."""
    total = Fraction(0)
    for i, fi in enumerate(f):
        if not any(fi):
            continue
        for j, fj in enumerate(f):
            if inv[i][j] and any(fj):
                total += inv[i][j] * pairing(lattice, fi, fj)
    return total


def star_framing(weights: Sequence) -> tuple[tuple[int, ...], ...]:
    """(center, leg1, leg2, leg3) -> framing ordered center, three leaves, then interior vertices.

    A leg is an int or a list of weights read from the center outwards.
    """
    center, *legs = weights
    if len(legs) != 3:
        raise UsageError("a Brieskorn star has exactly three legs")
    legs = [[leg] if isinstance(leg, int) else list(leg) for leg in legs]
    if not all(legs):
        raise UsageError("legs must be non-empty")
    idx = {}
    n = 4
    for k, leg in enumerate(legs):
        idx[(k, len(leg) - 1)] = 1 + k
        for j in range(len(leg) - 1):
            idx[(k, j)] = n
            n += 1
    b = [[0] * n for _ in range(n)]
    b[0][0] = center
    for k, leg in enumerate(legs):
        prev = 0
        for j, w in enumerate(leg):
            i = idx[(k, j)]
            b[i][i] = w
            b[i][prev] = b[prev][i] = 1
            prev = i
    return tuple(tuple(row) for row in b)


def brieskorn_series(weights, lattice: RootLattice, xi: Sequence, q_max) -> Series:
    """Closed form for a negative definite unimodular three-legged star.

    ``xi`` lists the Weyl elements at (center, leaf1, leaf2, leaf3). All
    terms with q-exponent below ``q_max`` are returned.
    """
    b = star_framing(weights)
    s = len(b)
    degrees = [sum(1 for j in range(s) if j != i and b[i][j]) for i in range(s)]
    if degrees[0] != 3 or degrees[1:4] != [1, 1, 1]:
        raise UsageError("tree is not a three-legged star")
    if inertia(b)[1] != s:
        raise UnsupportedManifoldError("the Brieskorn formula needs a negative definite star")
    if abs(determinant(b)) != 1:
        raise UnsupportedManifoldError("the Brieskorn formula is for integral homology spheres")
    if len(xi) != 4:
        raise UsageError("xi needs the center and the three leaves")
    q_max = Fraction(q_max)
    r = lattice.rank
    inv = inverse(b)
    rr = lattice.rho_squared
    pref = -Fraction(3 * s + sum(b[i][i] for i in range(s)), 2) * rr
    x0 = xi[0]
    x_inv = [lattice.inverse(x) for x in xi]
    orbit = _orbit(lattice)
    two_rho = lattice.weyl_vector_doubled
    # q - pref >= <gamma,gamma> / (8 (-B_00)) and <gamma,gamma> >= 4<rho,rho> + 8 ht(beta)
    slack = 8 * (-b[0][0]) * (q_max - pref) - 4 * rr
    if slack <= 0:
        return Series(r, {}, Window(q_max=q_max, q_floor=pref))
    cap = int(slack / 8)
    table = lattice.kostant_table((cap,) * r)
    zero = (0,) * r
    tail = [zero] * (s - 4)
    # <f,f> splits into a gamma-gamma term, gamma-leaf cross terms and a leaf part
    triples = []
    for (l1, s1), (l2, s2), (l3, s3) in product(orbit, repeat=3):
        t = zero
        for li, xv in zip((l1, l2, l3), x_inv[1:]):
            t = vadd(t, xv.act(li))
        triples.append(((l1, l2, l3), s1 * s2 * s3, t, _quad(lattice, inv, [zero, l1, l2, l3, *tail])))
    terms: dict = {}
    for beta, k in table.items():
        if not k or height(beta) > cap:
            continue
        gamma = x0.act(tuple(-c - 2 * e for c, e in zip(two_rho, beta)))
        d = x0.sign * k
        t0 = x_inv[0].act(gamma)
        gg = inv[0][0] * pairing(lattice, gamma, gamma)
        cross = {}
        for l, _ in orbit:
            cross[l] = pairing(lattice, gamma, l)
        for leaves, sign, t, ll in triples:
            gl = sum(2 * inv[0][j + 1] * cross[leaf] for j, leaf in enumerate(leaves))
            q = pref - (gg + gl + ll) / 8
            if q >= q_max:
                continue
            key = (q, vadd(t0, t), zero)
            terms[key] = terms.get(key, 0) + d * sign
    return Series(r, {key: c for key, c in terms.items() if c}, Window(q_max=q_max, q_floor=pref))


def collection_coefficient(lattice: RootLattice, x, n: int, ell: Vec) -> int:
    """Coefficient of K_{x,n} at z^ell from the closed forms."""
    ell = tuple(ell)
    if n == 2:
        return int(not any(ell))
    orbit = _orbit(lattice)
    if n == 1:
        return sum(sg for v, sg in orbit if v == ell)
    if n == 0:
        return sum(s1 * s2 for v1, s1 in orbit for v2, s2 in orbit if vadd(v1, v2) == ell)
    m = n - 2
    v = lattice.inverse(x).act(ell)
    diff = [-a - m * c for a, c in zip(v, lattice.weyl_vector_doubled)]
    if any(d % 2 or d < 0 for d in diff):
        return 0
    return x.sign ** m * colored_kostant(lattice, tuple(d // 2 for d in diff), m)


def brute_force_y(tree, tau, box: int) -> Series:
    """Scan v in [-box, box]^(s r), put ell = a + 2 B v and add every term.

    The window is the largest q-range whose lattice points all come from
    inside the box; for trees whose vertices all have degree <= 2 a box
    large enough to cover every supported ell gives the exact series.
    """
    lattice = tau.lattice
    a = tau.a.a
    xi_values = tau.xi.values
    b = tree.framing.entries
    s = len(b)
    r = lattice.rank
    pos, neg, _ = inertia(b)
    if pos + neg != s:
        raise UnsupportedManifoldError("framing matrix is singular")
    inv = inverse(b)
    degrees = [sum(1 for j in range(s) if j != i and b[i][j]) for i in range(s)]
    sign = -1 if (lattice.num_positive_roots * pos) % 2 else 1
    pref = Fraction(3 * (pos - neg) - sum(b[i][i] for i in range(s)), 2) * lattice.rho_squared
    x_inv = [lattice.inverse(x) for x in xi_values]
    terms: dict = {}
    zero = (0,) * r
    for flat in product(range(-box, box + 1), repeat=s * r):
        v = [flat[u * r:(u + 1) * r] for u in range(s)]
        ell = []
        for u in range(s):
            e = list(a[u])
            for w in range(s):
                if b[u][w]:
                    for i in range(r):
                        e[i] += 2 * b[u][w] * v[w][i]
            ell.append(tuple(e))
        c = sign
        for u in range(s):
            c *= collection_coefficient(lattice, xi_values[u], degrees[u], ell[u])
            if not c:
                break
        if not c:
            continue
        t = zero
        for u in range(s):
            t = vadd(t, x_inv[u].act(ell[u]))
        key = (pref - _quad(lattice, inv, ell) / 8, t, zero)
        terms[key] = terms.get(key, 0) + c
    window = _brute_window(inv, lattice, a, box, degrees, pref, neg == s)
    return Series(r, {k: c for k, c in terms.items() if c and window.contains(k)}, window)


def _brute_window(inv, lattice: RootLattice, a, box: int, degrees, pref, negdef: bool) -> Window:
    s = len(inv)
    r = lattice.rank
    binv_a = [[sum(inv[u][w] * a[w][i] for w in range(s)) for i in range(r)] for u in range(s)]
    if all(d <= 2 for d in degrees):
        # every supported ell_{u,i} is bounded by 2|2rho_i|
        two_rho = lattice.weyl_vector_doubled
        need = max(sum(abs(inv[u][w]) * (2 * abs(two_rho[i]) + abs(a[w][i])) for w in range(s)) / 2
                   for u in range(s) for i in range(r))
        if box >= need:
            return Window()
    if not negdef:
        raise UnsupportedManifoldError("brute force certifies only negative definite or finite trees")
    # Cauchy-Schwarz for -B^-1 (x) C: -<ell,ell> < R keeps |(B^-1 ell)_{u,i}| <= sqrt(R (-B^-1)_uu (C^-1)_ii)
    cinv = lattice.cartan_inverse
    bound = None
    for u in range(s):
        for i in range(r):
            slack = 2 * box - abs(binv_a[u][i])
            if slack <= 0:
                return Window(q_max=pref, q_floor=pref)
            cand = slack * slack / ((-inv[u][u]) * cinv[i][i])
            bound = cand if bound is None else min(bound, cand)
    return Window(q_max=pref + bound / 8, q_floor=pref)


def kostant_brute(lattice: RootLattice, alpha: Vec) -> int:
    """k(alpha) by plain recursion over multiplicities of each positive root."""
    roots = lattice.positive_roots

    def count(i: int, rest: tuple) -> int:
        if not any(rest):
            return 1
        if i == len(roots):
            return 0
        total = 0
        cur = rest
        while all(c >= 0 for c in cur):
            total += count(i + 1, cur)
            cur = tuple(c - x for c, x in zip(cur, roots[i]))
        return total

    if any(c < 0 for c in alpha):
        return 0
    return count(0, tuple(alpha))
