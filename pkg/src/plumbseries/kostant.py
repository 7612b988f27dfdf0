"""Weyl denominator and the Kostant collection K_{x,n}(z)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import UsageError
from .lattice import RootLattice, Vec, WeylElement, height, identity, vadd, vneg, vscale, vsub
from .laurent import Series, Window, mul, power


@dataclass(frozen=True)
class KostantDepth:
    height_cap: int

    def __post_init__(self):
        if self.height_cap < 0:
            raise UsageError("Kostant depth must be non-negative")


def _depth(depth) -> int:
    return depth.height_cap if isinstance(depth, KostantDepth) else int(depth)


def weyl_denominator(lattice: RootLattice) -> Series:
    """Sum over W of (-1)^l(w) z^{2 w(rho)}."""
    r = lattice.rank
    return Series.from_terms(
        r, (((0, (0,) * r, w.act(lattice.weyl_vector_doubled)), w.sign) for w in lattice.weyl_elements())
    )


def weyl_denominator_product(lattice: RootLattice) -> Series:
    """Product over positive roots of (z^alpha - z^-alpha)."""
    r = lattice.rank
    out = Series.one(r)
    for alpha in lattice.positive_roots:
        out = mul(out, Series.monomial(r, 1, z=alpha) - Series.monomial(r, 1, z=vneg(alpha)))
    return out


def _twist_of(lattice: RootLattice, x: WeylElement):
    return lattice.inverse(x).matrix


def kostant_series(lattice: RootLattice, x: WeylElement, depth) -> Series:
    """K_x(z) = (-1)^l(x) sum_alpha k(alpha) z^{-x(2 rho + 2 alpha)} over ht(alpha) <= depth."""
    d = _depth(depth)
    return _kostant_series(lattice, x.matrix, d)


@lru_cache(maxsize=None)
def _kostant_series(lattice: RootLattice, xm, d: int) -> Series:
    x = lattice.element(xm)
    r = lattice.rank
    two_rho = lattice.weyl_vector_doubled
    table = lattice.kostant_table((d,) * r)
    zero_q, zero_t = Fraction(0), (0,) * r
    terms = {}
    for alpha, k in table.items():
        if k and height(alpha) <= d:
            terms[(zero_q, zero_t, x.act(vneg(vadd(two_rho, vscale(2, alpha)))))] = x.sign * k
    h = height(two_rho)
    window = Window(z_height_min=-h - 2 * d, z_twist=_twist_of(lattice, x), z_ceiling=-h)
    return Series(r, terms, window)


def kostant_collection(lattice: RootLattice, x: WeylElement, n: int, depth) -> Series:
    """K_{x,n}: D^2, D, 1 for n = 0, 1, 2 and K_x^{n-2} for n >= 3."""
    if n < 0:
        raise UsageError("degree must be non-negative")
    return _collection(lattice, x.matrix if n >= 3 else identity(lattice.rank), n, _depth(depth) if n >= 3 else 0)


@lru_cache(maxsize=None)
def _collection(lattice: RootLattice, xm, n: int, d: int) -> Series:
    if n == 0:
        den = weyl_denominator(lattice)
        return mul(den, den)
    if n == 1:
        return weyl_denominator(lattice)
    if n == 2:
        return Series.one(lattice.rank)
    return power(_kostant_series(lattice, xm, d), n - 2)


def collection_window_height(lattice: RootLattice, n: int, depth: int) -> int | None:
    """Lowest certified twisted z-height of K_{x,n} at the given depth (None when exact)."""
    if n <= 2:
        return None
    return -(n - 2) * height(lattice.weyl_vector_doubled) - 2 * depth


def required_depth(lattice: RootLattice, n: int, min_twisted_height: int) -> int:
    """Smallest depth certifying K_{x,n} down to the given twisted z-height."""
    if n <= 2:
        return 0
    top = -(n - 2) * height(lattice.weyl_vector_doubled)
    return max(0, -((min_twisted_height - top) // 2))


def verify_p2(lattice: RootLattice, depth) -> bool:
    """Check D(z) K(z) = 1 on the certified window of the truncated product."""
    prod = mul(weyl_denominator(lattice), kostant_series(lattice, lattice.identity_element, depth))
    return dict(prod.terms) == dict(Series.one(lattice.rank).terms)


def denominator_sum_equals_product(lattice: RootLattice) -> bool:
    return dict(weyl_denominator(lattice).terms) == dict(weyl_denominator_product(lattice).terms)


def twisted_cone_coordinates(lattice: RootLattice, x: WeylElement, m: int, ell: Vec) -> Vec | None:
    """beta with x^{-1} ell = -m 2rho - 2 beta, or None if ell is off that coset."""
    v = lattice.inverse(x).act(ell)
    diff = vsub(vneg(v), vscale(m, lattice.weyl_vector_doubled))
    if any(c % 2 for c in diff):
        return None
    return tuple(c // 2 for c in diff)
