"""Exact linear algebra over Q and Z on small dense matrices (tuples of rows)."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Row = Sequence
Matrix = Sequence[Sequence]


def determinant(m: Matrix) -> int | Fraction:
    n = len(m)
    a = [[Fraction(x) for x in row] for row in m]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return 0
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        for r in range(col + 1, n):
            f = a[r][col] / a[col][col]
            if f:
                for c in range(col, n):
                    a[r][c] -= f * a[col][c]
    return int(det) if det.denominator == 1 else det


def inverse(m: Matrix) -> tuple[tuple[Fraction, ...], ...]:
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return tuple(tuple(row[n:]) for row in a)


def inertia(m: Matrix) -> tuple[int, int, int]:
    """(positive, negative, zero) counts of a symmetric rational matrix.

    Symmetric congruence diagonalisation. When no nonzero diagonal pivot is
    left but an off-diagonal entry is, the 2x2 block [[0, b], [b, 0]] is split
    off as one positive and one negative square.
    """
    n = len(m)
    a = [[Fraction(x) for x in row] for row in m]
    active = list(range(n))
    pos = neg = 0
    while active:
        piv = next((i for i in active if a[i][i] != 0), None)
        if piv is not None:
            d = a[piv][piv]
            if d > 0:
                pos += 1
            else:
                neg += 1
            rest = [i for i in active if i != piv]
            for i in rest:
                f = a[i][piv] / d
                if f:
                    for j in rest:
                        a[i][j] -= f * a[piv][j]
            active = rest
            continue
        pair = next(((i, j) for i in active for j in active if i < j and a[i][j] != 0), None)
        if pair is None:
            break
        i, j = pair
        # eliminate rows/cols i, j using the hyperbolic block
        b = a[i][j]
        pos += 1
        neg += 1
        rest = [k for k in active if k not in (i, j)]
        # block inverse of [[0,b],[b,0]] is [[0,1/b],[1/b,0]]
        for k in rest:
            for l in rest:
                a[k][l] -= (a[k][i] * a[j][l] + a[k][j] * a[i][l]) / b
        active = rest
    return pos, neg, len(active)


def solve(m: Matrix, rhs: Sequence) -> tuple[Fraction, ...]:
    inv = inverse(m)
    return tuple(sum(Fraction(x) * y for x, y in zip(row, rhs)) for row in inv)


def mat_vec_q(m: Matrix, v: Sequence) -> tuple:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in m)


# -- integer lattices ---------------------------------------------------------

def column_echelon(columns: Sequence[Sequence[int]]) -> list[list[int]]:
    """Lower column-echelon (Hermite) basis of the Z-span of ``columns``.

    Returns a list of basis columns; basis column k has its pivot in row
    ``pivot_k`` with positive pivot, zeros above it, and pivots strictly
    increasing. Entries below a later pivot are not reduced.
    """
    cols = [list(c) for c in columns if any(c)]
    if not cols:
        return []
    nrows = len(cols[0])
    basis: list[list[int]] = []
    row = 0
    while cols and row < nrows:
        nz = [c for c in cols if c[row] != 0]
        zero = [c for c in cols if c[row] == 0]
        if not nz:
            row += 1
            continue
        # Euclid on the entries of this row
        while len(nz) > 1:
            nz.sort(key=lambda c: abs(c[row]))
            small = nz[0]
            nxt = [small]
            for c in nz[1:]:
                q = c[row] // small[row]
                c = [x - q * y for x, y in zip(c, small)]
                (nxt if c[row] != 0 else zero).append(c)
            nz = nxt
        p = nz[0]
        if p[row] < 0:
            p = [-x for x in p]
        basis.append(p)
        cols = [c for c in zero if any(c)]
        row += 1
    return basis


def pivot_rows(basis: Sequence[Sequence[int]]) -> list[int]:
    return [next(i for i, x in enumerate(c) if x != 0) for c in basis]


def reduce_mod_lattice(vec: Sequence[int], basis: Sequence[Sequence[int]], centered: bool = True) -> tuple[int, ...]:
    """Canonical representative of ``vec`` modulo the lattice spanned by an echelon basis.

    For each pivot (top to bottom) the pivot coordinate is moved into
    (-p/2, p/2] when ``centered`` else [0, p).
    """
    v = list(vec)
    for col, r in zip(basis, pivot_rows(basis)):
        p = col[r]
        if centered:
            q = _centered_quotient(v[r], p)
        else:
            q = v[r] // p
        if q:
            v = [x - q * y for x, y in zip(v, col)]
    return tuple(v)


def _centered_quotient(x: int, p: int) -> int:
    # smallest shift making x - q p land in (-p/2, p/2]
    q = x // p
    rem = x - q * p  # in [0, p)
    if 2 * rem > p:
        q += 1
    return q


def in_lattice(vec: Sequence[int], basis: Sequence[Sequence[int]]) -> bool:
    v = list(vec)
    for col, r in zip(basis, pivot_rows(basis)):
        if v[r] % col[r]:
            return False
        q = v[r] // col[r]
        v = [x - q * y for x, y in zip(v, col)]
    return not any(v)
