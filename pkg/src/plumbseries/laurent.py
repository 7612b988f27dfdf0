"""Sparse exact series in q (rational exponents), t_1..t_r and z_1..z_r.

A :class:`Series` stores finitely many terms together with a
:class:`Window`, the region of monomials in which the stored terms are
certified to be all the terms of the (possibly infinite) series.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import EvaluationUndefinedError, TruncationError, UsageError
from .lattice import Mat, Vec, mat_vec

Key = tuple[Fraction, Vec, Vec]


@dataclass(frozen=True)
class Window:
    """Certified region: the conjunction of every bound that is set.

    ``q_max``: q-exponent < q_max. ``q_min``: q-exponent >= q_min.
    ``t_height_min``: sum of t-exponents >= bound.
    ``z_height_min``: height of ``z_twist @ z-exponent`` >= bound.

    The ``*_floor`` / ``*_ceiling`` fields are not certification bounds but
    a-priori support bounds of the full series; multiplication uses them to
    propagate windows.
    """

    q_max: Fraction | None = None
    q_min: Fraction | None = None
    t_height_min: int | None = None
    z_height_min: int | None = None
    z_twist: Mat | None = None
    q_floor: Fraction | None = None
    t_ceiling: int | None = None
    z_ceiling: int | None = None

    @property
    def exact(self) -> bool:
        return self.q_max is None and self.q_min is None and self.t_height_min is None and self.z_height_min is None

    @property
    def certified(self) -> tuple:
        """The certification bounds alone; support bounds do not affect equality."""
        twist = self.z_twist if self.z_height_min is not None else None
        return (self.q_max, self.q_min, self.t_height_min, self.z_height_min, twist)

    @property
    def is_empty(self) -> bool:
        return self.q_min is not None and self.q_max is not None and self.q_min >= self.q_max

    def z_height(self, z: Vec) -> int:
        return sum(mat_vec(self.z_twist, z)) if self.z_twist is not None else sum(z)

    def contains(self, key: Key) -> bool:
        q, t, z = key
        if self.q_max is not None and q >= self.q_max:
            return False
        if self.q_min is not None and q < self.q_min:
            return False
        if self.t_height_min is not None and sum(t) < self.t_height_min:
            return False
        if self.z_height_min is not None and self.z_height(z) < self.z_height_min:
            return False
        return True

    def intersect(self, other: Window) -> Window:
        if self.z_height_min is not None and other.z_height_min is not None and self.z_twist != other.z_twist:
            raise TruncationError("cannot intersect z-windows with different twists")
        twist = self.z_twist if self.z_height_min is not None else other.z_twist
        return Window(
            q_max=_opt(min, self.q_max, other.q_max),
            q_min=_opt(max, self.q_min, other.q_min),
            t_height_min=_opt(max, self.t_height_min, other.t_height_min),
            z_height_min=_opt(max, self.z_height_min, other.z_height_min),
            z_twist=twist,
        )

    def shifted(self, dq: Fraction, dt: int, dz: int) -> Window:
        def sh(v, d):
            return None if v is None else v + d
        return replace(
            self,
            q_max=sh(self.q_max, dq), q_min=sh(self.q_min, dq), q_floor=sh(self.q_floor, dq),
            t_height_min=sh(self.t_height_min, dt), t_ceiling=sh(self.t_ceiling, dt),
            z_height_min=sh(self.z_height_min, dz), z_ceiling=sh(self.z_ceiling, dz),
        )

    def to_json(self) -> dict:
        out: dict = {"exact": self.exact}
        for name in ("q_max", "q_min"):
            v = getattr(self, name)
            if v is not None:
                out[name] = _frac_str(v)
        if self.t_height_min is not None:
            out["t_height_min"] = self.t_height_min
        if self.z_height_min is not None:
            out["z_height_min"] = self.z_height_min
            if self.z_twist is not None:
                out["z_twist"] = [list(r) for r in self.z_twist]
        return out


def _opt(f, a, b):
    if a is None:
        return b
    if b is None:
        return a
    return f(a, b)


EXACT = Window()


@dataclass(frozen=True, eq=False)
class Series:
    rank: int
    terms: Mapping[Key, int] = field(default_factory=dict)
    window: Window = EXACT

    # -- construction --

    @classmethod
    def zero(cls, rank: int, window: Window = EXACT) -> Series:
        return cls(rank, {}, window)

    @classmethod
    def one(cls, rank: int) -> Series:
        return cls.monomial(rank, 1)

    @classmethod
    def monomial(cls, rank: int, coeff: int = 1, q=0, t: Vec | None = None, z: Vec | None = None) -> Series:
        zero = (0,) * rank
        key = (Fraction(q), tuple(t) if t is not None else zero, tuple(z) if z is not None else zero)
        return cls(rank, {key: coeff} if coeff else {}, EXACT)

    @classmethod
    def from_terms(cls, rank: int, items: Iterable[tuple[Key, int]], window: Window = EXACT) -> Series:
        acc: dict[Key, int] = {}
        for key, c in items:
            acc[key] = acc.get(key, 0) + c
        return cls(rank, {k: v for k, v in acc.items() if v}, window)

    # -- basic protocol --

    def __eq__(self, other):
        if not isinstance(other, Series):
            return NotImplemented
        return (self.rank == other.rank and dict(self.terms) == dict(other.terms)
                and self.window.certified == other.window.certified)

    def __hash__(self):
        return hash((self.rank, frozenset(self.terms.items())))

    def __len__(self):
        return len(self.terms)

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"Series({canonical_text(self)})"

    def __add__(self, other: Series) -> Series:
        return add(self, other)

    def __sub__(self, other: Series) -> Series:
        return add(self, -other)

    def __neg__(self) -> Series:
        return Series(self.rank, {k: -v for k, v in self.terms.items()}, self.window)

    def __mul__(self, other) -> Series:
        if isinstance(other, int):
            return Series(self.rank, {k: v * other for k, v in self.terms.items() if v * other}, self.window)
        return mul(self, other)

    __rmul__ = __mul__

    def coefficient(self, q=0, t: Vec | None = None, z: Vec | None = None) -> int:
        zero = (0,) * self.rank
        return self.terms.get((Fraction(q), t or zero, z or zero), 0)

    def restrict(self, window: Window) -> Series:
        """Drop terms outside ``window`` and narrow the certified region to it."""
        w = self.window.intersect(window)
        w = replace(w, q_floor=self.window.q_floor, t_ceiling=self.window.t_ceiling, z_ceiling=self.window.z_ceiling)
        return Series(self.rank, {k: v for k, v in self.terms.items() if w.contains(k)}, w)

    def with_window(self, window: Window) -> Series:
        return Series(self.rank, self.terms, window)

    def shift(self, coeff: int = 1, q=0, t: Vec | None = None, z: Vec | None = None) -> Series:
        """Multiply by the monomial coeff * q^q t^t z^z (window moves along)."""
        q = Fraction(q)
        t = t or (0,) * self.rank
        z = z or (0,) * self.rank
        terms = {}
        for (a, b, c), v in self.terms.items():
            terms[(a + q, _vadd(b, t), _vadd(c, z))] = v * coeff
        dz = self.window.z_height(z) if self.window.z_height_min is not None or self.window.z_ceiling is not None else sum(z)
        return Series(self.rank, {k: v for k, v in terms.items() if v}, self.window.shifted(q, sum(t), dz))

    def q_exponents(self) -> list[Fraction]:
        return sorted({k[0] for k in self.terms})

    def max_t_height(self) -> int | None:
        return max((sum(k[1]) for k in self.terms), default=None)


def _vadd(a: Vec, b: Vec) -> Vec:
    return tuple(x + y for x, y in zip(a, b))


def _check_rank(a: Series, b: Series) -> None:
    if a.rank != b.rank:
        raise UsageError(f"rank mismatch: {a.rank} vs {b.rank}")


def add(a: Series, b: Series) -> Series:
    _check_rank(a, b)
    terms = dict(a.terms)
    for k, v in b.terms.items():
        s = terms.get(k, 0) + v
        if s:
            terms[k] = s
        else:
            terms.pop(k, None)
    w = a.window.intersect(b.window)
    w = replace(
        w,
        q_floor=_opt(min, a.window.q_floor, b.window.q_floor) if a.window.q_floor is not None and b.window.q_floor is not None else None,
        t_ceiling=_opt(max, a.window.t_ceiling, b.window.t_ceiling) if a.window.t_ceiling is not None and b.window.t_ceiling is not None else None,
    )
    return Series(a.rank, {k: v for k, v in terms.items() if w.contains(k)}, w)


# -- support bounds of the full (untruncated) series --

def _only(w: Window, *names: str) -> bool:
    bounds = {"q_max": w.q_max, "q_min": w.q_min, "t": w.t_height_min, "z": w.z_height_min}
    return all(v is None for k, v in bounds.items() if k not in names)


def q_floor(s: Series) -> Fraction | None:
    w = s.window
    if w.q_floor is not None:
        return w.q_floor
    if _only(w, "q_max"):
        vals = [k[0] for k in s.terms] + ([w.q_max] if w.q_max is not None else [])
        return min(vals) if vals else None
    return None


def q_ceiling(s: Series) -> Fraction | None:
    w = s.window
    if w.exact:
        return max((k[0] for k in s.terms), default=None)
    return None


def t_ceiling(s: Series) -> int | None:
    w = s.window
    if w.t_ceiling is not None:
        return w.t_ceiling
    if _only(w, "t"):
        vals = [sum(k[1]) for k in s.terms] + ([w.t_height_min] if w.t_height_min is not None else [])
        return max(vals) if vals else None
    return None


def z_ceiling(s: Series, twist: Mat | None) -> int | None:
    w = s.window
    if w.z_ceiling is not None and (w.z_twist == twist or w.z_height_min is None):
        return w.z_ceiling
    if _only(w, "z") and (w.z_height_min is None or w.z_twist == twist):
        def h(z):
            return sum(mat_vec(twist, z)) if twist is not None else sum(z)
        vals = [h(k[2]) for k in s.terms] + ([w.z_height_min] if w.z_height_min is not None else [])
        return max(vals) if vals else None
    return None


def mul(a: Series, b: Series) -> Series:
    """Product with conservative window propagation.

    A product monomial is certified when every factorisation of it uses
    certified monomials of both factors; this needs the support bounds of
    the other factor in each truncated direction.
    """
    _check_rank(a, b)
    wa, wb = a.window, b.window
    new = {}

    def need(bound, what):
        if bound is None:
            raise TruncationError(f"cannot certify product window: unbounded {what} support")
        return bound

    qmax = None
    for x, y in ((a, b), (b, a)):
        if x.window.q_max is not None:
            qmax = _opt(min, qmax, x.window.q_max + need(q_floor(y), "q"))
    qmin = None
    for x, y in ((a, b), (b, a)):
        if x.window.q_min is not None:
            qmin = _opt(max, qmin, x.window.q_min + need(q_ceiling(y), "q"))
    tmin = None
    for x, y in ((a, b), (b, a)):
        if x.window.t_height_min is not None:
            tmin = _opt(max, tmin, x.window.t_height_min + need(t_ceiling(y), "t"))
    zmin = None
    twist = wa.z_twist if wa.z_height_min is not None else wb.z_twist
    for x, y in ((a, b), (b, a)):
        if x.window.z_height_min is not None:
            if x.window.z_twist != twist:
                raise TruncationError("cannot certify product of z-series with different twists")
            zmin = _opt(max, zmin, x.window.z_height_min + need(z_ceiling(y, twist), "z"))

    fa, fb = q_floor(a), q_floor(b)
    ta, tb = t_ceiling(a), t_ceiling(b)
    window = Window(
        q_max=qmax, q_min=qmin, t_height_min=tmin, z_height_min=zmin,
        z_twist=twist if zmin is not None else None,
        q_floor=fa + fb if fa is not None and fb is not None else None,
        t_ceiling=ta + tb if ta is not None and tb is not None else None,
    )
    za, zb = z_ceiling(a, twist), z_ceiling(b, twist)
    if za is not None and zb is not None and twist is not None:
        window = replace(window, z_ceiling=za + zb, z_twist=twist)

    for (qa, ta_, za_), ca in a.terms.items():
        for (qb, tb_, zb_), cb in b.terms.items():
            key = (qa + qb, _vadd(ta_, tb_), _vadd(za_, zb_))
            new[key] = new.get(key, 0) + ca * cb
    return Series(a.rank, {k: v for k, v in new.items() if v and window.contains(k)}, window)


def power(a: Series, n: int) -> Series:
    if n < 0:
        raise UsageError("negative power")
    out = Series.one(a.rank)
    for _ in range(n):
        out = mul(out, a)
    return out


def coeff_z(a: Series, alpha: Vec) -> Series:
    """The coefficient of z^alpha, as a series in q and t."""
    alpha = tuple(alpha)
    w = a.window
    if w.z_height_min is not None and w.z_height(alpha) < w.z_height_min:
        raise TruncationError(f"z^{alpha} lies outside the certified z-window")
    zero = (0,) * a.rank
    terms = {(q, t, zero): c for (q, t, z), c in a.terms.items() if z == alpha}
    nw = Window(q_max=w.q_max, q_min=w.q_min, t_height_min=w.t_height_min, q_floor=w.q_floor, t_ceiling=w.t_ceiling)
    return Series(a.rank, terms, nw)


def const_z(a: Series) -> Series:
    return coeff_z(a, (0,) * a.rank)


def specialize_t1(a: Series) -> Series:
    """Set t_1 = ... = t_r = 1.

    Defined when each certified q-power collects finitely many t-terms: the
    series is a finite polynomial, or its window bounds q with a q-floor and
    no t-truncation.
    """
    w = a.window
    if w.t_height_min is not None or (not w.exact and w.q_max is None):
        raise EvaluationUndefinedError("t = 1 is not certified: infinitely many t-terms may share a power of q")
    if not w.exact and q_floor(a) is None:
        raise EvaluationUndefinedError("t = 1 is not certified without a lower bound on q")
    zero = (0,) * a.rank
    return Series.from_terms(a.rank, (((q, zero, z), c) for (q, t, z), c in a.terms.items()),
                             Window(q_max=w.q_max, q_min=w.q_min, z_height_min=w.z_height_min,
                                    z_twist=w.z_twist, q_floor=w.q_floor))


def drop_t(a: Series) -> Series:
    return specialize_t1(a)


# -- text and JSON ------------------------------------------------------------

def _frac_str(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def _exp_str(var: str, e) -> str:
    e = Fraction(e)
    if e == 1:
        return var
    if e.denominator == 1:
        return f"{var}^{e.numerator}"
    return f"{var}^({_frac_str(e)})"


def _vars(prefix: str, exps: Vec) -> list[str]:
    if len(exps) == 1:
        return [_exp_str(prefix, exps[0])] if exps[0] else []
    return [_exp_str(f"{prefix}{i + 1}", e) for i, e in enumerate(exps) if e]


def sort_key(key: Key):
    q, t, z = key
    return (q, -sum(t), tuple(-x for x in t), -sum(z), tuple(-x for x in z))


def _monomial_str(coeff: int, key: Key, first: bool) -> str:
    q, t, z = key
    parts = ([_exp_str("q", q)] if q else []) + _vars("t", t) + _vars("z", z)
    mag = abs(coeff)
    body = "*".join(([str(mag)] if mag != 1 or not parts else []) + parts)
    if first:
        return ("-" if coeff < 0 else "") + body
    return (" - " if coeff < 0 else " + ") + body


def common_q_shift(a: Series) -> Fraction:
    """Fractional part shared by every q-exponent (0 when there is none)."""
    fr = {q - (q.numerator // q.denominator) for q, _, _ in a.terms}
    if a.window.q_max is not None and len(fr) <= 1:
        return fr.pop() if fr else Fraction(0)
    return fr.pop() if len(fr) == 1 else Fraction(0)


def canonical_text(a: Series, factor: bool = True) -> str:
    """Deterministic rendering, e.g. ``q^(1/2)*(t^2 - q - q^5 + q^10*t^-2 + O(q^96))``."""
    items = sorted(a.terms.items(), key=lambda kv: sort_key(kv[0]))
    w = a.window
    shift = common_q_shift(a) if factor else Fraction(0)
    wrap = bool(shift) and (len(items) > 1 or (w.q_max is not None and items))
    if not wrap:
        shift = Fraction(0)
    body = "".join(_monomial_str(c, (k[0] - shift, k[1], k[2]), i == 0) for i, (k, c) in enumerate(items))
    if w.q_max is not None:
        o = f"O({_exp_str('q', w.q_max - shift)})" if w.q_max - shift else "O(1)"
        body = f"{body} + {o}" if body else o
    if not body:
        body = "0"
    text = f"{_exp_str('q', shift)}*({body})" if wrap else body
    suffix = []
    if w.q_min is not None:
        suffix.append(f"[q>={_frac_str(w.q_min)}]")
    if w.t_height_min is not None:
        suffix.append(f"[t>={w.t_height_min}]")
    if w.z_height_min is not None:
        tw = "" if w.z_twist is None else ";" + ",".join(" ".join(map(str, r)) for r in w.z_twist)
        suffix.append(f"[z>={w.z_height_min}{tw}]")
    return " ".join([text] + suffix)


_TERM_RE = re.compile(r"\s*([+-])?\s*([^+-]+(?:[+-]\d+[^+-]*)*)")
_FACTOR_RE = re.compile(r"^([a-z])(\d*)(?:\^(\(-?\d+(?:/\d+)?\)|-?\d+))?$")


def _parse_exp(s: str | None) -> Fraction:
    if s is None:
        return Fraction(1)
    return Fraction(s.strip("()"))


def _split_terms(body: str) -> list[str]:
    # split on " + " / " - " separators only (exponent minus signs are not spaced)
    tokens = re.split(r" ([+-]) ", body.strip())
    out = [tokens[0]]
    for sign, term in zip(tokens[1::2], tokens[2::2]):
        out.append(("-" if sign == "-" else "") + term)
    return out


def parse_canonical(text: str, rank: int) -> Series:
    """Inverse of :func:`canonical_text`."""
    text = text.strip()
    window = {}
    while text.endswith("]"):
        start = text.rindex("[")
        tag = text[start + 1:-1]
        text = text[:start].rstrip()
        var, val = tag.split(">=", 1)
        if var == "q":
            window["q_min"] = Fraction(val)
        elif var == "t":
            window["t_height_min"] = int(val)
        else:
            if ";" in val:
                val, tw = val.split(";", 1)
                window["z_twist"] = tuple(tuple(int(x) for x in r.split()) for r in tw.split(","))
            window["z_height_min"] = int(val)
    shift = Fraction(0)
    m = re.match(r"^q\^\((-?\d+/\d+)\)\*\((.*)\)$", text)
    if m:
        shift = Fraction(m.group(1))
        text = m.group(2)
    terms: dict[Key, int] = {}
    if text != "0":
        for raw in _split_terms(text):
            neg = raw.startswith("-")
            raw = raw.lstrip("-")
            if raw.startswith("O("):
                inner = raw[2:-1]
                window["q_max"] = (Fraction(0) if inner == "1" else _parse_factor(inner)[2]) + shift
                continue
            coeff, q = 1, Fraction(0)
            t, z = [0] * rank, [0] * rank
            for f in raw.split("*"):
                if f.isdigit():
                    coeff = int(f)
                    continue
                var, idx, e = _parse_factor(f)
                if var == "q":
                    q = e
                else:
                    i = int(idx) - 1 if idx else 0
                    (t if var == "t" else z)[i] = int(e)
            key = (q + shift, tuple(t), tuple(z))
            terms[key] = -coeff if neg else coeff
    return Series(rank, terms, Window(**window))


def _parse_factor(f: str):
    m = _FACTOR_RE.match(f)
    if not m:
        raise UsageError(f"cannot parse factor {f!r}")
    return m.group(1), m.group(2), _parse_exp(m.group(3))


def to_json(a: Series) -> dict:
    items = sorted(a.terms.items(), key=lambda kv: sort_key(kv[0]))
    return {
        "rank": a.rank,
        "terms": [{"coeff": c, "q": _frac_str(q), "t": list(t), "z": list(z)} for (q, t, z), c in items],
        "window": a.window.to_json(),
    }


def from_json(data: Mapping) -> Series:
    rank = data["rank"]
    terms = {(Fraction(d["q"]), tuple(d["t"]), tuple(d["z"])): d["coeff"] for d in data["terms"]}
    w = data.get("window", {})
    window = Window(
        q_max=Fraction(w["q_max"]) if "q_max" in w else None,
        q_min=Fraction(w["q_min"]) if "q_min" in w else None,
        t_height_min=w.get("t_height_min"),
        z_height_min=w.get("z_height_min"),
        z_twist=tuple(tuple(r) for r in w["z_twist"]) if "z_twist" in w else None,
    )
    return Series(rank, terms, window)


def dumps(a: Series) -> str:
    return json.dumps(to_json(a), sort_keys=True)
