"""Exact scalars, sparse polynomials, term orders and free-module elements.

Internally a polynomial is a plain ``dict`` mapping exponent tuples to nonzero
coefficients, and an element of a free module is a ``dict`` mapping
``(component, exponents)`` to nonzero coefficients.  The classes here wrap
those dicts for the public surface; the Groebner engine works on the raw
dicts directly.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Callable, Iterable

import gmpy2


class StructuralError(ValueError):
    """Operands live in incompatible rings or modules."""


@dataclass(frozen=True)
class FieldSpec:
    kind: str = "rationals"
    characteristic: int = 0

    def __post_init__(self):
        if self.kind == "rationals":
            if self.characteristic != 0:
                raise ValueError("the rationals have characteristic 0")
        elif self.kind == "prime-field":
            p = self.characteristic
            if p == 2:
                raise ValueError("characteristic 2 is not supported")
            if p < 3 or p >= 2**31 or not gmpy2.is_prime(p):
                raise ValueError(f"characteristic must be an odd prime < 2^31, got {p}")
        else:
            raise ValueError(f"unknown field kind {self.kind!r}")

    @classmethod
    def rationals(cls) -> "FieldSpec":
        return cls("rationals", 0)

    @classmethod
    def prime(cls, p: int) -> "FieldSpec":
        return cls("prime-field", p)

    @property
    def p(self) -> int:
        return self.characteristic

    def __call__(self, x):
        """Coerce an int, Fraction or string into a field element."""
        if self.characteristic:
            if isinstance(x, (Fraction, type(gmpy2.mpq()))):
                num, den = int(x.numerator), int(x.denominator)
                return num * pow(den, -1, self.characteristic) % self.characteristic
            return int(x) % self.characteristic
        if isinstance(x, str):
            return gmpy2.mpq(Fraction(x))
        if isinstance(x, Fraction):
            return gmpy2.mpq(x.numerator, x.denominator)
        return gmpy2.mpq(x)

    def inv(self, a):
        if self.characteristic:
            return pow(int(a), -1, self.characteristic)
        return 1 / a

    def normalize(self, a):
        return a % self.characteristic if self.characteristic else a

    def to_fraction(self, a) -> Fraction:
        if self.characteristic:
            return Fraction(int(a))
        return Fraction(int(a.numerator), int(a.denominator))

    def __str__(self):
        return "Q" if not self.characteristic else f"Fp {self.characteristic}"


# ---------------------------------------------------------------- monomials

def mono_mul(a: tuple, b: tuple) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


def mono_div(a: tuple, b: tuple) -> tuple:
    return tuple(x - y for x, y in zip(a, b))


def mono_divides(a: tuple, b: tuple) -> bool:
    return all(x <= y for x, y in zip(a, b))


def mono_lcm(a: tuple, b: tuple) -> tuple:
    return tuple(x if x > y else y for x, y in zip(a, b))


def monomials_of_degree(nvars: int, d: int) -> list[tuple]:
    """All exponent vectors of total degree ``d``, in a fixed order."""
    if d < 0:
        return []
    if nvars == 0:
        return [()] if d == 0 else []
    out = []
    for combo in combinations_with_replacement(range(nvars), d):
        e = [0] * nvars
        for v in combo:
            e[v] += 1
        out.append(tuple(e))
    return out


@dataclass(frozen=True)
class Monomial:
    exponents: tuple

    @property
    def degree(self) -> int:
        return sum(self.exponents)

    def __mul__(self, other: "Monomial") -> "Monomial":
        if len(self.exponents) != len(other.exponents):
            raise StructuralError("variable counts differ")
        return Monomial(mono_mul(self.exponents, other.exponents))

    def divides(self, other: "Monomial") -> bool:
        return mono_divides(self.exponents, other.exponents)


# ---------------------------------------------------------------- orders

def _grevlex_key(e: tuple) -> tuple:
    # ascending key: larger tuple means larger monomial
    return (sum(e),) + tuple(-x for x in reversed(e))


def _lex_key(e: tuple) -> tuple:
    return e


def _glex_key(e: tuple) -> tuple:
    return (sum(e),) + e


MONOMIAL_KEYS = {"grevlex": _grevlex_key, "lex": _lex_key, "graded-lex": _glex_key}


@dataclass(frozen=True)
class MonomialOrder:
    """Monomial order plus a strategy for comparing free-module terms.

    ``strategy`` is one of ``"position-over-term"``, ``"term-over-position"``
    or ``"schreyer"``; for schreyer orders ``schreyer_data`` holds, for every
    basis element, its image's leading ``(component, exponents)`` in the
    previous free module, together with that module's order.
    """
    kind: str = "grevlex"
    strategy: str = "term-over-position"
    schreyer_data: tuple = field(default=(), compare=False)
    schreyer_base: "MonomialOrder | None" = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in MONOMIAL_KEYS:
            raise ValueError(f"unknown monomial order {self.kind!r}")

    def monomial_key(self, e: tuple) -> tuple:
        return MONOMIAL_KEYS[self.kind](e)

    def compare(self, a, b) -> str:
        """Compare two monomials (exponent tuples / Monomial) or two module terms."""
        ka, kb = self.term_key(a), self.term_key(b)
        return "LT" if ka < kb else "GT" if ka > kb else "EQ"

    def term_key(self, t) -> tuple:
        if isinstance(t, Monomial):
            return self.monomial_key(t.exponents)
        if len(t) == 2 and isinstance(t[1], tuple):
            comp, e = t
            mk = self.monomial_key(e)
            if self.strategy == "position-over-term":
                return (-comp,) + mk
            if self.strategy == "term-over-position":
                return mk + (-comp,)
            if self.strategy == "schreyer":
                lead_comp, lead_e = self.schreyer_data[comp]
                induced = self.schreyer_base.term_key((lead_comp, mono_mul(e, lead_e)))
                return induced + (-comp,)
            raise ValueError(f"unknown module strategy {self.strategy!r}")
        return self.monomial_key(t)


def term_sort_key(nvars: int, twists: Iterable[int], kind: str = "grevlex",
                  elimination: int | None = None) -> Callable:
    """Build a key for the Groebner engine: the *smallest* key is the leading term.

    Terms are ordered by twisted degree first (term-over-position).  With
    ``elimination = r`` every term in a component ``< r`` dominates every term
    in a component ``>= r``.
    """
    tw = tuple(twists)
    if kind == "grevlex":
        if elimination is None:
            def key(t):
                c, e = t
                return (-(sum(e) + tw[c]),) + e[::-1] + (c,)
        else:
            r = elimination

            def key(t):
                c, e = t
                return (0 if c < r else 1, -(sum(e) + tw[c])) + e[::-1] + (c,)
        return key
    mk = MONOMIAL_KEYS[kind]
    if elimination is None:
        def key(t):
            c, e = t
            return (-(sum(e) + tw[c]),) + tuple(-x for x in mk(e)) + (c,)
    else:
        r = elimination

        def key(t):
            c, e = t
            return (0 if c < r else 1, -(sum(e) + tw[c])) + tuple(-x for x in mk(e)) + (c,)
    return key


# ---------------------------------------------------------------- raw dict arithmetic

def poly_add(f: dict, g: dict, fld: FieldSpec) -> dict:
    out = dict(f)
    p = fld.characteristic
    for m, c in g.items():
        v = out.get(m, 0) + c
        if p:
            v %= p
        if v:
            out[m] = v
        else:
            out.pop(m, None)
    return out


def poly_scale(f: dict, c, fld: FieldSpec) -> dict:
    p = fld.characteristic
    if p:
        return {m: v * c % p for m, v in f.items() if v * c % p}
    return {m: v * c for m, v in f.items()} if c else {}


def poly_mul(f: dict, g: dict, fld: FieldSpec) -> dict:
    out: dict = {}
    p = fld.characteristic
    for m1, c1 in f.items():
        for m2, c2 in g.items():
            m = mono_mul(m1, m2)
            out[m] = out.get(m, 0) + c1 * c2
    if p:
        return {m: v % p for m, v in out.items() if v % p}
    return {m: v for m, v in out.items() if v}


def poly_degree(f: dict) -> int | None:
    """Common total degree of a homogeneous polynomial; None for 0; -1 if inhomogeneous."""
    degs = {sum(m) for m in f}
    if not degs:
        return None
    return degs.pop() if len(degs) == 1 else -1


def vec_add(u: dict, v: dict, fld: FieldSpec) -> dict:
    return poly_add(u, v, fld)


def vec_scale(u: dict, c, fld: FieldSpec) -> dict:
    return poly_scale(u, c, fld)


def vec_mul_poly(u: dict, f: dict, fld: FieldSpec) -> dict:
    """Multiply a module element by a polynomial."""
    out: dict = {}
    p = fld.characteristic
    for (comp, e), c in u.items():
        for m, d in f.items():
            t = (comp, mono_mul(e, m))
            out[t] = out.get(t, 0) + c * d
    if p:
        return {t: v % p for t, v in out.items() if v % p}
    return {t: v for t, v in out.items() if v}


def poly_to_vec(f: dict, comp: int = 0) -> dict:
    return {(comp, m): c for m, c in f.items()}


def vec_component(u: dict, comp: int) -> dict:
    return {e: c for (k, e), c in u.items() if k == comp}


def vec_shift(u: dict, offset: int) -> dict:
    return {(k + offset, e): c for (k, e), c in u.items()}


def apply_columns(columns: list, v: dict, fld: FieldSpec) -> dict:
    """Image of ``v`` under the map sending basis vector j to ``columns[j]``."""
    out: dict = {}
    p = fld.characteristic
    for (j, e), c in v.items():
        for (k, m), d in columns[j].items():
            t = (k, mono_mul(e, m))
            out[t] = out.get(t, 0) + c * d
    if p:
        return {t: x % p for t, x in out.items() if x % p}
    return {t: x for t, x in out.items() if x}


def vec_degree(u: dict, twists) -> int | None:
    degs = {sum(e) + twists[c] for (c, e) in u}
    if not degs:
        return None
    if len(degs) > 1:
        raise StructuralError("inhomogeneous module element")
    return degs.pop()


# ---------------------------------------------------------------- public wrappers

@dataclass(frozen=True)
class PolynomialRing:
    field: FieldSpec
    names: tuple

    @property
    def nvars(self) -> int:
        return len(self.names)

    def gen(self, i: int) -> "Polynomial":
        e = [0] * self.nvars
        e[i] = 1
        return Polynomial(self, {tuple(e): self.field(1)})

    def gens(self) -> list:
        return [self.gen(i) for i in range(self.nvars)]

    def const(self, c) -> "Polynomial":
        c = self.field(c)
        return Polynomial(self, {(0,) * self.nvars: c} if c else {})

    def __str__(self):
        return f"{self.field}[{','.join(self.names)}]"


class Polynomial:
    """Immutable sparse polynomial; terms are stored sorted by grevlex, largest first."""
    __slots__ = ("ring", "terms", "_sorted")

    def __init__(self, ring: PolynomialRing, terms: dict):
        self.ring = ring
        p = ring.field.characteristic
        clean = {}
        for m, c in terms.items():
            if len(m) != ring.nvars:
                raise StructuralError("exponent length does not match variable count")
            if p:
                c = int(c) % p
            if c:
                clean[m] = c
        self.terms = clean
        self._sorted = sorted(clean, key=_grevlex_key, reverse=True)

    def _check(self, other: "Polynomial"):
        if not isinstance(other, Polynomial):
            raise StructuralError("operand is not a polynomial")
        if other.ring != self.ring:
            raise StructuralError("polynomials live in different rings")

    def __add__(self, other):
        self._check(other)
        return Polynomial(self.ring, poly_add(self.terms, other.terms, self.ring.field))

    def __neg__(self):
        return Polynomial(self.ring, poly_scale(self.terms, self.ring.field(-1), self.ring.field))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            other = self.ring.const(other)
        self._check(other)
        return Polynomial(self.ring, poly_mul(self.terms, other.terms, self.ring.field))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = self.ring.const(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        return isinstance(other, Polynomial) and self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        return hash((self.ring, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def homogeneous_degree(self) -> int | None:
        d = poly_degree(self.terms)
        return None if d == -1 else d

    def leading_monomial(self, order: MonomialOrder | None = None) -> tuple:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        if order is None or order.kind == "grevlex":
            return self._sorted[0]
        return max(self.terms, key=order.monomial_key)

    def __repr__(self):
        return format_poly(self.terms, self.ring.names)


class FreeElement:
    """Element of a graded free module over a polynomial or quotient ring."""
    __slots__ = ("ambient", "components")

    def __init__(self, ambient, components: dict):
        rank = len(ambient.twists)
        for (c, _e) in components:
            if not 0 <= c < rank:
                raise StructuralError(f"component {c} out of range for rank {rank}")
        self.ambient = ambient
        self.components = {t: v for t, v in components.items() if v}

    def __add__(self, other: "FreeElement"):
        if other.ambient != self.ambient:
            raise StructuralError("elements of different free modules")
        return FreeElement(self.ambient, vec_add(self.components, other.components, self.ambient.ring.field))

    def __eq__(self, other):
        return isinstance(other, FreeElement) and self.ambient == other.ambient \
            and self.components == other.components

    def __hash__(self):
        return hash(frozenset(self.components.items()))

    def degree(self):
        return vec_degree(self.components, self.ambient.twists)


# ---------------------------------------------------------------- formatting

def format_scalar(c) -> str:
    if isinstance(c, int):
        return str(c)
    num, den = int(c.numerator), int(c.denominator)
    return str(num) if den == 1 else f"{num}/{den}"


def format_monomial(e: tuple, names) -> str:
    parts = []
    for name, k in zip(names, e):
        if k == 1:
            parts.append(name)
        elif k > 1:
            parts.append(f"{name}^{k}")
    return "*".join(parts)


def format_poly(f: dict, names) -> str:
    if not f:
        return "0"
    out = []
    for m in sorted(f, key=_grevlex_key, reverse=True):
        c = f[m]
        mono = format_monomial(m, names)
        s = format_scalar(c)
        if mono:
            if s == "1":
                term = mono
            elif s == "-1":
                term = "-" + mono
            else:
                term = f"{s}*{mono}"
        else:
            term = s
        out.append(term)
    text = out[0]
    for t in out[1:]:
        text += f" - {t[1:]}" if t.startswith("-") else f" + {t}"
    return text
