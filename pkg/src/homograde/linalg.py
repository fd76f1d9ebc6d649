"""Dense exact linear algebra used as an independent oracle.

Nothing here touches Groebner bases: the degree-d piece of a presented module
is computed as (free part) minus the rank of an explicit spanning matrix.
Rationals use fractions.Fraction so the oracle does not share arithmetic with
the engine.
"""
from __future__ import annotations

from fractions import Fraction

from .core import mono_mul, monomials_of_degree, poly_degree


def rank(rows, p: int = 0) -> int:
    """Rank of a list of sparse rows {col: value}; p = 0 means rationals."""
    pivots: dict = {}
    r = 0
    for row in rows:
        row = {c: (Fraction(v) if p == 0 else int(v) % p) for c, v in row.items()}
        row = {c: v for c, v in row.items() if v}
        while row:
            c = min(row)
            if c not in pivots:
                inv = 1 / row[c] if p == 0 else pow(row[c], p - 2, p)
                pivots[c] = {k: (v * inv if p == 0 else v * inv % p) for k, v in row.items()}
                r += 1
                break
            piv = pivots[c]
            f = row[c]
            for k, v in piv.items():
                nv = row.get(k, 0) - f * v
                if p:
                    nv %= p
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
    return r


def _scalar(x, p):
    if p:
        return int(x) % p
    return Fraction(int(x.numerator), int(x.denominator))


def coker_dimension(nvars, twists, relations, ideal_gens, d, p: int = 0) -> int:
    """dim_k of the degree-d piece of coker(relations) over S/(ideal_gens)."""
    basis = {}
    for c, t in enumerate(twists):
        for m in monomials_of_degree(nvars, d - t):
            basis[(c, m)] = len(basis)
    if not basis:
        return 0
    rows = []

    def add_multiples(vec, deg):
        if deg is None or deg > d:
            return
        for m in monomials_of_degree(nvars, d - deg):
            row = {}
            for (c, e), x in vec.items():
                key = basis[(c, mono_mul(e, m))]
                row[key] = row.get(key, 0) + _scalar(x, p)
            rows.append(row)

    for v in relations:
        if v:
            comp = next(iter(v))[0]
            e0 = next(iter(v))[1]
            add_multiples(v, sum(e0) + twists[comp])
    for g in ideal_gens:
        gd = poly_degree(g)
        for c, t in enumerate(twists):
            add_multiples({(c, e): x for e, x in g.items()}, gd + t)
    return len(basis) - rank(rows, p)


def hilbert_oracle(M, d: int) -> int:
    ring = M.ring
    return coker_dimension(ring.nvars, M.twists, M.relations, ring.ideal_gens, d,
                           ring.field.characteristic)
