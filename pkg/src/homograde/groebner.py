"""Buchberger's algorithm for homogeneous submodules of graded free modules.

Everything here works on raw ``dict`` vectors ``{(component, exponents): coeff}``;
an ideal is the rank-one case.  Input must be homogeneous with respect to the
supplied twists (generator degrees).  Pairs are processed degree by degree
(the normal selection strategy coincides with the sugar strategy on
homogeneous input), which also lets a single run report which input
generators are minimal.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from itertools import combinations

from .core import (
    FieldSpec,
    Polynomial,
    PolynomialRing,
    MonomialOrder,
    mono_div,
    mono_divides,
    mono_lcm,
    mono_mul,
    poly_to_vec,
    term_sort_key,
    vec_degree,
)


class ResourceError(RuntimeError):
    """A Groebner run or resolution exceeded its configured caps."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


@dataclass
class Limits:
    max_degree: int = 32
    max_reductions: int = 10**6


DEFAULT_LIMITS = Limits()


class GroebnerBasis:
    """A (possibly degree-truncated) Groebner basis of a graded submodule."""

    def __init__(self, elements, leads, key, twists, nvars, fld, *, minimal=(),
                 reduced=True, degree_bound=None, rank=None):
        self.elements = elements
        self.leads = leads
        self.key = key
        self.twists = tuple(twists)
        self.nvars = nvars
        self.field = fld
        self.minimal = tuple(minimal)
        self.reduced = reduced
        self.degree_bound = degree_bound
        self.rank = len(self.twists) if rank is None else rank
        self._by_comp: dict = {}
        for el, lt in zip(elements, leads):
            self._by_comp.setdefault(lt[0], []).append((lt[1], el))

    def __len__(self):
        return len(self.elements)

    def leading_terms(self):
        return list(self.leads)

    def leading_monomials(self, comp: int = 0):
        return [lt[1] for lt in self.leads if lt[0] == comp]

    def normal_form(self, v: dict, counter=None) -> dict:
        return _reduce(v, self._by_comp, self.key, self.field, counter)

    def contains(self, v: dict) -> bool:
        if self.degree_bound is not None and v:
            d = vec_degree(v, self.twists)
            if d > self.degree_bound:
                raise ValueError("membership test above the truncation degree")
        return not self.normal_form(v)

    def is_unit(self) -> bool:
        """True when the basis contains every basis vector (the whole module)."""
        comps = {lt[0] for lt in self.leads if not any(lt[1])}
        return len(comps) == self.rank


def _find_divisor(by_comp, t):
    cands = by_comp.get(t[0])
    if not cands:
        return None
    e = t[1]
    for lm, el in cands:
        if mono_divides(lm, e):
            return lm, el
    return None


def _reduce(f: dict, by_comp, key, fld: FieldSpec, counter=None) -> dict:
    """Full reduction of ``f`` by monic basis elements indexed by component."""
    p = fld.characteristic
    f = dict(f)
    heap = [(key(t), t) for t in f]
    heapq.heapify(heap)
    rem = {}
    steps = 0
    while heap:
        _, t = heapq.heappop(heap)
        c = f.get(t)
        if c is None:
            continue
        hit = _find_divisor(by_comp, t)
        if hit is None:
            rem[t] = c
            del f[t]
            continue
        del f[t]
        lm, g = hit
        q = mono_div(t[1], lm)
        steps += 1
        for (gc, ge), gv in g.items():
            s = (gc, mono_mul(ge, q))
            if s == t:
                continue
            v = f.get(s)
            if v is None:
                v = -c * gv
                if p:
                    v %= p
                if v:
                    f[s] = v
                    heapq.heappush(heap, (key(s), s))
            else:
                v = v - c * gv
                if p:
                    v %= p
                if v:
                    f[s] = v
                else:
                    del f[s]
    if counter is not None:
        counter[0] += steps
    return rem


def _monic(v: dict, key, fld: FieldSpec):
    lt = min(v, key=key)
    c = v[lt]
    if c == 1:
        return v, lt
    inv = fld.inv(c)
    p = fld.characteristic
    if p:
        return {t: x * inv % p for t, x in v.items()}, lt
    return {t: x * inv for t, x in v.items()}, lt


def groebner(gens, twists, nvars, fld: FieldSpec, *, fixed=(), kind="grevlex",
             elimination=None, degree_bound=None, limits: Limits | None = None,
             reduce_result=True) -> GroebnerBasis:
    """Groebner basis of the submodule generated by ``fixed`` and ``gens``.

    Within each degree the fixed generators are processed first, then
    ``gens`` in input order; ``result.minimal`` lists the indices of ``gens``
    that were not already in the submodule generated by lower-degree data,
    the fixed part and earlier candidates, i.e. a minimal generating set of
    the image modulo the fixed part (graded Nakayama).
    """
    limits = limits or DEFAULT_LIMITS
    twists = tuple(twists)
    key = term_sort_key(nvars, twists, kind, elimination)
    ideal_mode = len(twists) == 1
    counter = [0]

    inputs = []
    for pos, v in enumerate(fixed):
        if v:
            inputs.append((vec_degree(v, twists), 0, pos, v, None))
    for pos, v in enumerate(gens):
        if v:
            inputs.append((vec_degree(v, twists), 1, pos, v, pos))
    inputs.sort(key=lambda x: (x[0], x[1], x[2]))

    G: list = []
    L: list = []
    by_comp: dict = {}
    pairs: list = []
    live: dict = {}
    minimal = []
    truncated = False

    def add(v):
        v, lt = _monic(v, key, fld)
        h = len(G)
        comp, e = lt
        # Gebauer-Moeller update
        cand = []
        for i in range(h):
            if L[i][0] != comp:
                continue
            lcm = mono_lcm(L[i][1], e)
            cand.append((i, lcm))
        keep = []
        for i, lcm in cand:
            dominated = False
            for j, lcm2 in cand:
                if j != i and lcm2 != lcm and mono_divides(lcm2, lcm):
                    dominated = True
                    break
            if not dominated:
                keep.append((i, lcm))
        groups: dict = {}
        for i, lcm in keep:
            groups.setdefault(lcm, []).append(i)
        new_pairs = []
        for lcm, idxs in groups.items():
            if ideal_mode and any(
                all(a == 0 or b == 0 for a, b in zip(L[i][1], e)) for i in idxs
            ):
                continue
            new_pairs.append((idxs[0], lcm))
        for (i, j), lcm in list(live.items()):
            if L[i][0] != comp or not mono_divides(e, lcm):
                continue
            if mono_lcm(L[i][1], e) != lcm and mono_lcm(L[j][1], e) != lcm:
                del live[(i, j)]
        G.append(v)
        L.append(lt)
        by_comp.setdefault(comp, []).append((e, v))
        for i, lcm in new_pairs:
            deg = sum(lcm) + twists[comp]
            live[(i, h)] = lcm
            heapq.heappush(pairs, (deg, key((comp, lcm)), i, h))

    def spoly(i, j, lcm):
        comp = L[i][0]
        qi = mono_div(lcm, L[i][1])
        qj = mono_div(lcm, L[j][1])
        out = {}
        p = fld.characteristic
        for (c, e), x in G[i].items():
            out[(c, mono_mul(e, qi))] = x
        for (c, e), x in G[j].items():
            t = (c, mono_mul(e, qj))
            y = out.get(t, 0) - x
            if p:
                y %= p
            if y:
                out[t] = y
            else:
                out.pop(t, None)
        out.pop((comp, lcm), None)
        return out

    k = 0
    while pairs or k < len(inputs):
        d_pair = pairs[0][0] if pairs else None
        d_in = inputs[k][0] if k < len(inputs) else None
        d = min(x for x in (d_pair, d_in) if x is not None)
        if degree_bound is not None and d > degree_bound:
            truncated = True
            break
        if d > limits.max_degree:
            raise ResourceError(f"Groebner run exceeded degree cap {limits.max_degree}")
        while pairs and pairs[0][0] == d:
            _, _, i, j = heapq.heappop(pairs)
            lcm = live.pop((i, j), None)
            if lcm is None:
                continue
            r = _reduce(spoly(i, j, lcm), by_comp, key, fld, counter)
            if r:
                add(r)
            if counter[0] > limits.max_reductions:
                raise ResourceError("Groebner run exceeded reduction cap")
        while k < len(inputs) and inputs[k][0] == d:
            _, _, _, v, cpos = inputs[k]
            k += 1
            r = _reduce(v, by_comp, key, fld, counter)
            if r:
                add(r)
                if cpos is not None:
                    minimal.append(cpos)
            if counter[0] > limits.max_reductions:
                raise ResourceError("Groebner run exceeded reduction cap")

    if reduce_result:
        G2 = []
        for idx, v in enumerate(G):
            tail = dict(v)
            lt = L[idx]
            lc = tail.pop(lt)
            r = _reduce(tail, by_comp, key, fld, counter)
            r[lt] = lc
            G2.append(r)
        G = G2
    order = sorted(range(len(G)), key=lambda i: key(L[i]))
    return GroebnerBasis([G[i] for i in order], [L[i] for i in order], key, twists,
                         nvars, fld, minimal=minimal, reduced=reduce_result,
                         degree_bound=degree_bound if truncated else None)


def spair_check(gb: GroebnerBasis) -> bool:
    """Independent Buchberger-criterion check: every S-pair reduces to zero.

    Uses a naive pair enumeration and plain top-down division, sharing no
    code with the pair-selection machinery above.
    """
    els, leads = gb.elements, gb.leads
    fld = gb.field
    for i, j in combinations(range(len(els)), 2):
        if leads[i][0] != leads[j][0]:
            continue
        lcm = mono_lcm(leads[i][1], leads[j][1])
        qi, qj = mono_div(lcm, leads[i][1]), mono_div(lcm, leads[j][1])
        ci, cj = els[i][leads[i]], els[j][leads[j]]
        s = {}
        for (c, e), x in els[i].items():
            t = (c, mono_mul(e, qi))
            s[t] = s.get(t, 0) + x * cj
        for (c, e), x in els[j].items():
            t = (c, mono_mul(e, qj))
            s[t] = s.get(t, 0) - x * ci
        s = {t: fld.normalize(x) for t, x in s.items()}
        s = {t: x for t, x in s.items() if x}
        if _naive_divide(s, els, leads, gb.key, fld):
            return False
    return True


def _naive_divide(f, els, leads, key, fld):
    f = dict(f)
    rem = {}
    while f:
        t = min(f, key=key)
        c = f[t]
        for g, lt in zip(els, leads):
            if lt[0] == t[0] and mono_divides(lt[1], t[1]):
                q = mono_div(t[1], lt[1])
                factor = c * fld.inv(g[lt])
                for (gc, ge), gv in g.items():
                    s = (gc, mono_mul(ge, q))
                    v = fld.normalize(f.get(s, 0) - factor * gv)
                    if v:
                        f[s] = v
                    else:
                        f.pop(s, None)
                break
        else:
            rem[t] = c
            del f[t]
    return rem


# ---------------------------------------------------------------- kernels

def minimal_generators(vectors, twists, nvars, fld, *, fixed=(), limits=None) -> list[int]:
    """Indices of a minimal generating subset of ``vectors`` modulo ``fixed``."""
    if not vectors:
        return []
    gb = groebner(vectors, twists, nvars, fld, fixed=fixed, limits=limits, reduce_result=False)
    return sorted(gb.minimal)


def ideal_times_basis(ideal_gens, rank: int, offset: int = 0) -> list:
    return [poly_to_vec(f, offset + c) for c in range(rank) for f in ideal_gens if f]


def kernel(columns, col_twists, target_twists, nvars, fld, *, target_relations=(),
           ideal=(), ideal_gb: GroebnerBasis | None = None, limits=None) -> list:
    """Minimal generators of {v : sum_j v_j columns[j] in target_relations + ideal*target}.

    The answer is taken modulo ``ideal`` times the source module, so it is the
    kernel of the induced map over the quotient ring S/ideal.  Computed by
    elimination: tag each column with its own basis vector, compute a
    Groebner basis in an order where every target term dominates every tag
    term, and keep the elements living purely in the tag block.
    """
    s = len(columns)
    if s == 0:
        return []
    r = len(target_twists)
    col_twists = tuple(col_twists)
    source_fixed = ideal_times_basis(ideal, s)
    if all(not c for c in columns):
        basis = [{(j, (0,) * nvars): fld(1)} for j in range(s)]
        return [basis[i] for i in minimal_generators(basis, col_twists, nvars, fld,
                                                     fixed=source_fixed, limits=limits)]
    tw = tuple(target_twists) + col_twists
    zero = (0,) * nvars
    gens = []
    for j, col in enumerate(columns):
        v = dict(col)
        v[(r + j, zero)] = fld(1)
        gens.append(v)
    fixed = list(target_relations) + ideal_times_basis(ideal, r) + ideal_times_basis(ideal, s, r)
    gb = groebner(gens, tw, nvars, fld, fixed=fixed, elimination=r, limits=limits,
                  reduce_result=False)
    ker = []
    for el, lt in zip(gb.elements, gb.leads):
        if lt[0] >= r:
            v = {(c - r, e): x for (c, e), x in el.items()}
            if ideal_gb is not None:
                v = reduce_mod_ideal(v, ideal_gb)
            if v:
                ker.append(v)
    if not ker:
        return []
    idx = minimal_generators(ker, col_twists, nvars, fld, fixed=source_fixed, limits=limits)
    return [ker[i] for i in idx]


def reduce_mod_ideal(v: dict, ideal_gb: GroebnerBasis) -> dict:
    """Reduce each component of ``v`` modulo an ideal given by a rank-one basis."""
    if not ideal_gb.elements:
        return dict(v)
    comps: dict = {}
    for (c, e), x in v.items():
        comps.setdefault(c, {})[(0, e)] = x
    out = {}
    for c, f in comps.items():
        for (_, e), x in ideal_gb.normal_form(f).items():
            out[(c, e)] = x
    return out


# ---------------------------------------------------------------- ideals

def buchberger(gens, order: MonomialOrder | None = None, limits=None) -> GroebnerBasis:
    """Reduced Groebner basis of a homogeneous ideal given by Polynomials."""
    gens = [g for g in gens]
    if not gens:
        raise ValueError("need at least one generator to know the ring; use Ideal for the zero ideal")
    ring = gens[0].ring
    kind = order.kind if order else "grevlex"
    for g in gens:
        if g.ring != ring:
            raise ValueError("generators live in different rings")
        if g.terms and g.homogeneous_degree is None:
            raise ValueError("buchberger expects homogeneous input")
    return groebner([poly_to_vec(g.terms) for g in gens], (0,), ring.nvars, ring.field,
                    kind=kind, limits=limits)


class Ideal:
    """Homogeneous ideal of a polynomial ring, with a cached reduced basis."""

    def __init__(self, ring: PolynomialRing, gens=()):
        self.ring = ring
        clean = []
        for g in gens:
            if isinstance(g, Polynomial):
                if g.ring != ring:
                    raise ValueError("generator from another ring")
                g = g.terms
            g = {m: c for m, c in g.items() if c}
            if g:
                degs = {sum(m) for m in g}
                if len(degs) != 1:
                    raise ValueError("inhomogeneous generator")
                clean.append(g)
        self.gens = tuple(clean)
        self._gb = None

    @classmethod
    def unit(cls, ring):
        return cls(ring, [{(0,) * ring.nvars: 1}])

    @property
    def fld(self):
        return self.ring.field

    def gb(self) -> GroebnerBasis:
        if self._gb is None:
            self._gb = groebner([poly_to_vec(g) for g in self.gens], (0,), self.ring.nvars, self.fld)
        return self._gb

    def basis_polys(self) -> list:
        return [{e: x for (_, e), x in el.items()} for el in self.gb().elements]

    def minimal_gens(self) -> list:
        idx = minimal_generators([poly_to_vec(g) for g in self.gens], (0,), self.ring.nvars, self.fld)
        return [self.gens[i] for i in idx]

    def polys(self):
        return [Polynomial(self.ring, g) for g in self.gens]

    def normal_form(self, f) -> dict:
        if isinstance(f, Polynomial):
            f = f.terms
        r = self.gb().normal_form(poly_to_vec(f))
        return {e: x for (_, e), x in r.items()}

    def contains(self, f) -> bool:
        return not self.normal_form(f)

    def contains_ideal(self, other: "Ideal") -> bool:
        return all(self.contains(g) for g in other.gens)

    def __eq__(self, other):
        return isinstance(other, Ideal) and self.ring == other.ring \
            and self.contains_ideal(other) and other.contains_ideal(self)

    def __hash__(self):
        return hash(self.ring)

    def is_unit(self) -> bool:
        return self.gb().is_unit()

    def is_zero(self) -> bool:
        return not self.gens

    def __add__(self, other: "Ideal") -> "Ideal":
        return Ideal(self.ring, self.gens + other.gens)

    def __mul__(self, other: "Ideal") -> "Ideal":
        from .core import poly_mul
        return Ideal(self.ring, [poly_mul(f, g, self.fld) for f in self.gens for g in other.gens])

    def intersect(self, other: "Ideal") -> "Ideal":
        n = self.ring.nvars
        if self.is_zero() or other.is_zero():
            return Ideal(self.ring)
        zero = (0,) * n
        v = {(0, zero): self.fld(1), (1, zero): self.fld(1)}
        rels = ideal_times_basis(self.gens, 1) + ideal_times_basis(other.gens, 1, 1)
        ker = kernel([v], (0,), (0, 0), n, self.fld, target_relations=rels)
        return Ideal(self.ring, [{e: x for (_, e), x in k.items()} for k in ker])

    def colon(self, other: "Ideal") -> "Ideal":
        n = self.ring.nvars
        jg = [g for g in other.gens if g]
        if not jg:
            return Ideal.unit(self.ring)
        tw = tuple(-sum(next(iter(g))) for g in jg)
        v = {}
        for i, g in enumerate(jg):
            for e, x in g.items():
                v[(i, e)] = x
        rels = [poly_to_vec(f, i) for i in range(len(jg)) for f in self.gens]
        ker = kernel([v], (0,), tw, n, self.fld, target_relations=rels)
        return Ideal(self.ring, [{e: x for (_, e), x in k.items()} for k in ker])

    def saturation(self, f) -> "Ideal":
        """self : f^infinity for a homogeneous polynomial f."""
        if isinstance(f, Polynomial):
            f = f.terms
        cur = self
        principal = Ideal(self.ring, [f])
        while True:
            nxt = cur.colon(principal)
            if nxt.is_unit() or nxt == cur:
                return nxt
            cur = nxt

    def radical_contains(self, f) -> bool:
        """f lies in the radical iff the saturation by f is the unit ideal."""
        if isinstance(f, Polynomial):
            f = f.terms
        if not f:
            return True
        return self.saturation(f).is_unit()

    def krull_dim(self) -> float:
        """dim S/I from the leading-term ideal (max independent variable set)."""
        gb = self.gb()
        if gb.is_unit():
            return float("-inf")
        lms = [lm for lm in gb.leading_monomials(0)]
        n = self.ring.nvars
        supports = [frozenset(i for i, a in enumerate(m) if a) for m in lms]
        for size in range(n, -1, -1):
            for subset in combinations(range(n), size):
                s = frozenset(subset)
                if not any(sup <= s for sup in supports):
                    return size
        return float("-inf")

    def __repr__(self):
        from .core import format_poly
        return "(" + ", ".join(format_poly(g, self.ring.names) for g in self.gens) + ")"


def ideal_colon(I: Ideal, J: Ideal) -> Ideal:
    return I.colon(J)


def ideal_intersect(I: Ideal, J: Ideal) -> Ideal:
    return I.intersect(J)


def ideal_sum(I: Ideal, J: Ideal) -> Ideal:
    return I + J


def syzygies(gb_or_gens, twists=None, nvars=None, fld=None) -> list:
    """Generators of the syzygy module of a list of vectors (or of a GroebnerBasis).

    Each returned syzygy ``s`` satisfies ``sum_j s_j * g_j = 0``; the result
    is a minimal generating set.
    """
    if isinstance(gb_or_gens, GroebnerBasis):
        gb = gb_or_gens
        gens, twists, nvars, fld = gb.elements, gb.twists, gb.nvars, gb.field
    else:
        gens = list(gb_or_gens)
    col_twists = tuple(vec_degree(g, twists) for g in gens)
    return kernel(gens, col_twists, twists, nvars, fld)
