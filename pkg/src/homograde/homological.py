"""Bounded complexes, homology, Koszul complexes, Ext/Tor and quasi-resolution certificates."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import inf

from .core import apply_columns, poly_degree, vec_degree
from .groebner import groebner, ideal_times_basis
from .modules import (
    GModule,
    QuotientRing,
    Resolution,
    base_change,
    cyclic_ideal,
    ideal_module_generators,
    is_free,
    subquotient,
    subquotient_is_zero,
)


class UnsupportedInput(ValueError):
    """The engine deliberately does not handle this input (distinct from a negative answer)."""


class ChainComplex:
    """Bounded complex X_i of presented graded modules with differentials X_i -> X_{i-1}.

    ``terms[i]`` are generator degrees of X_i, ``relations[i]`` (optional)
    present X_i as a cokernel, ``differentials[i]`` lists the images of the
    generators of X_i in the ambient free module of X_{i-1}.  With no
    relations the terms are graded free modules.
    """

    def __init__(self, ring: QuotientRing, terms: dict, differentials: dict,
                 relations: dict | None = None, check: bool = True):
        self.ring = ring
        self.terms = {i: tuple(t) for i, t in terms.items()}
        self.relations = {i: list(r) for i, r in (relations or {}).items()}
        self.differentials = {i: list(d) for i, d in differentials.items()}
        for i, cols in self.differentials.items():
            if len(cols) != len(self.terms.get(i, ())):
                raise ValueError(f"differential {i} has the wrong number of columns")
            tgt = self.terms.get(i - 1, ())
            for j, c in enumerate(cols):
                if c and vec_degree(c, tgt) != self.terms[i][j]:
                    raise ValueError(f"differential {i} is not of degree 0")
        self._homology: dict = {}
        if check:
            self.check_square_zero()

    def rels(self, i):
        return self.relations.get(i, [])

    def diff(self, i):
        cols = self.differentials.get(i)
        if cols is None:
            return [{} for _ in self.terms.get(i, ())]
        return cols

    def check_square_zero(self):
        for i in sorted(self.differentials):
            if i - 1 not in self.differentials or not self.terms.get(i - 2):
                continue
            tw = self.terms[i - 2]
            fixed = self.rels(i - 2) + ideal_times_basis(self.ring.ideal_gens, len(tw))
            gb = groebner([], tw, self.ring.nvars, self.ring.field, fixed=fixed)
            inner = self.differentials[i - 1]
            for col in self.differentials[i]:
                img = apply_columns(inner, col, self.ring.field)
                if gb.normal_form(img):
                    raise ValueError(f"d_{i-1} o d_{i} != 0")

    def indices(self):
        return sorted(i for i, t in self.terms.items() if t)

    def term_module(self, i) -> GModule:
        return GModule(self.ring, self.terms.get(i, ()), self.rels(i))

    def term_is_zero(self, i) -> bool:
        t = self.terms.get(i, ())
        if not t:
            return True
        if not self.rels(i):
            return False
        return self.term_module(i).is_zero()

    def _hdata(self, i):
        amb = self.terms.get(i, ())
        out_cols = self.diff(i) if self.terms.get(i - 1) else None
        return dict(out_columns=out_cols, out_twists=self.terms.get(i - 1, ()),
                    out_relations=self.rels(i - 1),
                    boundaries=self.diff(i + 1) if self.terms.get(i + 1) else [],
                    ambient_relations=self.rels(i)), amb

    def homology(self, i) -> GModule:
        if i not in self._homology:
            kw, amb = self._hdata(i)
            if not amb:
                self._homology[i] = GModule(self.ring, ())
            else:
                self._homology[i] = subquotient(self.ring, amb, **kw)
        return self._homology[i]

    def homology_is_zero(self, i) -> bool:
        if i in self._homology:
            return self._homology[i].is_zero()
        kw, amb = self._hdata(i)
        if not amb:
            return True
        return subquotient_is_zero(self.ring, amb, **kw)


def homology(C: ChainComplex, i: int) -> GModule:
    return C.homology(i)


@dataclass
class ComplexProfile:
    sup: float
    inf: float
    hsup: float
    hinf: float

    @property
    def length(self) -> float:
        if self.sup == -inf:
            return -inf
        return self.sup - self.inf


def complex_profile(C: ChainComplex) -> ComplexProfile:
    nz = [i for i in C.indices() if not C.term_is_zero(i)]
    sup_ = max(nz) if nz else -inf
    inf_ = min(nz) if nz else inf
    hz = [i for i in nz if not C.homology_is_zero(i)]
    return ComplexProfile(sup_, inf_, max(hz) if hz else -inf, min(hz) if hz else inf)


# ---------------------------------------------------------------- Koszul

def koszul_complex(seq, M: GModule | None = None, ring: QuotientRing | None = None) -> ChainComplex:
    """K(seq) tensored with M (M = R when omitted).

    Basis of K_p: increasing index tuples; d(e_S) = sum_pos (-1)^pos s_{S[pos]} e_{S minus S[pos]}.
    """
    if M is None:
        M = GModule.free(ring)
    ring = M.ring
    M = M.minimal()
    fld = ring.field
    seq = [ring.reduce(f) if f else {} for f in seq]
    degs = []
    for f in seq:
        d = poly_degree(f)
        if d is None or d == -1 or d == 0:
            raise ValueError("Koszul sequence elements must be homogeneous of positive degree")
        degs.append(d)
    t = len(seq)
    r = M.rank
    subsets = {p: list(combinations(range(t), p)) for p in range(t + 1)}
    index = {p: {S: n for n, S in enumerate(subsets[p])} for p in subsets}
    terms, rels, diffs = {}, {}, {}
    for p in range(t + 1):
        terms[p] = tuple(sum(degs[k] for k in S) + tw for S in subsets[p] for tw in M.twists)
        rels[p] = [{(n * r + c, e): x for (c, e), x in rel.items()}
                   for n in range(len(subsets[p])) for rel in M.relations]
        if p == 0:
            continue
        cols = []
        for S in subsets[p]:
            for c in range(r):
                v = {}
                for pos, k in enumerate(S):
                    rest = S[:pos] + S[pos + 1:]
                    comp = index[p - 1][rest] * r + c
                    sign = 1 if pos % 2 == 0 else -1
                    for e, x in seq[k].items():
                        key = (comp, e)
                        y = fld.normalize(v.get(key, 0) + sign * x)
                        if y:
                            v[key] = y
                        else:
                            v.pop(key, None)
                cols.append(v)
        diffs[p] = cols
    return ChainComplex(ring, terms, diffs, rels)


def koszul_homology_sup(seq, M: GModule) -> float:
    """max{p : H_p(seq; M) != 0}, scanning from the top."""
    C = koszul_complex(seq, M)
    for p in range(len(seq), -1, -1):
        if not C.homology_is_zero(p):
            return p
    return -inf


# ---------------------------------------------------------------- Ext / Tor

def _hom_term(res: Resolution, i: int, N: GModule):
    if i < 0 or i >= len(res.twists):
        return (), []
    rN = N.rank
    tw = tuple(g - a for a in res.twists[i] for g in N.twists)
    rels = [{(j * rN + c, e): x for (c, e), x in rel.items()}
            for j in range(len(res.twists[i])) for rel in N.relations]
    return tw, rels


def _hom_diff(res: Resolution, i: int, N: GModule):
    """Columns of Hom(F_i, N) -> Hom(F_{i+1}, N), one per ambient basis element of Hom(F_i, N)."""
    rN = N.rank
    n_i = len(res.twists[i]) if i < len(res.twists) else 0
    if i + 1 >= len(res.twists):
        return [{} for _ in range(n_i * rN)]
    d = res.differentials[i + 1]
    cols = []
    for k in range(n_i):
        for c in range(rN):
            v = {}
            for j, col in enumerate(d):
                for (kk, e), x in col.items():
                    if kk == k:
                        v[(j * rN + c, e)] = x
            cols.append(v)
    return cols


def hom_complex(res: Resolution, N: GModule, top: int) -> ChainComplex:
    """Hom(F, N) re-indexed homologically: X_{-i} = Hom(F_i, N), 0 <= i <= top."""
    N = N.minimal()
    terms, rels, diffs = {}, {}, {}
    for i in range(0, top + 1):
        tw, rl = _hom_term(res, i, N)
        terms[-i] = tw
        rels[-i] = rl
        if i + 1 <= top:
            diffs[-i] = _hom_diff(res, i, N)
    return ChainComplex(res.ring, terms, diffs, rels, check=False)


def _ext_data(M: GModule, N: GModule, i: int, max_rank=None):
    res = M.resolution(i + 1, max_rank)
    N = N.minimal()
    amb, amb_rels = _hom_term(res, i, N)
    if not amb:
        return None
    out_tw, out_rels = _hom_term(res, i + 1, N)
    out_cols = _hom_diff(res, i, N) if out_tw else None
    bnd = _hom_diff(res, i - 1, N) if i >= 1 else []
    return amb, dict(out_columns=out_cols, out_twists=out_tw, out_relations=out_rels,
                     boundaries=bnd, ambient_relations=amb_rels)


def ext(M: GModule, N: GModule, i: int, max_rank=None) -> GModule:
    """Ext^i_R(M, N) from the minimal resolution of M (first argument)."""
    if i < 0:
        raise ValueError("Ext index must be non-negative")
    data = _ext_data(M, N, i, max_rank)
    if data is None:
        return GModule(M.ring, ())
    amb, kw = data
    return subquotient(M.ring, amb, **kw)


def ext_is_zero(M: GModule, N: GModule, i: int, max_rank=None) -> bool:
    data = _ext_data(M, N, i, max_rank)
    if data is None:
        return True
    amb, kw = data
    return subquotient_is_zero(M.ring, amb, **kw)


def _tor_term(res, i, N):
    if i < 0 or i >= len(res.twists):
        return (), []
    rN = N.rank
    tw = tuple(a + g for a in res.twists[i] for g in N.twists)
    rels = [{(j * rN + c, e): x for (c, e), x in rel.items()}
            for j in range(len(res.twists[i])) for rel in N.relations]
    return tw, rels


def _tor_diff(res, i, N):
    """Columns of F_i (x) N -> F_{i-1} (x) N."""
    rN = N.rank
    cols = []
    for col in res.differentials[i]:
        for c in range(rN):
            cols.append({(k * rN + c, e): x for (k, e), x in col.items()})
    return cols


def tensor_complex(res: Resolution, N: GModule, top: int) -> ChainComplex:
    N = N.minimal()
    terms, rels, diffs = {}, {}, {}
    for i in range(0, min(top, len(res.twists) - 1) + 1):
        terms[i], rels[i] = _tor_term(res, i, N)
        if i >= 1:
            diffs[i] = _tor_diff(res, i, N)
    return ChainComplex(res.ring, terms, diffs, rels, check=False)


def _tor_data(M, N, i, max_rank=None):
    res = M.resolution(i + 1, max_rank)
    N = N.minimal()
    amb, amb_rels = _tor_term(res, i, N)
    if not amb:
        return None
    out_tw, out_rels = _tor_term(res, i - 1, N)
    out_cols = _tor_diff(res, i, N) if i >= 1 else None
    bnd = _tor_diff(res, i + 1, N) if i + 1 < len(res.twists) else []
    return amb, dict(out_columns=out_cols, out_twists=out_tw, out_relations=out_rels,
                     boundaries=bnd, ambient_relations=amb_rels)


def tor(M: GModule, N: GModule, i: int, max_rank=None) -> GModule:
    """Tor_i^R(M, N) = H_i(F (x) N) with F the minimal resolution of M."""
    if i < 0:
        raise ValueError("Tor index must be non-negative")
    data = _tor_data(M, N, i, max_rank)
    if data is None:
        return GModule(M.ring, ())
    amb, kw = data
    return subquotient(M.ring, amb, **kw)


def tor_is_zero(M, N, i, max_rank=None) -> bool:
    data = _tor_data(M, N, i, max_rank)
    if data is None:
        return True
    amb, kw = data
    return subquotient_is_zero(M.ring, amb, **kw)


# ---------------------------------------------------------------- quasi-projective resolutions

@dataclass
class QuasiResolutionCertificate:
    complex: ChainComplex
    multiplicities: dict = field(default_factory=dict)
    verdict: str = "unknown"
    reason: str = ""

    @property
    def gap(self) -> float:
        """sup P - hsup P for the certified complex."""
        prof = complex_profile(self.complex)
        return prof.sup - prof.hsup


def certify_quasi_projective_resolution(C: ChainComplex, M: GModule) -> QuasiResolutionCertificate:
    """Check that every H_i(C) is a direct sum of copies of M = R/J (up to twist).

    H_i qualifies iff J H_i = 0 and H_i is free over R/J (graded Nakayama on
    the minimal presentation after base change).  Only cyclic M is handled.
    """
    cyc = cyclic_ideal(M)
    if cyc is None:
        raise UnsupportedInput("quasi-resolution certification needs a cyclic module")
    J, _tw = cyc
    ring = C.ring
    extra = ideal_module_generators(ring, J)
    quotient = ring.quotient(extra)
    mult = {}
    for i in C.indices():
        if C.homology_is_zero(i):
            mult[i] = 0
            continue
        H = C.homology(i)
        if not all(H.annihilates(f) for f in extra):
            return QuasiResolutionCertificate(C, mult, "refuted", f"J does not annihilate H_{i}")
        free, twists = is_free(base_change(H, extra, restrict=True, ring=quotient))
        if not free:
            return QuasiResolutionCertificate(C, mult, "refuted", f"H_{i} is not free over R/J")
        mult[i] = len(twists)
    if not any(mult.values()):
        return QuasiResolutionCertificate(C, mult, "refuted", "all multiplicities are zero")
    return QuasiResolutionCertificate(C, mult, "certified", "every H_i is free over R/J")
