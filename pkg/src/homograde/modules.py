"""Presented graded modules over standard-graded quotient rings S/I.

A module is the cokernel of a presentation: generators with degrees
(``twists``) and homogeneous relation vectors.  As an S-module it is
``S^r / (relations + I S^r)``, which is what every Groebner computation here
works with.  The graded maximal ideal (all variables) stands in for the
maximal ideal of a local ring.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import inf

from .core import (
    FieldSpec,
    PolynomialRing,
    Polynomial,
    format_poly,
    mono_divides,
    monomials_of_degree,
    poly_to_vec,
    vec_degree,
    vec_mul_poly,
    StructuralError,
)
from .groebner import (
    GroebnerBasis,
    Ideal,
    ResourceError,
    groebner,
    ideal_times_basis,
    kernel,
    minimal_generators,
    reduce_mod_ideal,
)


class ContractError(ValueError):
    """A caller-asserted precondition does not hold."""


class QuotientRing:
    """R = S/I with S a standard-graded polynomial ring and I homogeneous, proper."""

    def __init__(self, field: FieldSpec, names, ideal_gens=(), name: str = "R"):
        self.poly_ring = PolynomialRing(field, tuple(names))
        self.ideal = Ideal(self.poly_ring, ideal_gens)
        if self.ideal.is_unit():
            raise ValueError("defining ideal must be proper")
        for g in self.ideal.gens:
            if sum(next(iter(g))) == 0:
                raise ValueError("defining ideal must be proper")
        self.name = name
        self.cache: dict = {}

    @property
    def field(self) -> FieldSpec:
        return self.poly_ring.field

    @property
    def names(self):
        return self.poly_ring.names

    @property
    def nvars(self) -> int:
        return self.poly_ring.nvars

    @property
    def ideal_gens(self):
        return self.ideal.gens

    @property
    def ideal_gb(self) -> GroebnerBasis:
        return self.ideal.gb()

    def reduce(self, f: dict) -> dict:
        return self.ideal.normal_form(f)

    def reduce_vec(self, v: dict) -> dict:
        return reduce_mod_ideal(v, self.ideal_gb)

    def variables(self) -> list:
        out = []
        for i in range(self.nvars):
            e = [0] * self.nvars
            e[i] = 1
            out.append({tuple(e): self.field(1)})
        return out

    def one(self) -> dict:
        return {(0,) * self.nvars: self.field(1)}

    def quotient(self, extra_gens) -> "QuotientRing":
        return QuotientRing(self.field, self.names, list(self.ideal.gens) + list(extra_gens),
                            name=self.name + "'")

    def polynomial_ring(self) -> "QuotientRing":
        return QuotientRing(self.field, self.names, (), name="S")

    def same_as(self, other: "QuotientRing") -> bool:
        return (self is other) or (
            self.field == other.field and self.names == other.names and self.ideal == other.ideal)

    def __repr__(self):
        if not self.ideal.gens:
            return f"{self.field}[{','.join(self.names)}]"
        return f"{self.field}[{','.join(self.names)}]/{self.ideal!r}"


@dataclass(frozen=True)
class GradedFreeModule:
    ring: QuotientRing
    twists: tuple = ()

    @property
    def rank(self) -> int:
        return len(self.twists)


@dataclass
class GradedMap:
    """Degree-0 map between graded free modules, stored by columns."""
    source: GradedFreeModule
    target: GradedFreeModule
    columns: list = field(default_factory=list)

    def __post_init__(self):
        if len(self.columns) != self.source.rank:
            raise StructuralError("one column per source basis element required")
        for j, col in enumerate(self.columns):
            if col and vec_degree(col, self.target.twists) != self.source.twists[j]:
                raise StructuralError(f"column {j} is not homogeneous of the source degree")

    def entry(self, i: int, j: int) -> dict:
        return {e: c for (k, e), c in self.columns[j].items() if k == i}


class GModule:
    """Finitely generated graded module ``coker(relations)`` over a QuotientRing."""

    def __init__(self, ring: QuotientRing, twists, relations=(), *, reduce=True, minimal=False):
        self.ring = ring
        self.twists = tuple(int(t) for t in twists)
        rels = []
        for v in relations:
            if reduce:
                v = ring.reduce_vec(v)
            if v:
                for (c, _e) in v:
                    if not 0 <= c < len(self.twists):
                        raise StructuralError("relation refers to a missing generator")
                vec_degree(v, self.twists)
                rels.append(v)
        self.relations = tuple(rels)
        self.rel_degrees = tuple(vec_degree(v, self.twists) for v in self.relations)
        self._gb = None
        self._minimal = self if minimal else None
        self._resolution = None
        self.cache: dict = {}
        self.certificates: dict = {}

    # -- construction helpers
    @classmethod
    def free(cls, ring, twists=(0,)) -> "GModule":
        return cls(ring, twists, (), minimal=True)

    @classmethod
    def cyclic(cls, ring, ideal_gens, twist: int = 0) -> "GModule":
        """R/J (shifted so its generator sits in degree ``twist``)."""
        return cls(ring, (twist,), [poly_to_vec(g) for g in ideal_gens if g])

    @classmethod
    def residue_field(cls, ring) -> "GModule":
        return cls.cyclic(ring, ring.variables())

    @classmethod
    def from_matrix(cls, ring, rows, twists) -> "GModule":
        """Cokernel of a matrix given as rows (one row per generator) of polynomials."""
        nrows = len(rows)
        if nrows != len(twists):
            raise StructuralError("one twist per row required")
        ncols = len(rows[0]) if rows else 0
        cols = []
        for j in range(ncols):
            v = {}
            for i in range(nrows):
                f = rows[i][j]
                if isinstance(f, Polynomial):
                    f = f.terms
                for e, c in f.items():
                    v[(i, e)] = c
            cols.append(v)
        return cls(ring, twists, cols)

    # -- basic data
    @property
    def rank(self) -> int:
        return len(self.twists)

    @property
    def field(self):
        return self.ring.field

    def matrix(self) -> list:
        """Presentation matrix as rows of polynomial dicts."""
        return [[{e: c for (k, e), c in v.items() if k == i} for v in self.relations]
                for i in range(self.rank)]

    def gb(self) -> GroebnerBasis:
        if self._gb is None:
            fixed = ideal_times_basis(self.ring.ideal_gens, self.rank)
            self._gb = groebner(list(self.relations), self.twists, self.ring.nvars, self.field,
                                fixed=fixed)
        return self._gb

    def normal_form(self, v: dict) -> dict:
        return self.gb().normal_form(v)

    def is_zero(self) -> bool:
        return self.rank == 0 or self.gb().is_unit()

    def annihilates(self, f: dict) -> bool:
        """True when f * M = 0."""
        gb = self.gb()
        return all(not gb.normal_form(poly_to_vec(f, c)) for c in range(self.rank))

    def hilbert_function(self, d: int) -> int:
        """dim_k of the degree-d piece, by counting standard monomials."""
        gb = self.gb()
        total = 0
        n = self.ring.nvars
        for c, t in enumerate(self.twists):
            lms = gb.leading_monomials(c)
            for m in monomials_of_degree(n, d - t):
                if not any(mono_divides(l, m) for l in lms):
                    total += 1
        return total

    def hilbert_values(self, lo: int, hi: int) -> list:
        return [self.hilbert_function(d) for d in range(lo, hi + 1)]

    def length_if_finite(self, max_degree: int = 64) -> int | None:
        """Total k-dimension when M has finite length (checked from leading terms)."""
        if self.is_zero():
            return 0
        lo = min(self.twists)
        total = 0
        for d in range(lo, lo + max_degree):
            h = self.hilbert_function(d)
            total += h
            if d >= max(self.twists) and h == 0:
                return total
        return None

    # -- structure
    def minimal(self) -> "GModule":
        if self._minimal is None:
            self._minimal = minimal_presentation(self)
            self._minimal._minimal = self._minimal
        return self._minimal

    @property
    def num_generators(self) -> int:
        return self.minimal().rank

    def resolution(self, max_steps: int, max_rank: int | None = None) -> "Resolution":
        m = self.minimal()
        if m is not self:
            return m.resolution(max_steps, max_rank)
        if self._resolution is None:
            self._resolution = Resolution(self)
        self._resolution.extend(max_steps, max_rank)
        return self._resolution

    def annihilator(self) -> Ideal:
        if "ann" not in self.cache:
            self.cache["ann"] = annihilator(self)
        return self.cache["ann"]

    def __repr__(self):
        return (f"GModule(rank={self.rank}, twists={self.twists}, "
                f"relations={[format_vec(v, self.ring.names) for v in self.relations]})")


def format_vec(v: dict, names) -> str:
    comps = sorted({c for c, _ in v})
    return "[" + ", ".join(f"{c}:{format_poly({e: x for (k, e), x in v.items() if k == c}, names)}"
                           for c in comps) + "]"


# ---------------------------------------------------------------- presentations

def _prune(twists: list, rels: list, fld) -> tuple[list, list]:
    """Remove generators killed by a relation with a unit entry."""
    twists = list(twists)
    rels = [dict(v) for v in rels]
    p = fld.characteristic
    while True:
        hit = None
        for j, v in enumerate(rels):
            for (c, e), x in sorted(v.items(), key=lambda t: t[0]):
                if not any(e):
                    hit = (j, c, x)
                    break
            if hit:
                break
        if hit is None:
            return twists, rels
        j, i, a = hit
        piv = rels[j]
        inv = fld.inv(a)
        new_rels = []
        for k, v in enumerate(rels):
            if k == j:
                continue
            coeff = {e: x for (c, e), x in v.items() if c == i}
            if coeff:
                # v -= (coeff / a) * piv
                factor = {e: (-x * inv) % p if p else -x * inv for e, x in coeff.items()}
                add = vec_mul_poly(piv, factor, fld)
                w = dict(v)
                for t, x in add.items():
                    y = w.get(t, 0) + x
                    if p:
                        y %= p
                    if y:
                        w[t] = y
                    else:
                        w.pop(t, None)
                v = w
            new_rels.append(v)
        # drop generator i; renumber
        out = []
        for v in new_rels:
            w = {}
            for (c, e), x in v.items():
                if c == i:
                    continue  # cannot happen after elimination
                w[(c - 1 if c > i else c, e)] = x
            out.append(w)
        del twists[i]
        rels = out


def minimal_presentation(M: GModule) -> GModule:
    """Same module presented with a minimal generating set and minimal relations."""
    ring = M.ring
    twists, rels = _prune(M.twists, [ring.reduce_vec(v) for v in M.relations], M.field)
    rels = [ring.reduce_vec(v) for v in rels]
    rels = [v for v in rels if v]
    if rels:
        fixed = ideal_times_basis(ring.ideal_gens, len(twists))
        idx = minimal_generators(rels, twists, ring.nvars, M.field, fixed=fixed)
        rels = [rels[i] for i in idx]
    return GModule(ring, twists, rels, reduce=False, minimal=True)


# ---------------------------------------------------------------- resolutions

class Resolution:
    """Minimal graded free resolution, extended lazily.

    ``twists[i]`` are the generator degrees of F_i and ``differentials[i]``
    (i >= 1) the columns of F_i -> F_{i-1}.
    """

    def __init__(self, M: GModule):
        self.module = M
        self.ring = M.ring
        if M.rank == 0:
            self.twists = []
            self.differentials = [None]
            self.terminated = True
            return
        self.twists = [M.twists]
        self.differentials = [None]
        self.terminated = False
        if M.relations:
            self.twists.append(M.rel_degrees)
            self.differentials.append(list(M.relations))
        else:
            self.terminated = True

    @property
    def computed_steps(self) -> int:
        return len(self.twists) - 1

    @property
    def length(self) -> float:
        if not self.twists:
            return -inf
        return len(self.twists) - 1

    @property
    def status(self) -> str:
        return "terminated" if self.terminated else "truncated"

    def extend(self, max_steps: int, max_rank: int | None = None):
        ring = self.ring
        while not self.terminated and len(self.twists) - 1 < max_steps:
            i = len(self.twists) - 1
            if max_rank is not None and len(self.twists[i]) > max_rank:
                raise ResourceError(f"resolution rank {len(self.twists[i])} exceeds cap {max_rank}",
                                    partial=self)
            cols = self.differentials[i]
            ker = kernel(cols, self.twists[i], self.twists[i - 1], ring.nvars, ring.field,
                         ideal=ring.ideal_gens, ideal_gb=ring.ideal_gb)
            if not ker:
                self.terminated = True
                break
            self.twists.append(tuple(vec_degree(v, self.twists[i]) for v in ker))
            self.differentials.append(ker)

    def betti(self) -> list:
        return [len(t) for t in self.twists]

    def graded_betti(self) -> list:
        return [sorted(t) for t in self.twists]

    def rank(self, i: int) -> int:
        return len(self.twists[i]) if 0 <= i < len(self.twists) else 0


def minimal_free_resolution(M: GModule, max_steps: int, max_rank=None) -> Resolution:
    return M.resolution(max_steps, max_rank)


def syzygy(M: GModule, i: int, max_rank=None) -> GModule:
    """Omega^i(M): cokernel of F_{i+1} -> F_i in the minimal resolution."""
    if i < 0:
        raise ValueError("syzygy index must be non-negative")
    if i == 0:
        return M
    res = M.resolution(i + 1, max_rank)
    if i >= len(res.twists):
        return GModule(M.ring, ())
    rels = res.differentials[i + 1] if i + 1 < len(res.differentials) else []
    return GModule(M.ring, res.twists[i], rels, reduce=False, minimal=True)


# ---------------------------------------------------------------- subquotients

def subquotient(ring: QuotientRing, ambient_twists, *, out_columns=None, out_twists=(),
                out_relations=(), boundaries=(), ambient_relations=(), cycles=None) -> GModule:
    """Z / (B + relations) where Z = kernel of the outgoing map modulo its target relations.

    ``out_columns[j]`` is the image of ambient basis vector j.  Passing
    ``cycles`` skips the kernel computation.
    """
    n, fld = ring.nvars, ring.field
    ambient_twists = tuple(ambient_twists)
    if cycles is None:
        cycles = _cycles(ring, ambient_twists, out_columns, out_twists, out_relations)
    if not cycles:
        return GModule(ring, (), minimal=True)
    ztw = tuple(vec_degree(z, ambient_twists) for z in cycles)
    rels = kernel(cycles, ztw, ambient_twists, n, fld,
                  target_relations=list(boundaries) + list(ambient_relations),
                  ideal=ring.ideal_gens, ideal_gb=ring.ideal_gb)
    return GModule(ring, ztw, rels, reduce=False).minimal()


def _cycles(ring, ambient_twists, out_columns, out_twists, out_relations):
    n, fld = ring.nvars, ring.field
    r = len(ambient_twists)
    if out_columns is None or all(not c for c in out_columns):
        zero = (0,) * n
        return [{(j, zero): fld(1)} for j in range(r)]
    return kernel(out_columns, ambient_twists, out_twists, n, fld,
                  target_relations=out_relations, ideal=ring.ideal_gens, ideal_gb=ring.ideal_gb)


def subquotient_is_zero(ring: QuotientRing, ambient_twists, *, out_columns=None, out_twists=(),
                        out_relations=(), boundaries=(), ambient_relations=()) -> bool:
    ambient_twists = tuple(ambient_twists)
    cycles = _cycles(ring, ambient_twists, out_columns, out_twists, out_relations)
    if not cycles:
        return True
    fixed = list(boundaries) + list(ambient_relations) + ideal_times_basis(ring.ideal_gens,
                                                                         len(ambient_twists))
    gb = groebner([], ambient_twists, ring.nvars, ring.field, fixed=fixed)
    return all(not gb.normal_form(z) for z in cycles)


# ---------------------------------------------------------------- Hom, tensor, dual

def _block(v: dict, block: int, width: int) -> dict:
    return {(block * width + c, e): x for (c, e), x in v.items()}


def hom_data(M: GModule, N: GModule):
    """Ambient data describing Hom(M, N) as a subquotient of Hom(F_0, G_0)."""
    M = M.minimal()
    N = N.minimal()
    rN = N.rank
    amb = tuple(g - f for f in M.twists for g in N.twists)
    out_tw = tuple(g - d for d in M.rel_degrees for g in N.twists)
    cols = []
    for k in range(M.rank):
        for c in range(rN):
            v = {}
            for j, rel in enumerate(M.relations):
                for (kk, e), x in rel.items():
                    if kk == k:
                        v[(j * rN + c, e)] = x
            cols.append(v)
    out_rels = [_block(b, j, rN) for j in range(len(M.relations)) for b in N.relations]
    amb_rels = [_block(b, k, rN) for k in range(M.rank) for b in N.relations]
    return amb, cols, out_tw, out_rels, amb_rels


def hom_module(M: GModule, N: GModule) -> GModule:
    _same_ring(M, N)
    amb, cols, out_tw, out_rels, amb_rels = hom_data(M, N)
    return subquotient(M.ring, amb, out_columns=cols, out_twists=out_tw,
                       out_relations=out_rels, ambient_relations=amb_rels)


def tensor(M: GModule, N: GModule) -> GModule:
    _same_ring(M, N)
    M, N = M.minimal(), N.minimal()
    rN = N.rank
    tw = tuple(f + g for f in M.twists for g in N.twists)
    rels = []
    for rel in M.relations:
        for c in range(rN):
            rels.append({(k * rN + c, e): x for (k, e), x in rel.items()})
    for k in range(M.rank):
        for rel in N.relations:
            rels.append(_block(rel, k, rN))
    return GModule(M.ring, tw, rels, reduce=False)


def dual(M: GModule) -> GModule:
    return hom_module(M, GModule.free(M.ring))


def _same_ring(M, N):
    if not M.ring.same_as(N.ring):
        raise StructuralError("modules over different rings")


# ---------------------------------------------------------------- misc operations

def hilbert_function(M: GModule, d: int) -> int:
    return M.hilbert_function(d)


def is_free(M: GModule) -> tuple[bool, tuple]:
    m = M.minimal()
    return (not m.relations, m.twists)


def base_change(M: GModule, extra_gens, restrict: bool = False, ring: QuotientRing | None = None) -> GModule:
    """M over R/J; with ``restrict`` the caller asserts J*M = 0 and it is checked."""
    extra = [g.terms if isinstance(g, Polynomial) else g for g in extra_gens]
    if restrict:
        for f in extra:
            if not M.annihilates(f):
                raise ContractError("J*M != 0: module is not a module over R/J")
    new_ring = ring if ring is not None else M.ring.quotient(extra)
    return GModule(new_ring, M.twists, M.relations)


def annihilator(M: GModule) -> Ideal:
    """ann M lifted to S (it contains the defining ideal of R)."""
    ring = M.ring
    S = ring.poly_ring
    if M.is_zero():
        return Ideal.unit(S)
    M = M.minimal()
    r = M.rank
    tw = tuple(M.twists[c] - M.twists[i] for i in range(r) for c in range(r))
    zero = (0,) * ring.nvars
    v = {(i * r + i, zero): ring.field(1) for i in range(r)}
    rels = [_block(rel, i, r) for i in range(r) for rel in M.relations]
    rels += ideal_times_basis(ring.ideal_gens, r * r)
    ker = kernel([v], (0,), tw, ring.nvars, ring.field, target_relations=rels)
    gens = [{e: x for (_, e), x in k.items()} for k in ker]
    return Ideal(S, list(ring.ideal_gens) + gens)


def ideal_module_generators(ring: QuotientRing, J: Ideal) -> list:
    """Minimal homogeneous generators of the image of J in R."""
    gens = [ring.reduce(g) for g in J.gens]
    gens = [g for g in gens if g]
    if not gens:
        return []
    fixed = [poly_to_vec(f) for f in ring.ideal_gens]
    idx = minimal_generators([poly_to_vec(g) for g in gens], (0,), ring.nvars, ring.field, fixed=fixed)
    return [gens[i] for i in idx]


def cyclic_ideal(M: GModule):
    """If M is cyclic return (J, twist) with M = (R/J)(-twist), else None."""
    m = M.minimal()
    if m.rank != 1:
        return None
    J = annihilator(m)
    return J, m.twists[0]


def module_kernel(M: GModule, N: GModule, columns) -> GModule:
    """Kernel of the map M -> N sending generator j of M (minimal) to columns[j] in N's ambient."""
    M2, N2 = M, N
    return subquotient(M.ring, M2.twists, out_columns=columns, out_twists=N2.twists,
                       out_relations=list(N2.relations), ambient_relations=list(M2.relations))

