"""Homological invariants with explicit certification status.

Every value is a CertifiedValue: the number plus how much of it is actually
known.  Exact values are proofs (modulo the engine being correct); lower
bounds come from finite Ext/Tor scans; budget-certified values carry a
caveat flag so reports can tell them apart from unconditional ones.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import inf

from .core import poly_to_vec
from .groebner import Ideal, ResourceError, groebner, ideal_times_basis, kernel
from .homological import (
    UnsupportedInput,
    certify_quasi_projective_resolution,
    ext,
    ext_is_zero,
    koszul_complex,
    koszul_homology_sup,
    tor_is_zero,
)
from .modules import (
    GModule,
    QuotientRing,
    cyclic_ideal,
    ideal_module_generators,
    is_free,
    syzygy,
    tensor,
)

EXACT, LOWER, UPPER, UNKNOWN = "exact", "lower-bound", "upper-bound", "unknown"


class ConventionError(ValueError):
    """Invariant undefined by convention (typically a zero module)."""


class EngineError(RuntimeError):
    """Two independent computations disagreed; this is a bug, not a verdict."""


def fmt_value(v) -> str:
    if v == inf:
        return "inf"
    if v == -inf:
        return "-inf"
    return str(int(v))


@dataclass(frozen=True)
class CertifiedValue:
    value: float
    status: str = EXACT
    evidence: str = ""
    flag: str = ""          # "", "caveat" (budget-certified) or "by-construction"

    @property
    def exact(self) -> bool:
        return self.status == EXACT

    @property
    def finite(self) -> bool:
        return self.value not in (inf, -inf)

    @property
    def exact_finite(self) -> bool:
        return self.exact and self.finite

    def to_dict(self) -> dict:
        d = {"value": fmt_value(self.value), "status": self.status, "evidence": self.evidence}
        if self.flag:
            d["flag"] = self.flag
        return d

    def __str__(self):
        v = fmt_value(self.value)
        if self.status == LOWER:
            v = "≥ " + v
        elif self.status == UPPER:
            v = "≤ " + v
        extra = "; ".join(x for x in (self.flag, self.evidence) if x)
        return f"{v} ({self.status}{'; ' + extra if extra else ''})"


@dataclass(frozen=True)
class Budgets:
    """Scan budgets.  ``bass`` and ``res_cap`` are offsets added to depth R."""
    ext: int = 10
    gdim: int = 10
    bass: int = 5
    res_cap: int = 2
    rank_cap: int = 256

    def __post_init__(self):
        for name in ("ext", "gdim", "bass", "res_cap", "rank_cap"):
            if getattr(self, name) < 1:
                raise ValueError(f"budget {name} must be >= 1")

    def key(self):
        return (self.ext, self.gdim, self.bass, self.res_cap, self.rank_cap)


DEFAULT = Budgets()


def _cached(M, name, cfg, compute, *extra):
    key = (name, cfg.key()) + extra
    if key not in M.cache:
        M.cache[key] = compute()
    return M.cache[key]


def _nonzero(M: GModule, what="module"):
    if M.is_zero():
        raise ConventionError(f"{what} is zero")


def ring_module(ring: QuotientRing) -> GModule:
    if "R" not in ring.cache:
        ring.cache["R"] = GModule.free(ring)
    return ring.cache["R"]


def residue_module(ring: QuotientRing) -> GModule:
    if "k" not in ring.cache:
        ring.cache["k"] = GModule.residue_field(ring)
    return ring.cache["k"]


def is_residue_field(M: GModule) -> bool:
    cyc = cyclic_ideal(M)
    if cyc is None:
        return False
    J, _ = cyc
    return all(J.contains(v) for v in M.ring.variables())


# ---------------------------------------------------------------- depth, dim, grade

def depth_koszul(M: GModule) -> int:
    _nonzero(M)
    ring = M.ring
    return ring.nvars - koszul_homology_sup(ring.variables(), M)


def depth_ext(M: GModule, cfg: Budgets = DEFAULT) -> int:
    """min{i : Ext^i(k, M) != 0}.  Terminates by i = dim M."""
    _nonzero(M)
    k = residue_module(M.ring)
    i = 0
    while ext_is_zero(k, M, i, max_rank=cfg.rank_cap):
        i += 1
        if i > M.ring.nvars:
            raise EngineError("Ext(k, M) vanishes beyond the number of variables")
    return i


def depth(M: GModule, cfg: Budgets = DEFAULT, cross_check: bool = True) -> CertifiedValue:
    def run():
        d = depth_koszul(M)
        ev = "n - hsup Koszul(variables; M)"
        if cross_check:
            d2 = depth_ext(M, cfg)
            if d2 != d:
                raise EngineError(f"depth mismatch: Koszul {d}, Ext(k,-) scan {d2}")
            ev += "; agrees with first nonzero Ext(k, M)"
        return CertifiedValue(d, EXACT, ev)
    return _cached(M, "depth", cfg, run, cross_check)


def ring_depth(ring: QuotientRing, cfg: Budgets = DEFAULT) -> int:
    return int(depth(ring_module(ring), cfg).value)


def _ideal_gens_in_ring(ring, J):
    if isinstance(J, Ideal):
        return ideal_module_generators(ring, J)
    return ideal_module_generators(ring, Ideal(ring.poly_ring, list(J)))


def depth_on(J, M: GModule, cfg: Budgets = DEFAULT) -> CertifiedValue:
    """depth(J, M) = t - hsup Koszul(g_1..g_t; M) for minimal generators g of J."""
    _nonzero(M)
    ring = M.ring
    gens = _ideal_gens_in_ring(ring, J)
    jm = GModule(ring, M.twists, list(M.relations) + [poly_to_vec(g, c) for g in gens
                                                       for c in range(M.rank)])
    if jm.is_zero():
        raise ConventionError("J M = M, depth(J, M) is infinite")
    t = len(gens)
    return CertifiedValue(t - koszul_homology_sup(gens, M), EXACT,
                          f"{t} - hsup Koszul(generators of J; M)")


def krull_dim(M: GModule, cfg: Budgets = DEFAULT) -> CertifiedValue:
    def run():
        if M.is_zero():
            return CertifiedValue(-inf, EXACT, "zero module")
        return CertifiedValue(M.annihilator().krull_dim(), EXACT,
                              "independent sets of leading monomials of ann M")
    return _cached(M, "dim", cfg, run)


def ring_dim(ring: QuotientRing) -> int:
    return int(krull_dim(ring_module(ring)).value)


def grade_ext(M: GModule, N: GModule, cfg: Budgets = DEFAULT) -> int:
    """inf{i : Ext^i(M, N) != 0} by direct scan."""
    top = M.ring.nvars
    for i in range(top + 1):
        if not ext_is_zero(M, N, i, max_rank=cfg.rank_cap):
            return i
    raise EngineError("Ext(M, N) vanishes up to the number of variables")


def grade_pair(M: GModule, N: GModule, cfg: Budgets = DEFAULT, cross_check=True) -> CertifiedValue:
    _nonzero(M, "M")
    _nonzero(N, "N")

    def run():
        g = grade_ext(M, N, cfg)
        ev = "first nonzero Ext^i(M, N)"
        if cross_check:
            g2 = depth_on(M.annihilator(), N, cfg).value
            if g2 != g:
                raise EngineError(f"grade mismatch: Ext scan {g}, depth(ann M, N) {g2}")
            ev += "; agrees with depth(ann M, N)"
        return CertifiedValue(g, EXACT, ev)
    return _cached(M, "grade", cfg, run, N, cross_check)


def grade(M: GModule, cfg: Budgets = DEFAULT) -> CertifiedValue:
    return grade_pair(M, ring_module(M.ring), cfg)


# ---------------------------------------------------------------- pd

def pd(M: GModule, cfg: Budgets = DEFAULT) -> CertifiedValue:
    _nonzero(M)

    def run():
        steps = ring_depth(M.ring, cfg) + max(1, cfg.res_cap)
        try:
            res = M.resolution(steps, cfg.rank_cap)
        except ResourceError as e:
            return CertifiedValue(-inf, UNKNOWN, f"resolution stopped: {e}")
        if res.terminated:
            return CertifiedValue(res.length, EXACT, f"resolution terminated at step {res.length}")
        return CertifiedValue(inf, EXACT,
                              f"F_{steps} != 0 beyond depth R = {ring_depth(M.ring, cfg)}")
    return _cached(M, "pd", cfg, run)


# ---------------------------------------------------------------- P and q

def _scan(nonzero_at, lo, hi):
    """Indices i in [lo, hi] where nonzero_at(i); stops at a resource error."""
    found, stopped = [], None
    for i in range(lo, hi + 1):
        try:
            if nonzero_at(i):
                found.append(i)
        except ResourceError as e:
            stopped = (i, str(e))
            break
    return found, stopped


def ext_sup(M: GModule, N: GModule, cfg: Budgets = DEFAULT) -> CertifiedValue:
    """P(M, N) = sup{i : Ext^i(M, N) != 0}."""
    _nonzero(M, "M")
    _nonzero(N, "N")

    def run():
        nz = lambda i: not ext_is_zero(M, N, i, max_rank=cfg.rank_cap)
        p = pd(M, cfg)
        if p.exact_finite:
            found, _ = _scan(nz, 0, int(p.value))
            return CertifiedValue(max(found, default=-inf), EXACT,
                                  f"pd M = {fmt_value(p.value)}, scanned Ext^i for i <= pd M")
        dR = ring_depth(M.ring, cfg)
        if N.certificates.get("id") == "by-construction":
            found, _ = _scan(nz, 0, dR)
            return CertifiedValue(max(found, default=-inf), EXACT,
                                  f"id N = depth R = {dR} (canonical module), scanned i <= {dR}")
        free, _tw = is_free(N)
        if free and N.rank:
            g = gdim(M, cfg)
            if g.exact_finite:
                found, _ = _scan(nz, 0, int(g.value))
                return CertifiedValue(max(found, default=-inf), EXACT,
                                      f"G-dim M = {fmt_value(g.value)} certified, N free",
                                      flag=g.flag)
        if p.exact and p.value == inf and is_residue_field(N):
            return CertifiedValue(cfg.ext, LOWER,
                                  f"pd M = inf so Ext^i(M, k) = k^(b_i) != 0 for all i; "
                                  f"budget {cfg.ext}")
        found, stopped = _scan(nz, 0, cfg.ext)
        top = max(found, default=-inf)
        if stopped:
            ev = f"scan stopped at i = {stopped[0]} ({stopped[1]})"
        else:
            ev = f"budget {cfg.ext}"
        if found:
            ev = f"Ext^{top}(M, N) != 0; " + ev
        return CertifiedValue(top, LOWER, ev)
    return _cached(M, "P", cfg, run, N)


def tor_sup(M: GModule, N: GModule, cfg: Budgets = DEFAULT) -> CertifiedValue:
    """q(M, N) = sup{i : Tor_i(M, N) != 0}."""
    _nonzero(M, "M")
    _nonzero(N, "N")

    def run():
        nz = lambda i: not tor_is_zero(M, N, i, max_rank=cfg.rank_cap)
        for X, name in ((M, "M"), (N, "N")):
            p = pd(X, cfg)
            if p.exact_finite:
                found, _ = _scan(nz, 0, int(p.value))
                return CertifiedValue(max(found, default=-inf), EXACT,
                                      f"pd {name} = {fmt_value(p.value)}, scanned Tor_i for i <= pd")
        found, stopped = _scan(nz, 0, cfg.ext)
        top = max(found, default=-inf)
        ev = f"scan stopped at i = {stopped[0]}" if stopped else f"budget {cfg.ext}"
        return CertifiedValue(top, LOWER, ev)
    return _cached(M, "q", cfg, run, N)


# ---------------------------------------------------------------- G-dimension

def _dual_generators(ring, twists, relations):
    """Generators of Hom(coker(relations), R) inside R^t (component twists -a_c)."""
    t = len(twists)
    amb = tuple(-a for a in twists)
    zero = (0,) * ring.nvars
    if not relations:
        return [{(c, zero): ring.field(1)} for c in range(t)], amb
    cols = []
    for k in range(t):
        v = {}
        for j, rel in enumerate(relations):
            for (kk, e), x in rel.items():
                if kk == k:
                    v[(j, e)] = x
        cols.append(v)
    from .core import vec_degree
    out_tw = tuple(-vec_degree(rel, twists) for rel in relations)
    Z = kernel(cols, amb, out_tw, ring.nvars, ring.field,
               ideal=ring.ideal_gens, ideal_gb=ring.ideal_gb)
    return Z, amb


def reflexivity_test(T: GModule):
    """Check that the evaluation map T -> T** is an isomorphism.

    Returns (ok, dual module T*, evidence).
    """
    from .core import vec_degree
    from .modules import subquotient_is_zero
    ring = T.ring
    T = T.minimal()
    Z1, amb1 = _dual_generators(ring, T.twists, list(T.relations))
    if not Z1:
        return False, GModule(ring, ()), "T* = 0"
    ztw = tuple(vec_degree(z, amb1) for z in Z1)
    star_rels = kernel(Z1, ztw, amb1, ring.nvars, ring.field,
                       ideal=ring.ideal_gens, ideal_gb=ring.ideal_gb)
    Tstar = GModule(ring, ztw, star_rels, reduce=False)
    Z2, amb2 = _dual_generators(ring, ztw, list(star_rels))
    # evaluation: generator k of T maps to (z_j[k])_j
    evals = []
    for k in range(T.rank):
        evals.append({(j, e): x for j, z in enumerate(Z1) for (kk, e), x in z.items() if kk == k})
    if not subquotient_is_zero(ring, T.twists, out_columns=evals, out_twists=amb2,
                               out_relations=[], ambient_relations=list(T.relations)):
        return False, Tstar, "evaluation map T -> T** is not injective"
    fixed = ideal_times_basis(ring.ideal_gens, len(amb2))
    gb = groebner([v for v in evals if v], amb2, ring.nvars, ring.field, fixed=fixed)
    if any(gb.normal_form(z) for z in Z2):
        return False, Tstar, "evaluation map T -> T** is not surjective"
    return True, Tstar, "T -> T** bijective"


def gdim(M: GModule, cfg: Budgets = DEFAULT) -> CertifiedValue:
    _nonzero(M)

    def run():
        p = pd(M, cfg)
        if p.exact_finite:
            return CertifiedValue(p.value, EXACT, f"pd M = {fmt_value(p.value)} is finite")
        R = ring_module(M.ring)
        g = ring_depth(M.ring, cfg) - int(depth(M, cfg).value)
        if g < 0:
            return CertifiedValue(inf, UNKNOWN, "depth M > depth R, G-dim cannot be finite")
        try:
            for i in range(g + 1, g + cfg.gdim + 1):
                if not ext_is_zero(M, R, i, max_rank=cfg.rank_cap):
                    return CertifiedValue(i, LOWER,
                                          f"Ext^{i}(M, R) != 0 above depth R - depth M = {g}; "
                                          "infinite G-dim suspected")
            T = syzygy(M, g, cfg.rank_cap)
            ok, Tstar, why = reflexivity_test(T)
            if not ok:
                return CertifiedValue(g, UNKNOWN, f"syzygy {g}: {why}")
            for i in range(1, cfg.gdim + 1):
                if not ext_is_zero(Tstar, R, i, max_rank=cfg.rank_cap):
                    return CertifiedValue(g, UNKNOWN, f"Ext^{i}(T*, R) != 0 for T = syzygy {g}")
        except ResourceError as e:
            return CertifiedValue(g, UNKNOWN, f"certification stopped: {e}")
        return CertifiedValue(g, EXACT,
                              f"syzygy {g} totally reflexive up to budget {cfg.gdim}; "
                              f"Ext^i(M, R) = 0 for {g} < i <= {g + cfg.gdim}", flag="caveat")
    return _cached(M, "gdim", cfg, run)


# ---------------------------------------------------------------- qpd, qid

def koszul_certificate(M: GModule):
    """Quasi-resolution certificate of Koszul(minimal generators of ann M; R), or None."""
    cyc = cyclic_ideal(M)
    if cyc is None:
        return None
    J, _ = cyc
    gens = ideal_module_generators(M.ring, J)
    if not gens:
        return None
    C = koszul_complex(gens, ring_module(M.ring))
    return certify_quasi_projective_resolution(C, M)


def qpd(M: GModule, cfg: Budgets = DEFAULT) -> CertifiedValue:
    _nonzero(M)

    def run():
        p = pd(M, cfg)
        if p.exact_finite:
            return CertifiedValue(p.value, EXACT, f"pd M = {fmt_value(p.value)} is finite")
        try:
            cert = koszul_certificate(M)
        except (UnsupportedInput, ResourceError):
            cert = None
        if cert is not None and cert.verdict == "certified":
            value = ring_depth(M.ring, cfg) - int(depth(M, cfg).value)
            gap = cert.gap
            if gap < value:
                raise EngineError(f"Koszul quasi-resolution gap {gap} below depth R - depth M")
            mult = ",".join(f"{i}:{a}" for i, a in sorted(cert.multiplicities.items()))
            return CertifiedValue(value, EXACT,
                                  f"Koszul certificate (a_i {mult}), gap {fmt_value(gap)}; "
                                  "value depth R - depth M")
        why = "M not cyclic" if cert is None else cert.reason
        return CertifiedValue(grade(M, cfg).value, UNKNOWN, f"no certificate ({why}); lower bound grade M")
    return _cached(M, "qpd", cfg, run)


def bass_numbers(M: GModule, top: int, cfg: Budgets = DEFAULT) -> list:
    k = residue_module(M.ring)
    return [ext(k, M, i, max_rank=cfg.rank_cap).num_generators for i in range(top + 1)]


def qid_certificate(M: GModule, cfg: Budgets = DEFAULT) -> CertifiedValue:
    _nonzero(M)

    def run():
        dR = ring_depth(M.ring, cfg)
        if M.certificates.get("id") == "by-construction":
            return CertifiedValue(dR, EXACT, "canonical module of a Cohen-Macaulay ring",
                                  flag="by-construction")
        top = dR + cfg.bass
        try:
            mu = bass_numbers(M, top, cfg)
        except ResourceError as e:
            return CertifiedValue(dR, UNKNOWN, f"Bass scan stopped: {e}")
        tail = [i for i in range(dR + 1, top + 1) if mu[i]]
        shown = ",".join(str(m) for m in mu)
        if tail:
            return CertifiedValue(dR, UNKNOWN, f"Bass numbers {shown}: mu^{tail[0]} != 0 above depth R")
        if not mu[dR]:
            return CertifiedValue(dR, UNKNOWN, f"Bass numbers {shown}")
        return CertifiedValue(dR, EXACT, f"Bass numbers {shown} vanish above depth R to {top}",
                              flag="caveat")
    return _cached(M, "qid", cfg, run)


# ---------------------------------------------------------------- canonical module

def canonical_module(ring: QuotientRing, cfg: Budgets = DEFAULT) -> GModule:
    """omega_R = Ext_S^{n-d}(R, S(-n)) restricted to R; carries an id certificate."""
    if "omega" in ring.cache:
        return ring.cache["omega"]
    n = ring.nvars
    d = ring_dim(ring)
    if ring_depth(ring, cfg) != d:
        raise UnsupportedInput("canonical module requires a Cohen-Macaulay ring")
    S = ring.polynomial_ring()
    RS = GModule.cyclic(S, list(ring.ideal_gens))
    E = ext(RS, GModule.free(S, (n,)), n - d)
    W = GModule(ring, E.twists, E.relations).minimal()
    for f in ring.ideal_gens:
        if not W.annihilates(f):
            raise EngineError("canonical module is not annihilated by the defining ideal")
    W.certificates["id"] = "by-construction"
    ring.cache["omega"] = W
    return W


# ---------------------------------------------------------------- CM and quasi-perfect

def cmd(M: GModule, cfg: Budgets = DEFAULT) -> CertifiedValue:
    _nonzero(M)
    d = krull_dim(M, cfg).value
    t = depth(M, cfg).value
    return CertifiedValue(d - t, EXACT, f"dim {fmt_value(d)} - depth {fmt_value(t)}")


def is_cohen_macaulay(M: GModule, cfg: Budgets = DEFAULT) -> bool:
    return cmd(M, cfg).value == 0


def is_cm_ring(ring: QuotientRing, cfg: Budgets = DEFAULT) -> bool:
    return is_cohen_macaulay(ring_module(ring), cfg)


def _yes_no(a: CertifiedValue, b: CertifiedValue) -> str:
    if not (a.exact and b.exact):
        return "inconclusive"
    return "yes" if a.value == b.value else "no"


def is_quasi_perfect(M: GModule, cfg: Budgets = DEFAULT) -> str:
    return _yes_no(qpd(M, cfg), grade(M, cfg))


def is_N_quasi_perfect(M: GModule, N: GModule, cfg: Budgets = DEFAULT) -> str:
    return _yes_no(qpd(M, cfg), grade_pair(M, N, cfg))


def supp_contained(L: GModule, M: GModule) -> bool:
    """Supp L inside Supp M, i.e. ann M inside the radical of ann L."""
    if L.is_zero():
        return True
    if M.is_zero():
        return False
    aL, aM = L.annihilator(), M.annihilator()
    return all(aL.radical_contains(f) for f in aM.gens)


# ---------------------------------------------------------------- reports

MODULE_INVARIANTS = ("depth", "dim", "grade", "pd", "gdim", "qpd", "qid", "cmd")
PAIR_INVARIANTS = ("grade", "P", "q")


def module_invariant(name: str, M: GModule, cfg: Budgets = DEFAULT) -> CertifiedValue:
    table = {"depth": depth, "dim": krull_dim, "grade": grade, "pd": pd, "gdim": gdim,
             "qpd": qpd, "qid": qid_certificate, "cmd": cmd}
    if name not in table:
        raise KeyError(name)
    return table[name](M, cfg)


def pair_invariant(name: str, M: GModule, N: GModule, cfg: Budgets = DEFAULT) -> CertifiedValue:
    table = {"grade": grade_pair, "P": ext_sup, "q": tor_sup}
    if name not in table:
        raise KeyError(name)
    return table[name](M, N, cfg)


@dataclass
class InvariantReport:
    modules: dict = field(default_factory=dict)
    pairs: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"modules": {m: {k: v.to_dict() for k, v in d.items()} for m, d in self.modules.items()},
                "pairs": {p: {k: v.to_dict() for k, v in d.items()} for p, d in self.pairs.items()}}


def invariant_report(modules: dict, pairs: dict, cfg: Budgets = DEFAULT) -> InvariantReport:
    rep = InvariantReport()
    for name, M in modules.items():
        if M.is_zero():
            continue
        rep.modules[name] = {inv: module_invariant(inv, M, cfg) for inv in MODULE_INVARIANTS}
    for name, (M, N) in pairs.items():
        if M.is_zero() or N.is_zero():
            continue
        rep.pairs[name] = {inv: pair_invariant(inv, M, N, cfg) for inv in PAIR_INVARIANTS}
    return rep


def tensor_module(M: GModule, N: GModule) -> GModule:
    return tensor(M, N)
