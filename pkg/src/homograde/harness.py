"""Executable checks of the Ext-vanishing, depth and grade formulas on concrete instances.

A check takes module names from an Instance, computes the invariants it
needs, gates on the finiteness hypotheses of the statement and compares
both sides.  Verdicts are conservative: only fully exact values (no budget
caveat) can produce "violated".
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import inf

from . import invariants as inv
from .invariants import EXACT, LOWER, UNKNOWN, UPPER, Budgets, CertifiedValue, fmt_value
from .homological import ext
from .modules import GModule, QuotientRing, hom_module, tensor

VERIFIED, VIOLATED, INCONCLUSIVE, HNM = "verified", "violated", "inconclusive", "hypotheses-not-met"
VERDICTS = (VERIFIED, VIOLATED, INCONCLUSIVE, HNM)


# ---------------------------------------------------------------- value algebra

def bounds(v: CertifiedValue):
    if v.status == EXACT:
        return v.value, v.value
    if v.status == LOWER:
        return v.value, inf
    if v.status == UPPER:
        return -inf, v.value
    return -inf, inf


def fully_exact(v: CertifiedValue) -> bool:
    return v.status == EXACT and v.flag != "caveat"


def from_bounds(lo, hi, flag="", evidence="") -> CertifiedValue:
    if math.isnan(lo):
        lo = -inf
    if math.isnan(hi):
        hi = inf
    if lo == hi:
        return CertifiedValue(lo, EXACT, evidence, flag)
    if lo > -inf:
        return CertifiedValue(lo, LOWER, evidence, flag)
    if hi < inf:
        return CertifiedValue(hi, UPPER, evidence, flag)
    return CertifiedValue(-inf, UNKNOWN, evidence, flag)


def _flag(*vals):
    return "caveat" if any(v.flag == "caveat" for v in vals) else ""


def const(n) -> CertifiedValue:
    return CertifiedValue(n, EXACT)


def plus(a: CertifiedValue, b: CertifiedValue) -> CertifiedValue:
    (al, ah), (bl, bh) = bounds(a), bounds(b)
    return from_bounds(al + bl, ah + bh, _flag(a, b))


def minus(a: CertifiedValue, b: CertifiedValue) -> CertifiedValue:
    (al, ah), (bl, bh) = bounds(a), bounds(b)
    return from_bounds(al - bh, ah - bl, _flag(a, b))


def compare(lhs: CertifiedValue, op: str, rhs: CertifiedValue) -> str:
    """Verdict for ``lhs op rhs`` with op in {'=', '<='}.

    A claim is verified when the bounds force it, and violated only when it
    fails on fully exact values; everything else is inconclusive.
    """
    (ll, lh), (rl, rh) = bounds(lhs), bounds(rhs)
    exact = fully_exact(lhs) and fully_exact(rhs)
    if op == "<=":
        if lh <= rl:
            return VERIFIED
        if ll > rh and exact:
            return VIOLATED
        return INCONCLUSIVE
    if op == "=":
        if ll == lh == rl == rh:
            return VERIFIED
        if lhs.exact and rhs.exact and lhs.value != rhs.value and exact:
            return VIOLATED
        return INCONCLUSIVE
    raise ValueError(op)


def exact_finite(v: CertifiedValue) -> bool:
    """Finiteness hypothesis: accepts budget-certified (caveat) exact values."""
    return v.status == EXACT and v.value not in (inf, -inf)


def exact_zero(v: CertifiedValue) -> bool:
    return v.status == EXACT and v.value == 0


# ---------------------------------------------------------------- results

@dataclass
class Claim:
    label: str
    lhs: CertifiedValue
    op: str
    rhs: CertifiedValue
    verdict: str = ""

    def __post_init__(self):
        if not self.verdict:
            self.verdict = compare(self.lhs, self.op, self.rhs)

    def text(self) -> str:
        return f"{self.label}: {self.lhs} {self.op} {self.rhs} [{self.verdict}]"


def implication(label, premise: bool | None, lhs, op, rhs) -> Claim | None:
    """Claim that only applies when the premise holds (None = premise unknown)."""
    if premise is False:
        return None
    if premise is None:
        return Claim(label, lhs, op, rhs, INCONCLUSIVE)
    return Claim(label, lhs, op, rhs)


@dataclass
class CheckResult:
    check_id: str
    instance_id: str
    args: tuple
    verdict: str
    lhs: CertifiedValue | None = None
    rhs: CertifiedValue | None = None
    evidence: str = ""
    expected: str | None = None

    @property
    def annotation_ok(self) -> bool:
        return self.expected is None or self.expected == self.verdict

    def to_dict(self) -> dict:
        d = {"check-id": self.check_id, "args": list(self.args), "verdict": self.verdict,
             "lhs": self.lhs.to_dict() if self.lhs else None,
             "rhs": self.rhs.to_dict() if self.rhs else None,
             "evidence": self.evidence}
        if self.expected is not None:
            d["expected"] = self.expected
        return d


def _row(ctx, check_id, args, claims, skipped=()):
    claims = [c for c in claims if c is not None]
    notes = [c.text() for c in claims] + [f"skipped {s}" for s in skipped]
    if not claims:
        return CheckResult(check_id, ctx.instance_id, args, HNM, evidence="; ".join(notes))
    verdicts = [c.verdict for c in claims]
    if VIOLATED in verdicts:
        v = VIOLATED
    elif INCONCLUSIVE in verdicts:
        v = INCONCLUSIVE
    else:
        v = VERIFIED
    main = claims[0]
    return CheckResult(check_id, ctx.instance_id, args, v, main.lhs, main.rhs, "; ".join(notes))


def _hnm(ctx, check_id, args, why):
    return CheckResult(check_id, ctx.instance_id, args, HNM, evidence=why)


# ---------------------------------------------------------------- evaluation context

class Context:
    """Invariant access for one instance with memoized derived modules."""

    def __init__(self, instance_id: str, ring: QuotientRing, modules: dict, cfg: Budgets):
        self.instance_id = instance_id
        self.ring = ring
        self.modules = modules
        self.cfg = cfg
        self._derived: dict = {}

    def m(self, name) -> GModule:
        return self.modules[name]

    @property
    def R(self) -> GModule:
        return inv.ring_module(self.ring)

    def derived(self, key, build):
        if key not in self._derived:
            self._derived[key] = build()
        return self._derived[key]

    def tensor(self, a, b) -> GModule:
        return self.derived(("tensor", a, b), lambda: tensor(self.m(a), self.m(b)))

    def hom(self, a, b) -> GModule:
        return self.derived(("hom", a, b), lambda: hom_module(self.m(a), self.m(b)))

    def depth_R(self) -> CertifiedValue:
        return inv.depth(self.R, self.cfg)

    def dim_R(self) -> CertifiedValue:
        return inv.krull_dim(self.R, self.cfg)

    def R_is_cm(self) -> bool:
        return inv.is_cm_ring(self.ring, self.cfg)

    # module invariants accept names or modules
    def _mod(self, x):
        return self.m(x) if isinstance(x, str) else x

    def depth(self, x):
        return inv.depth(self._mod(x), self.cfg)

    def dim(self, x):
        return inv.krull_dim(self._mod(x), self.cfg)

    def grade(self, x):
        return inv.grade(self._mod(x), self.cfg)

    def grade_pair(self, a, b):
        return inv.grade_pair(self._mod(a), self._mod(b), self.cfg)

    def P(self, a, b):
        return inv.ext_sup(self._mod(a), self._mod(b), self.cfg)

    def q(self, a, b):
        return inv.tor_sup(self._mod(a), self._mod(b), self.cfg)

    def pd(self, x):
        return inv.pd(self._mod(x), self.cfg)

    def gdim(self, x):
        return inv.gdim(self._mod(x), self.cfg)

    def qpd(self, x):
        return inv.qpd(self._mod(x), self.cfg)

    def qid(self, x):
        return inv.qid_certificate(self._mod(x), self.cfg)

    def cmd(self, x):
        return inv.cmd(self._mod(x), self.cfg)

    def supp_in(self, a, b) -> bool:
        return inv.supp_contained(self._mod(a), self._mod(b))

    def ab(self, x) -> CertifiedValue:
        """depth R - depth x."""
        return minus(self.depth_R(), self.depth(x))


# ---------------------------------------------------------------- checks

def check_ischebeck_qpd(ctx: Context, M, N):
    """P(M,N) = qpd M = depth R - depth M when P and qpd M are finite."""
    cid, args = "ischebeck_qpd", (M, N)
    P, q = ctx.P(M, N), ctx.qpd(M)
    if not exact_finite(P):
        return _hnm(ctx, cid, args, f"P(M,N) = {P} not certified finite")
    if not exact_finite(q):
        return _hnm(ctx, cid, args, f"qpd M = {q} not certified finite")
    return _row(ctx, cid, args, [Claim("P(M,N) = qpd M", P, "=", q),
                                 Claim("qpd M = depth R - depth M", q, "=", ctx.ab(M))])


def check_gdim_formula(ctx: Context, M, N):
    """P(M,N) = G-dim M = depth R - depth M when qpd N is finite, plus Ext dimension bounds."""
    cid, args = "gdim_formula", (M, N)
    P, g, qn = ctx.P(M, N), ctx.gdim(M), ctx.qpd(N)
    for name, v in (("P(M,N)", P), ("G-dim M", g), ("qpd N", qn)):
        if not exact_finite(v):
            return _hnm(ctx, cid, args, f"{name} = {v} not certified finite")
    claims = [Claim("P(M,N) = G-dim M", P, "=", g),
              Claim("G-dim M = depth R - depth M", g, "=", ctx.ab(M))]
    # Ext dimension bound with G-dim in place of qpd
    claims += _ext_dim_claims(ctx, M, N, P, g, "G-dim M")
    return _row(ctx, cid, args, claims)


def check_ischebeck_qid(ctx: Context, M, N):
    """P(M,N) = depth R - depth M when qid N is finite."""
    cid, args = "ischebeck_qid", (M, N)
    P, qi = ctx.P(M, N), ctx.qid(N)
    if not exact_finite(P):
        return _hnm(ctx, cid, args, f"P(M,N) = {P} not certified finite")
    if not exact_finite(qi):
        return _hnm(ctx, cid, args, f"qid N = {qi} not certified finite")
    claims = [Claim("P(M,N) = depth R - depth M", P, "=", ctx.ab(M)),
              Claim("depth M <= depth R", ctx.depth(M), "<=", ctx.depth_R())]
    return _row(ctx, cid, args, claims)


def check_grade_le_qpd(ctx: Context, M):
    """grade M <= qpd M <= pd M."""
    cid, args = "grade_le_qpd", (M,)
    q = ctx.qpd(M)
    if not exact_finite(q):
        return _hnm(ctx, cid, args, f"qpd M = {q} not certified finite")
    p = ctx.pd(M)
    claims = [Claim("grade M <= qpd M", ctx.grade(M), "<=", q),
              Claim("qpd M <= pd M", q, "<=", p)]
    return _row(ctx, cid, args, claims)


def check_qpd_grade_bound(ctx: Context, M, N):
    """qpd M - grade(M,N) <= qpd N + cmd M for modules of finite qpd."""
    cid, args = "qpd_grade_bound", (M, N)
    qm, qn = ctx.qpd(M), ctx.qpd(N)
    if not (exact_finite(qm) and exact_finite(qn)):
        return _hnm(ctx, cid, args, f"qpd M = {qm}, qpd N = {qn}: need both finite")
    lhs = minus(qm, ctx.grade_pair(M, N))
    rhs = plus(qn, ctx.cmd(M))
    return _row(ctx, cid, args, [Claim("qpd M - grade(M,N) <= qpd N + cmd M", lhs, "<=", rhs)])


def _zero_iff(label, a: CertifiedValue, b: CertifiedValue) -> Claim:
    """a = 0 iff b = 0, encoded on 0/1 indicator values."""
    if not (a.exact and b.exact):
        return Claim(label, a, "=", b, INCONCLUSIVE)
    ia, ib = const(int(a.value == 0)), const(int(b.value == 0))
    ia = CertifiedValue(ia.value, EXACT, f"[{a.value == 0}]", _flag(a))
    ib = CertifiedValue(ib.value, EXACT, f"[{b.value == 0}]", _flag(b))
    return Claim(label, ia, "=", ib)


def check_quasi_perfect_cm(ctx: Context, M):
    """Over a CM ring, a module of finite qpd is CM iff it is quasi-perfect."""
    cid, args = "quasi_perfect_cm", (M,)
    q = ctx.qpd(M)
    if not exact_finite(q):
        return _hnm(ctx, cid, args, f"qpd M = {q} not certified finite")
    c = ctx.cmd(M)
    gap = minus(q, ctx.grade(M))
    if ctx.R_is_cm():
        return _row(ctx, cid, args, [_zero_iff("M Cohen-Macaulay iff M quasi-perfect (R CM)", c, gap)])
    if c.exact and c.value == 0:
        return _row(ctx, cid, args, [Claim("M CM => qpd M - grade M = 0", gap, "=", const(0))])
    return _hnm(ctx, cid, args, "R not CM and M not CM")


def check_tensor_cm(ctx: Context, M, N):
    """With q(M,N) = 0 and N CM: M (x) N is CM iff M is N-quasi-perfect."""
    cid, args = "tensor_cm", (M, N)
    q, qm = ctx.q(M, N), ctx.qpd(M)
    if not exact_zero(q):
        return _hnm(ctx, cid, args, f"q(M,N) = {q} not certified 0")
    if not exact_finite(qm):
        return _hnm(ctx, cid, args, f"qpd M = {qm} not certified finite")
    if ctx.cmd(N).value != 0:
        return _hnm(ctx, cid, args, "N not Cohen-Macaulay")
    T = ctx.tensor(M, N)
    cT = ctx.cmd(T)
    gap = minus(qm, ctx.grade_pair(M, N))
    return _row(ctx, cid, args, [_zero_iff("M (x) N CM iff M N-quasi-perfect", cT, gap)])


def check_dim_grade_qid(ctx: Context, M):
    """Finite qid forces dim M = depth R - grade M and qid M = depth R."""
    cid, args = "dim_grade_qid", (M,)
    qi = ctx.qid(M)
    if not exact_finite(qi):
        return _hnm(ctx, cid, args, f"qid M = {qi} not certified finite")
    dM, gM = ctx.dim(M), ctx.grade(M)
    claims = [Claim("dim M = depth R - grade M", dM, "=", minus(ctx.depth_R(), gM)),
              Claim("qid M = depth R", qi, "=", ctx.depth_R())]
    premise = plus(dM, gM)
    if premise.exact and ctx.dim_R().exact:
        c = implication("dim R = dim M + grade M => cmd R = 0",
                        premise.value == ctx.dim_R().value, ctx.cmd(ctx.R), "=", const(0))
        if c:
            claims.append(c)
    return _row(ctx, cid, args, claims)


def check_quasi_perfect_qid_cm(ctx: Context, M):
    """A quasi-perfect module of finite qid is Cohen-Macaulay."""
    cid, args = "quasi_perfect_qid_cm", (M,)
    qi, q = ctx.qid(M), ctx.qpd(M)
    if not exact_finite(qi):
        return _hnm(ctx, cid, args, f"qid M = {qi} not certified finite")
    if not exact_finite(q):
        return _hnm(ctx, cid, args, f"qpd M = {q} not certified finite")
    gap = minus(q, ctx.grade(M))
    if not exact_zero(gap):
        return _hnm(ctx, cid, args, f"M not quasi-perfect (qpd - grade = {gap})")
    return _row(ctx, cid, args, [Claim("cmd M = 0", ctx.cmd(M), "=", const(0))])


def check_ab_depth_formulas(ctx: Context, M, N):
    """Depth formulas for qpd, qid and for M (x) N when q(M,N) = 0."""
    cid, args = "ab_depth_formulas", (M, N)
    claims, skipped = [], []
    qm = ctx.qpd(M)
    if exact_finite(qm):
        claims.append(Claim("qpd M = depth R - depth M", qm, "=", ctx.ab(M)))
    else:
        skipped.append("qpd formula (qpd M not certified finite)")
    qi = ctx.qid(N)
    if exact_finite(qi):
        claims.append(Claim("qid N = depth R", qi, "=", ctx.depth_R()))
    else:
        skipped.append("qid formula (qid N not certified finite)")
    q = ctx.q(M, N)
    if exact_finite(qm) and exact_zero(q):
        lhs = plus(ctx.depth(M), ctx.depth(N))
        T = ctx.tensor(M, N)
        rhs = plus(ctx.depth_R(), ctx.depth(T))
        claims.append(Claim("depth M + depth N = depth R + depth(M (x) N)", lhs, "=", rhs))
    else:
        skipped.append(f"depth formula (q(M,N) = {q})")
    return _row(ctx, cid, args, claims, skipped)


def _ext_dim_claims(ctx, M, N, P, bound, name):
    """dim Ext^i(M,N) + i <= bound + dim(M (x) N) for 0 <= i <= P (zero Ext beyond)."""
    T = ctx.tensor(M, N)
    rhs = plus(bound, ctx.dim(T))
    claims = []
    for i in range(int(P.value) + 1):
        E = ctx.derived(("ext", M, N, i), lambda i=i: ext(ctx.m(M), ctx.m(N), i,
                                                          max_rank=ctx.cfg.rank_cap))
        dE = ctx.dim(E)
        claims.append(Claim(f"dim Ext^{i} + {i} <= {name} + dim(M (x) N)", plus(dE, const(i)), "<=", rhs))
    return claims


def check_intersection(ctx: Context, M, N):
    """Intersection-type bounds: depth N, dim Ext^i and P(M,N) against qpd M + dim(M (x) N)."""
    cid, args = "intersection", (M, N)
    P, qm = ctx.P(M, N), ctx.qpd(M)
    if not exact_finite(P):
        return _hnm(ctx, cid, args, f"P(M,N) = {P} not certified finite")
    if not exact_finite(qm):
        return _hnm(ctx, cid, args, f"qpd M = {qm} not certified finite")
    T = ctx.tensor(M, N)
    claims = [Claim("depth N <= qpd M + dim(M (x) N)", ctx.depth(N), "<=", plus(qm, ctx.dim(T)))]
    claims += _ext_dim_claims(ctx, M, N, P, qm, "qpd M")
    claims.append(Claim("P(M,N) <= qpd M", P, "<=", qm))
    if ctx.cmd(N).value == 0:
        claims.append(Claim("dim N <= qpd M + dim(M (x) N)", ctx.dim(N), "<=", plus(qm, ctx.dim(T))))
    return _row(ctx, cid, args, claims)


def check_grade_inequalities(ctx: Context, L, M, N):
    """Grade inequalities with L, M, N; each part is gated on its own hypotheses."""
    cid, args = "grade_inequalities", (L, M, N)
    claims, skipped = [], []
    qn, ql = ctx.qpd(N), ctx.qpd(L)
    fin_n, fin_l = exact_finite(qn), exact_finite(ql)
    gMN = ctx.grade_pair(M, N)
    gM = ctx.grade(M)
    # main inequality
    if fin_n and fin_l and ctx.supp_in(M, L):
        claims.append(Claim("grade L + grade(M,L) <= grade(M,N) + qpd N",
                            plus(ctx.grade(L), ctx.grade_pair(M, L)), "<=", plus(gMN, qn)))
    else:
        skipped.append("L-N inequality (qpd N, qpd L finite and Supp M in Supp L needed)")
    # N = R specialisation
    if fin_l and ctx.supp_in(M, L):
        claims.append(Claim("grade(M,L) + grade L <= grade M",
                            plus(ctx.grade_pair(M, L), ctx.grade(L)), "<=", gM))
    else:
        skipped.append("N = R case")
    # L = R specialisation
    if fin_n:
        claims.append(Claim("grade M <= grade(M,N) + qpd N", gM, "<=", plus(gMN, qn)))
        if ctx.supp_in(M, N):
            claims.append(Claim("grade(M,N) + grade N <= grade M", plus(gMN, ctx.grade(N)), "<=", gM))
            if exact_zero(minus(qn, ctx.grade(N))):
                claims.append(Claim("grade(M,N) = grade M - grade N (N quasi-perfect)",
                                    gMN, "=", minus(gM, ctx.grade(N))))
    else:
        skipped.append("L = R case (qpd N not certified finite)")
    # Hom part
    P = ctx.P(M, N)
    if fin_n and exact_zero(P):
        H = ctx.hom(M, N)
        gLH = ctx.grade_pair(L, H)
        claims.append(Claim("grade L <= grade(L, Hom(M,N)) + qpd N", ctx.grade(L), "<=", plus(gLH, qn)))
        if ctx.supp_in(ctx.m(L), H):
            claims.append(Claim("grade(L, Hom(M,N)) + grade N <= grade L",
                                plus(gLH, ctx.grade(N)), "<=", ctx.grade(L)))
    else:
        skipped.append(f"Hom part (P(M,N) = {P})")
    # tensor part
    q = ctx.q(M, N)
    if fin_n and exact_zero(q):
        T = ctx.tensor(M, N)
        gLT = ctx.grade_pair(L, T)
        claims.append(Claim("grade(L,M) <= grade(L, M (x) N) + qpd N",
                            ctx.grade_pair(L, M), "<=", plus(gLT, qn)))
        if ctx.supp_in(L, N):
            claims.append(Claim("grade(L, M (x) N) + grade N <= grade(L,M)",
                                plus(gLT, ctx.grade(N)), "<=", ctx.grade_pair(L, M)))
    else:
        skipped.append(f"tensor part (q(M,N) = {q})")
    return _row(ctx, cid, args, claims, skipped)


def check_facts(ctx: Context, M, N):
    """Standing inequalities between depth, dim and grade."""
    cid, args = "facts", (M, N)
    gMN = ctx.grade_pair(M, N)
    claims = [Claim("depth N - dim M <= grade(M,N)", minus(ctx.depth(N), ctx.dim(M)), "<=", gMN),
              Claim("0 <= grade(M,N)", const(0), "<=", gMN),
              Claim("grade(M,N) <= P(M,N)", gMN, "<=", ctx.P(M, N)),
              Claim("depth R <= grade M + dim M", ctx.depth_R(), "<=", plus(ctx.grade(M), ctx.dim(M))),
              Claim("grade M + dim M <= dim R", plus(ctx.grade(M), ctx.dim(M)), "<=", ctx.dim_R()),
              Claim("depth M <= dim M", ctx.depth(M), "<=", ctx.dim(M))]
    if ctx.supp_in(M, N):
        claims.append(Claim("grade(M,N) <= dim N - dim M", gMN, "<=", minus(ctx.dim(N), ctx.dim(M))))
    return _row(ctx, cid, args, claims)


def check_vanishing_lemmas(ctx: Context, M, N):
    """Upper bounds for P(M,N) when it is finite."""
    cid, args = "vanishing_lemmas", (M, N)
    P = ctx.P(M, N)
    if not exact_finite(P):
        return _hnm(ctx, cid, args, f"P(M,N) = {P} not certified finite")
    claims, skipped = [], []
    qm = ctx.qpd(M)
    claims.append(Claim("P(M,N) <= qpd M", P, "<=", qm) if qm.status != UNKNOWN
                  else None)
    if qm.status == UNKNOWN:
        skipped.append("P <= qpd M (qpd M unknown)")
    if exact_finite(ctx.qpd(N)):
        claims.append(Claim("P(M,N) <= G-dim M", P, "<=", ctx.gdim(M)))
    else:
        skipped.append("P <= G-dim M (qpd N not certified finite)")
    if exact_finite(ctx.qid(N)):
        claims.append(Claim("depth M <= depth R", ctx.depth(M), "<=", ctx.depth_R()))
    else:
        skipped.append("depth M <= depth R (qid N not certified finite)")
    return _row(ctx, cid, args, claims, skipped)


def check_cm_criteria(ctx: Context, M):
    """Cohen-Macaulay criteria for R from a module M."""
    cid, args = "cm_criteria", (M,)
    q = ctx.qpd(M)
    claims = []
    if exact_finite(q) and ctx.cmd(M).value == 0:
        premise = plus(ctx.dim(M), ctx.grade(M))
        if premise.exact and premise.value == ctx.dim_R().value:
            claims.append(Claim("CM M, qpd finite, dim M = dim R - grade M => cmd R = 0",
                                ctx.cmd(ctx.R), "=", const(0)))
    qi = ctx.qid(M)
    if exact_finite(qi):
        premise = plus(ctx.dim(M), ctx.grade(M))
        if premise.exact and premise.value == ctx.dim_R().value:
            claims.append(Claim("qid finite, dim R = dim M + grade M => cmd R = 0",
                                ctx.cmd(ctx.R), "=", const(0)))
    if not claims:
        return _hnm(ctx, cid, args, "no criterion applies to this module")
    return _row(ctx, cid, args, claims)


def check_residue_example(ctx: Context, K):
    """Residue field of a Gorenstein non-regular ring: finite qpd and G-dim, infinite pd, P(k,k) not finite."""
    cid, args = "residue_example", (K,)
    if not inv.is_residue_field(ctx.m(K)):
        return _hnm(ctx, cid, args, "module is not the residue field")
    p = ctx.pd(K)
    if not (p.exact and p.value == inf):
        return _hnm(ctx, cid, args, f"pd k = {p}: ring is regular")
    if not exact_finite(ctx.qid(ctx.R)):
        return _hnm(ctx, cid, args, "ring not certified Gorenstein")
    P = ctx.P(K, K)
    budget = const(ctx.cfg.ext)
    claims = [Claim("pd k = inf", p, "=", const(inf)),
              Claim("qpd k = depth R", ctx.qpd(K), "=", ctx.depth_R()),
              Claim("G-dim k = depth R", ctx.gdim(K), "=", ctx.depth_R()),
              Claim("P(k,k) >= budget (never exact)", budget, "<=", P)]
    if P.status == EXACT:
        claims.append(Claim("P(k,k) status", P, "=", const(inf), VIOLATED))
    return _row(ctx, cid, args, claims)


CHECKS = {
    "ischebeck_qpd": (2, check_ischebeck_qpd),
    "gdim_formula": (2, check_gdim_formula),
    "ischebeck_qid": (2, check_ischebeck_qid),
    "grade_le_qpd": (1, check_grade_le_qpd),
    "qpd_grade_bound": (2, check_qpd_grade_bound),
    "quasi_perfect_cm": (1, check_quasi_perfect_cm),
    "tensor_cm": (2, check_tensor_cm),
    "dim_grade_qid": (1, check_dim_grade_qid),
    "quasi_perfect_qid_cm": (1, check_quasi_perfect_qid_cm),
    "ab_depth_formulas": (2, check_ab_depth_formulas),
    "intersection": (2, check_intersection),
    "grade_inequalities": (3, check_grade_inequalities),
    "facts": (2, check_facts),
    "vanishing_lemmas": (2, check_vanishing_lemmas),
    "cm_criteria": (1, check_cm_criteria),
    "residue_example": (1, check_residue_example),
}


def run_check(ctx: Context, check_id: str, args: tuple, expected: str | None = None) -> CheckResult:
    arity, fn = CHECKS[check_id]
    if len(args) != arity:
        raise ValueError(f"{check_id} takes {arity} module(s), got {len(args)}")
    mods = [ctx.m(a) for a in args]
    if any(m.is_zero() for m in mods):
        res = _hnm(ctx, check_id, tuple(args), "zero module")
    else:
        try:
            res = fn(ctx, *args)
        except inv.EngineError:
            raise
        except inv.ConventionError as e:
            res = _hnm(ctx, check_id, tuple(args), str(e))
    res.expected = expected
    return res


# ---------------------------------------------------------------- corpus runs

@dataclass
class ExpectationResult:
    invariant: str
    args: tuple
    expected: str
    actual: CertifiedValue
    ok: bool

    def to_dict(self):
        return {"invariant": self.invariant, "args": list(self.args), "expected": self.expected,
                "actual": self.actual.to_dict(), "ok": self.ok}


@dataclass
class InstanceResult:
    instance_id: str
    checks: list = field(default_factory=list)
    expectations: list = field(default_factory=list)
    errors: list = field(default_factory=list)

    def to_dict(self):
        d = {"id": self.instance_id, "checks": [c.to_dict() for c in self.checks]}
        if self.expectations:
            d["expectations"] = [e.to_dict() for e in self.expectations]
        if self.errors:
            d["errors"] = list(self.errors)
        return d


def value_matches(expected: str, v: CertifiedValue) -> bool:
    """Match an annotation such as '1', '>= 10', '<= 2', 'inf' or 'unknown'."""
    e = expected.strip()
    if e == "unknown":
        return v.status == UNKNOWN
    if e.startswith(">="):
        return v.status == LOWER and fmt_value(v.value) == e[2:].strip()
    if e.startswith("<="):
        return v.status == UPPER and fmt_value(v.value) == e[2:].strip()
    return v.status == EXACT and fmt_value(v.value) == e


def evaluate_invariant(ctx: Context, name: str, args: tuple) -> CertifiedValue:
    mods = [ctx.m(a) for a in args]
    if len(mods) == 1:
        return inv.module_invariant(name, mods[0], ctx.cfg)
    if len(mods) == 2:
        return inv.pair_invariant(name, mods[0], mods[1], ctx.cfg)
    raise ValueError(f"invariant {name} takes one or two modules")


def run_instance(instance, cfg: Budgets = inv.DEFAULT, check_ids=None) -> InstanceResult:
    ctx = Context(instance.id, instance.ring, instance.build_modules(), cfg)
    out = InstanceResult(instance.id)
    for chk in instance.checks:
        if check_ids is not None and chk.check_id not in check_ids:
            continue
        try:
            out.checks.append(run_check(ctx, chk.check_id, chk.args, chk.expected))
        except Exception as e:  # engine failure is reported, never swallowed as a verdict
            out.errors.append(f"{chk.check_id}{tuple(chk.args)}: {type(e).__name__}: {e}")
    if check_ids is None:
        for ex in instance.expects:
            try:
                val = evaluate_invariant(ctx, ex.invariant, ex.args)
                out.expectations.append(ExpectationResult(ex.invariant, ex.args, ex.expected, val,
                                                          value_matches(ex.expected, val)))
            except Exception as e:
                out.errors.append(f"{ex.invariant}{tuple(ex.args)}: {type(e).__name__}: {e}")
    return out


def totals(results) -> dict:
    t = {v: 0 for v in VERDICTS}
    t["rows"] = 0
    t["hypotheses-not-met-expected"] = 0
    t["annotation-mismatches"] = 0
    t["expectations"] = 0
    t["engine-errors"] = 0
    for r in results:
        for c in r.checks:
            t[c.verdict] += 1
            t["rows"] += 1
            if c.verdict == HNM and c.expected == HNM:
                t["hypotheses-not-met-expected"] += 1
            if not c.annotation_ok:
                t["annotation-mismatches"] += 1
        for e in r.expectations:
            t["expectations"] += 1
            if not e.ok:
                t["annotation-mismatches"] += 1
        t["engine-errors"] += len(r.errors)
    return t


def run_corpus(instances, cfg: Budgets = inv.DEFAULT, check_ids=None) -> list:
    return [run_instance(inst, cfg, check_ids) for inst in instances]


def mismatches(results) -> list:
    """Human-readable diff lines for annotations that disagree with the computation."""
    lines = []
    for r in results:
        for c in r.checks:
            if not c.annotation_ok:
                lines.append(f"{r.instance_id}: check {c.check_id}{tuple(c.args)}: "
                             f"expected {c.expected}, got {c.verdict}")
        for e in r.expectations:
            if not e.ok:
                lines.append(f"{r.instance_id}: {e.invariant}{tuple(e.args)}: "
                             f"expected {e.expected}, got {e.actual}")
    return lines
