"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -s`` or ``python tests/test_acceptance.py``.
"""
import sys
import time
from functools import lru_cache
from itertools import product
from pathlib import Path

import pytest

from homograde import invariants as inv
from homograde.cli import main, render_json, report_dict
from homograde.corpus import load_corpus, parse_poly
from homograde.groebner import Ideal
from homograde.harness import Context, HNM, VERIFIED, VIOLATED, run_check, run_corpus, totals
from homograde.homological import ext, ext_is_zero
from homograde.linalg import hilbert_oracle
from homograde.modules import annihilator, is_free

REQUIRED = {
    "R0": (("x", "y"), []),
    "R1": (("x",), ["x^2"]),
    "R2": (("x", "y"), ["x^2"]),
    "R3": (("x", "y"), ["x*y"]),
    "R4": (("x", "y", "z"), ["x^2", "y^2"]),
    "R5": (("x", "y"), ["x^2", "x*y", "y^2"]),
}
CFG = inv.DEFAULT


@lru_cache(maxsize=None)
def corpus():
    return {i.id: i for i in load_corpus()}


@lru_cache(maxsize=None)
def modules(rid):
    return corpus()[rid].build_modules()


@lru_cache(maxsize=None)
def full_run():
    t0 = time.perf_counter()
    results = run_corpus(list(corpus().values()), CFG)
    return results, time.perf_counter() - t0


def _ring_matches(inst, names, gens):
    if inst.names != names or str(inst.field) != "Q":
        return False
    R = inst.ring
    want = Ideal(R.poly_ring, [parse_poly(g, names, R.field) for g in gens])
    have = Ideal(R.poly_ring, [dict(g) for g in inst.ideal])
    return want == have


def _cm_rings():
    return [rid for rid, inst in corpus().items() if "w" in inst.modules]


# ---------------------------------------------------------------- criteria

def criterion_1():
    bad = []
    for rid, (names, gens) in REQUIRED.items():
        inst = corpus().get(rid)
        if inst is None or not _ring_matches(inst, names, gens):
            bad.append(f"{rid} missing or wrong")
            continue
        mods = inst.build_modules()
        kinds = {s.kind: n for n, s in inst.modules.items()}
        if not {"free", "residue", "canonical"} <= set(kinds):
            bad.append(f"{rid} lacks R, k or omega")
        cyclic_nonfree = [n for n, s in inst.modules.items()
                          if s.kind == "quotient" and not is_free(mods[n])[0]]
        if not cyclic_nonfree:
            bad.append(f"{rid} lacks a cyclic non-free module")
    results, seconds = full_run()
    t = totals(results)
    hnm_unflagged = t[HNM] - t["hypotheses-not-met-expected"]
    ok = (not bad and len(corpus()) >= 8 and t[VIOLATED] == 0 and t["engine-errors"] == 0
          and t[HNM] <= 0.05 * t["rows"] and hnm_unflagged == 0 and seconds < 60)
    return ok, (f"{len(corpus())} rings, {t['rows']} rows, {t[VIOLATED]} violated, "
                f"{t[HNM]} hnm ({t[HNM] / max(t['rows'], 1):.1%}, {hnm_unflagged} unflagged), "
                f"{t['engine-errors']} engine errors, {seconds:.1f}s" + (f"; {bad}" if bad else ""))


def criterion_2():
    n = 0
    bad = []
    for rid, inst in corpus().items():
        mods = modules(rid)
        dR = inv.ring_depth(inst.ring, CFG)
        for a, b in product(mods, repeat=2):
            M, N = mods[a], mods[b]
            if M.is_zero() or N.is_zero():
                continue
            P, q = inv.ext_sup(M, N, CFG), inv.qpd(M, CFG)
            if not (P.exact and P.finite and q.exact_finite):
                continue
            n += 1
            if not P.value == q.value == dR - inv.depth(M, CFG).value:
                bad.append(f"{rid}:({a},{b})")
    return n > 0 and not bad, f"{n} pairs with exact P and finite qpd" + (f"; failures {bad}" if bad else "")


def criterion_3():
    n = 0
    bad = []
    for rid in _cm_rings():
        mods = modules(rid)
        dR = inv.ring_depth(corpus()[rid].ring, CFG)
        for a, M in mods.items():
            if M.is_zero():
                continue
            P = inv.ext_sup(M, mods["w"], CFG)
            n += 1
            if not (P.exact and P.value == dR - inv.depth(M, CFG).value):
                bad.append(f"{rid}:{a} P={P}")
    for rid in ("R0", "R2", "R4", "R5"):
        P = inv.ext_sup(modules(rid)["k"], modules(rid)["w"], CFG)
        if not (P.exact and P.value == inv.ring_depth(corpus()[rid].ring, CFG)):
            bad.append(f"{rid}: P(k, w) = {P}")
    return not bad, f"{n} modules over {len(_cm_rings())} CM rings" + (f"; failures {bad}" if bad else "")


def criterion_4():
    n = 0
    bad = []
    for rid, inst in corpus().items():
        dR = inv.ring_depth(inst.ring, CFG)
        for a, M in modules(rid).items():
            if M.is_zero():
                continue
            q = inv.qpd(M, CFG)
            if not q.exact_finite:
                continue
            n += 1
            g = inv.grade(M, CFG)
            if not (g.exact and g.value <= q.value):
                bad.append(f"{rid}:{a} grade {g} qpd {q}")
            if q.value != dR - inv.depth(M, CFG).value:
                bad.append(f"{rid}:{a} qpd {q} vs depth formula")
    return n > 0 and not bad, f"{n} modules with exact finite qpd" + (f"; failures {bad}" if bad else "")


def criterion_5():
    bad = []
    for rid in _cm_rings():
        w = modules(rid)["w"]
        d, g = inv.krull_dim(w, CFG), inv.grade(w, CFG)
        dR = inv.ring_depth(corpus()[rid].ring, CFG)
        if not (d.exact and g.exact and d.value == dR - g.value):
            bad.append(f"{rid}: dim {d}, grade {g}")
    return not bad, f"{len(_cm_rings())} CM rings" + (f"; failures {bad}" if bad else "")


def criterion_6():
    k = modules("R1")["k"]
    lengths = [ext(k, k, i).length_if_finite() for i in range(11)]
    gens = [ext(k, k, i).minimal().rank for i in range(11)]
    betti = k.resolution(10).betti()[:11]
    P = inv.ext_sup(k, k, CFG)
    ctx = Context("R1", corpus()["R1"].ring, modules("R1"), CFG)
    verdict = run_check(ctx, "ischebeck_qpd", ("k", "k")).verdict
    ok = (lengths == [1] * 11 and gens == [1] * 11 and betti == [1] * 11
          and P.status == inv.LOWER and P.value >= 10 and verdict == HNM)
    return ok, f"dim Ext^i(k,k) = {lengths}, Betti {betti}, P = {P.value} ({P.status}), check {verdict}"


def criterion_7():
    mods_n = pairs_n = 0
    bad = []
    for rid, inst in corpus().items():
        mods = modules(rid)
        for a, M in mods.items():
            if M.is_zero():
                continue
            mods_n += 1
            if inv.depth_koszul(M) != inv.depth_ext(M, CFG):
                bad.append(f"depth {rid}:{a}")
            for d in range(0, 9):
                if M.hilbert_function(d) != hilbert_oracle(M, d):
                    bad.append(f"hilbert {rid}:{a} degree {d}")
                    break
        for a, b in product(mods, repeat=2):
            M, N = mods[a], mods[b]
            if M.is_zero() or N.is_zero():
                continue
            J = annihilator(M)
            pairs_n += 1
            try:
                other = inv.depth_on(J, N, CFG)
            except inv.ConventionError:
                # ann(M) N = N: grade is infinite, so every Ext in range must vanish
                if not all(ext_is_zero(M, N, i) for i in range(M.ring.nvars + 1)):
                    bad.append(f"grade {rid}:({a},{b}) infinite by Koszul, finite by Ext")
                continue
            if inv.grade_ext(M, N, CFG) != other.value:
                bad.append(f"grade {rid}:({a},{b})")
    return not bad, f"{mods_n} modules, {pairs_n} pairs, Hilbert degrees 0..8" + (f"; {bad}" if bad else "")


def criterion_8():
    mods = modules("R2")
    M, N = mods["M"], mods["N"]
    ctx = Context("R2", corpus()["R2"].ring, mods, CFG)
    q = inv.tor_sup(M, N, CFG)
    from homograde.modules import tensor
    dM, dN = inv.depth(M, CFG).value, inv.depth(N, CFG).value
    dR, dT = inv.ring_depth(corpus()["R2"].ring, CFG), inv.depth(tensor(M, N), CFG).value
    v1 = run_check(ctx, "ab_depth_formulas", ("M", "N")).verdict
    v2 = run_check(ctx, "tensor_cm", ("M", "N")).verdict
    ok = (q.exact and q.value == 0 and (dM, dN, dR, dT) == (0, 1, 1, 0) and dM + dN == dR + dT
          and v1 == VERIFIED and v2 == VERIFIED)
    return ok, f"q = {q.value} ({q.status}); {dM} + {dN} = {dR} + {dT}; depth formula {v1}, tensor check {v2}"


def criterion_9():
    k0 = modules("R0")["k"]
    res0 = k0.resolution(6)
    ok = res0.terminated and res0.betti() == [1, 2, 1]
    detail = [f"R0 Betti {res0.betti()} ({res0.status})"]
    for rid in ("R1", "R2"):
        k = modules(rid)["k"]
        steps = inv.ring_depth(corpus()[rid].ring, CFG) + 1
        res = k.resolution(steps)
        p = inv.pd(k, CFG)
        ok = ok and not res.terminated and p.exact and p.value == float("inf")
        detail.append(f"{rid} open at step {steps}, pd {p.value} ({p.status})")
    return ok, "; ".join(detail)


def criterion_10(tmp_dir=None):
    import tempfile
    d = Path(tmp_dir or tempfile.mkdtemp())
    a, b = d / "a.json", d / "b.json"
    codes = [main(["verify", "--format", "json", "--out", str(p)]) for p in (a, b)]
    same = a.read_bytes() == b.read_bytes()
    results, _ = full_run()
    in_process = render_json(report_dict(results, CFG, None)).encode() == a.read_bytes()
    return same and in_process and codes == [0, 0], \
        f"exit codes {codes}, byte-identical {same}, matches in-process run {in_process}"


CRITERIA = [
    (1, "corpus coverage, 0 violated, <= 5% flagged hnm, < 60 s", criterion_1),
    (2, "P = qpd = depth R - depth M when both exact", criterion_2),
    (3, "P(M, omega) = depth R - depth M on CM rings", criterion_3),
    (4, "grade M <= qpd M = depth R - depth M", criterion_4),
    (5, "dim omega = depth R - grade omega", criterion_5),
    (6, "R1: Ext^i(k,k) = k for i <= 10, P >= 10, hnm verdict", criterion_6),
    (7, "two-oracle depth, grade and Hilbert functions", criterion_7),
    (8, "R2 depth formula with q = 0 and tensor check", criterion_8),
    (9, "resolutions: k over R0 is (1,2,1); R1, R2 never stop", criterion_9),
    (10, "byte-identical JSON reports", criterion_10),
]


def _line(num, title, ok, detail):
    return f"criterion {num:>2} {'PASS' if ok else 'FAIL'}: {title} [{detail}]"


@pytest.mark.parametrize("num,title,fn", CRITERIA, ids=[f"criterion_{n}" for n, _, _ in CRITERIA])
def test_criterion(num, title, fn, capsys):
    ok, detail = fn()
    with capsys.disabled():
        print("\n" + _line(num, title, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    failed = 0
    for num, title, fn in CRITERIA:
        ok, detail = fn()
        failed += not ok
        print(_line(num, title, ok, detail))
    sys.exit(1 if failed else 0)
