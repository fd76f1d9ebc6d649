import math

import pytest
from hypothesis import given

from homograde.core import FieldSpec
from homograde.invariants import (EXACT, LOWER, UNKNOWN, Budgets, CertifiedValue,
                                  ConventionError, canonical_module, depth, depth_ext, depth_koszul,
                                  depth_on, ext_sup, gdim, grade, grade_ext, grade_pair,
                                  is_cm_ring, is_quasi_perfect, krull_dim, pd, qpd,
                                  ring_depth, ring_dim, supp_contained, tor_sup)
from homograde.modules import GModule

from test_modules import cyclic_modules

Q = FieldSpec.rationals()
INF = math.inf


@pytest.fixture(scope="module")
def mods(corpus):
    return {rid: inst.build_modules() for rid, inst in corpus.items()}


# ring: (depth R, dim R, omega twists)
RING_FACTS = {
    "R0": (2, 2, (2,)), "R1": (0, 0, (-1,)), "R2": (1, 1, (0,)), "R3": (1, 1, (0,)),
    "R4": (1, 1, (-1,)), "R5": (0, 0, (-1, -1)), "R6": (1, 1, (0,)), "R8": (2, 2, None),
}


@pytest.mark.parametrize("rid", sorted(RING_FACTS))
def test_ring_depth_and_dimension(rid, corpus):
    d, n, tw = RING_FACTS[rid]
    R = corpus[rid].ring
    assert ring_depth(R) == d
    assert ring_dim(R) == n
    assert is_cm_ring(R)
    if tw is not None:
        assert canonical_module(R).twists == tw


def test_non_cm_ring_has_no_canonical_module(corpus):
    R = corpus["R7"].ring
    assert ring_depth(R) == 1 and ring_dim(R) == 2
    assert not is_cm_ring(R)


def test_canonical_module_of_non_gorenstein_ring(mods):
    w = mods["R5"]["w"]
    assert w.num_generators == 2
    assert w.minimal().hilbert_values(-1, 1) == [2, 1, 0]


# frozen values: (ring, module, invariant, value, status)
FROZEN = [
    ("R0", "k", "pd", 2, EXACT), ("R0", "M", "pd", 2, EXACT),
    ("R1", "k", "pd", INF, EXACT), ("R2", "k", "pd", INF, EXACT), ("R2", "M", "pd", 1, EXACT),
    ("R2", "k", "depth", 0, EXACT), ("R2", "R", "depth", 1, EXACT), ("R3", "M", "depth", 1, EXACT),
    ("R2", "k", "qpd", 1, EXACT), ("R5", "k", "qpd", 0, EXACT), ("R7", "k", "qpd", 1, EXACT),
    ("R8", "M", "qpd", 1, EXACT),
    ("R1", "k", "gdim", 0, EXACT), ("R2", "k", "gdim", 1, EXACT), ("R3", "M", "gdim", 0, EXACT),
    ("R8", "M", "gdim", 1, EXACT), ("R5", "k", "gdim", 1, LOWER),
    ("R2", "M", "grade", 1, EXACT), ("R3", "M", "grade", 0, EXACT),
    ("R2", "w", "qid", 1, EXACT), ("R5", "w", "qid", 0, EXACT),
    ("R5", "R", "qid", None, UNKNOWN), ("R2", "k", "qid", None, UNKNOWN),
    ("R0", "M", "dim", 1, EXACT), ("R4", "M", "dim", 1, EXACT),
]


@pytest.mark.parametrize("rid,mod,inv,value,status", FROZEN)
def test_frozen_invariants(rid, mod, inv, value, status, mods):
    from homograde.invariants import module_invariant
    v = module_invariant(inv, mods[rid][mod])
    assert v.status == status
    if value is not None:
        assert v.value == value


def test_certified_value_rendering(mods):
    v = qpd(mods["R2"]["k"])
    assert str(v).startswith("1 (exact; Koszul certificate")
    p = ext_sup(mods["R1"]["k"], mods["R1"]["k"])
    assert p.status == LOWER and p.value == 10
    assert str(p).startswith("≥ 10 (lower-bound;") and "budget 10" in str(p)
    assert CertifiedValue(INF, EXACT).to_dict()["value"] == "inf"


def test_ischebeck_pair_values(mods):
    m = mods["R2"]
    assert ext_sup(m["M"], m["N"]).value == 1
    q = tor_sup(m["M"], m["N"])
    assert (q.value, q.status) == (0, EXACT)
    for rid in ("R0", "R2", "R4", "R5"):
        v = ext_sup(mods[rid]["k"], mods[rid]["w"])
        assert v.exact and v.value == RING_FACTS[rid][0]


def test_budget_controls_lower_bound(mods):
    k = mods["R1"]["k"]
    v = ext_sup(k, k, Budgets(ext=4))
    assert (v.value, v.status) == (4, LOWER)


def test_depth_on_rejects_unit_action(mods):
    from homograde.groebner import Ideal
    M = mods["R0"]["N"]
    y = {(0, 1): Q(1)}
    assert depth_on(Ideal(M.ring.poly_ring, [y, {(1, 0): Q(1)}]), M).value == 1
    with pytest.raises(ConventionError):
        depth_on(Ideal.unit(M.ring.poly_ring), M)


def test_support_containment(mods):
    m = mods["R3"]
    assert supp_contained(m["k"], m["M"])
    assert not supp_contained(m["M"], m["k"])


def test_quasi_perfect_answers(mods):
    assert is_quasi_perfect(mods["R2"]["M"]) == "yes"
    assert is_quasi_perfect(mods["R0"]["k"]) == "yes"
    assert is_quasi_perfect(mods["R5"]["R"]) == "yes"


# ---------------------------------------------------------------- properties

@given(cyclic_modules())
def test_depth_two_routes_agree(M):
    if M.is_zero():
        return
    assert depth_koszul(M) == depth_ext(M)
    assert depth(M).value <= krull_dim(M).value


@given(cyclic_modules())
def test_grade_two_routes_agree(M):
    if M.is_zero():
        return
    R = GModule.free(M.ring)
    g = grade_pair(M, R)
    assert g.exact and g.value == grade_ext(M, R)
    assert g.value <= ring_dim(M.ring) - krull_dim(M).value


@given(cyclic_modules())
def test_auslander_buchsbaum_on_regular_ring(M):
    if M.is_zero() or M.ring.ideal_gens:
        return
    p = pd(M)
    assert p.exact and p.value + depth(M).value == 2


@given(cyclic_modules())
def test_gdim_formula_on_gorenstein_rings(M):
    if M.is_zero() or M.ring.name == "R5":
        return
    g = gdim(M)
    assert g.exact_finite
    assert g.value == ring_depth(M.ring) - depth(M).value
    p = pd(M)
    if p.exact_finite:
        assert p.value == g.value


@given(cyclic_modules())
def test_qpd_bounds(M):
    if M.is_zero():
        return
    v = qpd(M)
    if v.exact_finite:
        assert grade(M).value <= v.value == ring_depth(M.ring) - depth(M).value
