import pytest
from hypothesis import given, strategies as st

from homograde.core import FieldSpec, PolynomialRing, mono_mul, monomials_of_degree, poly_to_vec
from homograde.groebner import Ideal, ResourceError, buchberger, groebner, kernel, spair_check
from homograde.groebner import Limits
from homograde.linalg import rank

Q = FieldSpec.rationals()
F101 = FieldSpec.prime(101)
S = PolynomialRing(Q, ("x", "y", "z"))
NV = 3


def homog(d):
    mons = monomials_of_degree(NV, d)
    return st.dictionaries(st.sampled_from(mons), st.integers(-3, 3), min_size=1, max_size=4).map(
        lambda f: {m: Q(c) for m, c in f.items() if c})


gens_st = st.lists(st.integers(1, 2).flatmap(homog), min_size=1, max_size=3).map(
    lambda gs: [g for g in gs if g])


def in_span(f, gens):
    """Degreewise linear algebra: f in I iff f is a combination of monomial multiples."""
    d = sum(next(iter(f)))
    rows = []
    for g in gens:
        gd = sum(next(iter(g)))
        for m in monomials_of_degree(NV, d - gd):
            rows.append({mono_mul(e, m): c for e, c in g.items()})
    base = rank(rows)
    return rank(rows + [f]) == base


@given(gens_st)
def test_buchberger_criterion_holds(gens):
    if not gens:
        return
    gb = groebner([poly_to_vec(g) for g in gens], (0,), NV, Q)
    assert spair_check(gb)


@given(gens_st, st.integers(1, 3).flatmap(homog))
def test_membership_matches_linear_algebra(gens, f):
    if not gens or not f:
        return
    I = Ideal(S, gens)
    assert I.contains(f) == in_span(f, gens)
    for g in gens:
        assert I.contains(g)


@given(gens_st, gens_st)
def test_intersection_and_colon_laws(a, b):
    if not a or not b:
        return
    I, J = Ideal(S, a), Ideal(S, b)
    K = I.intersect(J)
    assert I.contains_ideal(K) and J.contains_ideal(K)
    assert K.contains_ideal(I * J)
    C = I.colon(J)
    assert C.contains_ideal(I)
    assert I.contains_ideal(C * J)


def _mono_ideal(ms):
    return Ideal(S, [{m: Q(1)} for m in ms])


mono_st = st.lists(st.tuples(*[st.integers(0, 3)] * NV).filter(any), min_size=1, max_size=4)


@given(mono_st, mono_st)
def test_monomial_intersection_is_lcms(a, b):
    lcm = [tuple(max(i, j) for i, j in zip(u, v)) for u in a for v in b]
    assert _mono_ideal(a).intersect(_mono_ideal(b)) == _mono_ideal(lcm)


@given(mono_st, st.tuples(*[st.integers(0, 2)] * NV).filter(any))
def test_monomial_colon(a, u):
    expect = [tuple(max(i - j, 0) for i, j in zip(m, u)) for m in a]
    got = _mono_ideal(a).colon(_mono_ideal([u]))
    if any(not any(e) for e in expect):
        assert got.is_unit()
    else:
        assert got == _mono_ideal(expect)


def test_krull_dimensions():
    x, y, z = S.gens()
    assert Ideal(S, [x * x, y * y]).krull_dim() == 1
    assert Ideal(S, [x * z, y * z]).krull_dim() == 2
    assert Ideal(S, [x * z - y * y]).krull_dim() == 2
    assert Ideal(S, [x, y, z]).krull_dim() == 0
    assert Ideal(S).krull_dim() == 3
    assert Ideal.unit(S).krull_dim() == float("-inf")


def test_radical_membership():
    x, y, z = S.gens()
    I = Ideal(S, [x * x, x * y * y])
    assert I.radical_contains(x)
    assert not I.radical_contains(y)
    assert Ideal(S, [x * z, y * z]).radical_contains((x * z).terms)


def test_twisted_cubic_basis():
    x, y, z = S.gens()
    gb = buchberger([x * z - y * y, x * y, y * z])
    assert spair_check(gb)
    I = Ideal(S, [x * z - y * y, x * y, y * z])
    assert I.contains(y ** 3) and not I.contains(x ** 3)


def test_prime_field_basis():
    T = PolynomialRing(F101, ("x", "y"))
    x, y = T.gens()
    gb = buchberger([x * x + 100 * y * y, x * y])
    assert spair_check(gb)
    assert Ideal(T, [x * x - y * y, x * y]).contains(y ** 3)


def test_inhomogeneous_rejected():
    x, y, z = S.gens()
    with pytest.raises(ValueError):
        buchberger([x * x + y])


def test_kernel_of_koszul_map():
    x, y = {(1, 0, 0): Q(1)}, {(0, 1, 0): Q(1)}
    # columns x, y from R(-1)^2 to R; kernel is generated by (y, -x)
    ker = kernel([poly_to_vec(x), poly_to_vec(y)], (1, 1), (0,), NV, Q)
    assert len(ker) == 1
    v = ker[0]
    assert v == {(0, (0, 1, 0)): Q(1), (1, (1, 0, 0)): Q(-1)} or \
        v == {(0, (0, 1, 0)): Q(-1), (1, (1, 0, 0)): Q(1)}


def test_resource_limit_raises():
    x, y, z = S.gens()
    gens = [poly_to_vec((x ** 3 + y ** 3 + z ** 3).terms), poly_to_vec((x * y * z).terms),
            poly_to_vec((x * x * y - z ** 3).terms)]
    with pytest.raises(ResourceError):
        groebner(gens, (0,), NV, Q, limits=Limits(max_degree=3))
