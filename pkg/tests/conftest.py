import pytest
from hypothesis import settings

from homograde.core import FieldSpec
from homograde.modules import QuotientRing

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

Q = FieldSpec.rationals()

RINGS = {
    "R0": (("x", "y"), ["x^2"][:0]),
    "R1": (("x",), ["x^2"]),
    "R2": (("x", "y"), ["x^2"]),
    "R3": (("x", "y"), ["x*y"]),
    "R4": (("x", "y", "z"), ["x^2", "y^2"]),
    "R5": (("x", "y"), ["x^2", "x*y", "y^2"]),
}


def make_ring(name, fld=Q):
    from homograde.corpus import parse_poly
    names, gens = RINGS[name]
    return QuotientRing(fld, names, [parse_poly(g, names, fld) for g in gens], name)


@pytest.fixture(scope="session")
def rings():
    return {n: make_ring(n) for n in RINGS}


@pytest.fixture(scope="session")
def corpus():
    from homograde.corpus import load_corpus
    return {i.id: i for i in load_corpus()}
