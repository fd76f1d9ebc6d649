import pytest
from hypothesis import given, strategies as st

from homograde.corpus import DefinitionError, load_corpus, parse_definition, pretty_print

MINIMAL = """
# minimal ring file
field Q
ring R = poly[x, y] / (x^2)
module k over R = residue
module W over R = canonical
module M over R = coker [[x, y], [0, x]] twists (0, 0)
pair P1 = (M, k)
"""


def test_minimal_file():
    [inst] = parse_definition(MINIMAL)
    assert inst.id == "R" and inst.names == ("x", "y")
    assert str(inst.ring) == "Q[x,y]/(x^2)"
    assert set(inst.modules) == {"k", "W", "M"}
    assert inst.pairs["P1"] == ("M", "k")
    mods = inst.build_modules()
    assert mods["M"].twists == (0, 0)


@pytest.mark.parametrize("text,where,kind,needle", [
    ("field Q\nring R = poly[x,y] / (x^2 + y)\n", (2, 23), "semantic", "inhomogeneous"),
    ("field Q\nring R = poly[x,y]\nmodule M over S = residue\n", (3, 15), "semantic", "undeclared ring"),
    ("field Q\nring R = poly[x,y]\nmodule M over R = quotient (z)\n", (3, 29), "semantic", "unknown variable"),
    ("field Q\nring R = poly[x,y]\nmodule M over R = coker [[x + y^2]]\n", (3, 1), "semantic", "inhomogeneous"),
    # second column would need deg y + 0 = deg x + 1
    ("field Q\nring R = poly[x,y]\nmodule M over R = coker [[x, y], [0, x]] twists (0, 1)\n", (3, 1),
     "semantic", "inhomogeneous column 2"),
    ("field Q\nring R = poly[x,y]\nfrobnicate\n", (3, 1), "syntax", "unknown directive"),
    ("field Q\nring R = poly[x,y] / (x^^2)\n", (2, 1), "syntax", ""),
    ("field Fp 2\n", (1, 1), "semantic", "characteristic 2"),
    ("field Q\nring R = poly[x,y,z] / (x*z, y*z)\nmodule W over R = canonical\n", (3, 1), "semantic",
     "Cohen-Macaulay"),
    ("field Q\nring R = poly[x]\nmodule k over R = residue\ncheck nope (k)\n", (4, 1), "semantic", "unknown check"),
])
def test_parse_errors_carry_position(text, where, kind, needle):
    with pytest.raises(DefinitionError) as e:
        parse_definition(text)
    err = e.value
    assert err.kind == kind
    assert err.line == where[0]
    if where[1] > 1:
        assert err.col == where[1]
    assert needle in str(err)
    assert str(err).startswith(f"line {err.line}, column {err.col}")


def test_module_ring_mismatch():
    text = "ring A = poly[x]\nring B = poly[y]\nmodule k over A = residue\n"
    with pytest.raises(DefinitionError, match="mismatch"):
        parse_definition(text)


def test_shipped_corpus_coverage():
    insts = {i.id: i for i in load_corpus()}
    assert len(insts) >= 8
    for rid in ("R0", "R1", "R2", "R3", "R4", "R5"):
        kinds = {s.kind for s in insts[rid].modules.values()}
        assert {"free", "residue", "canonical", "quotient"} <= kinds
    assert str(insts["R6"].field) == "Fp 101"


def test_shipped_corpus_round_trip():
    insts = load_corpus()
    assert parse_definition(pretty_print(insts)) == insts


# ---------------------------------------------------------------- round-trip property

VARS = ("x", "y", "z")


@st.composite
def homog_poly(draw, nv, deg):
    from homograde.core import monomials_of_degree
    mons = draw(st.lists(st.sampled_from(monomials_of_degree(nv, deg)), min_size=1, max_size=3, unique=True))
    out = []
    for m in mons:
        c = draw(st.sampled_from(["", "2*", "-", "1/3*", "-5/2*"]))
        body = "*".join(f"{v}^{e}" if e > 1 else v for v, e in zip(VARS[:nv], m) if e)
        out.append(c + body)
    return " + ".join(out).replace("+ -", "- ")


@st.composite
def definition_texts(draw):
    lines = []
    for r in range(draw(st.integers(1, 2))):
        fld = draw(st.sampled_from(["Q", "Fp 7", "Fp 101"]))
        nv = draw(st.integers(1, 3))
        ideal = [draw(homog_poly(nv, draw(st.integers(2, 3)))) for _ in range(draw(st.integers(0, 2)))]
        lines.append(f"field {fld}")
        head = f"ring A{r} = poly[{', '.join(VARS[:nv])}]"
        lines.append(head + (f" / ({', '.join(ideal)})" if ideal else ""))
        lines.append(f"module k over A{r} = residue")
        lines.append(f"module F over A{r} = free twists ({draw(st.integers(-2, 2))}, 0)")
        g = draw(homog_poly(nv, 1))
        lines.append(f"module M over A{r} = quotient ({g}) twists ({draw(st.integers(-1, 1))})")
        lines.append(f"module C over A{r} = coker [[{VARS[0]}, 0], [0, {VARS[0]}^2]] twists (0, 0)")
        lines.append("pair p = (M, k)")
        lines.append("check facts p expect verified")
        lines.append("check grade_le_qpd (M)")
        lines.append("expect depth(k) = 0")
        lines.append("expect P(M, k) >= 3")
        lines.append("note generated")
    return "\n".join(lines) + "\n"


@given(definition_texts())
def test_parse_print_parse_round_trip(text):
    first = parse_definition(text)
    printed = pretty_print(first)
    again = parse_definition(printed)
    assert again == first
    assert pretty_print(again) == printed
