"""Line-oriented definition files: fields, rings, modules, pairs, checks and annotations.

    field Q                      | field Fp 101
    ring R = poly[x,y] / (x^2)
    module M over R = coker [[x, y], [0, x]] twists (0, 0)
    module k over R = residue    | canonical | free twists (0) | quotient (y) twists (0)
    pair P1 = (M, k)
    triple T1 = (k, M, k)
    check ischebeck_qpd P1 expect verified
    expect depth(k) = 0          | expect P(k, k) >= 10 | expect qid(k) unknown
    note free text

Everything after ``#`` is a comment.  A ring line opens a new instance;
names in later lines resolve inside the most recent ring.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field as dc_field
from importlib import resources

from .core import FieldSpec, format_poly, poly_degree
from .harness import CHECKS, VERDICTS
from .invariants import (MODULE_INVARIANTS, PAIR_INVARIANTS, canonical_module, residue_module,
                         ring_module)
from .modules import GModule, QuotientRing
from .homological import UnsupportedInput


class DefinitionError(ValueError):
    def __init__(self, message, line=0, col=0, kind="syntax"):
        super().__init__(f"line {line}, column {col}: {kind} error: {message}")
        self.line, self.col, self.kind = line, col, kind


# ---------------------------------------------------------------- polynomial expressions

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


class _PolyParser:
    """Recursive descent over + - * ^ / and parentheses; '/' only divides by constants."""

    def __init__(self, text, names, fld, line, col0):
        self.names, self.fld, self.line, self.col0 = names, fld, line, col0
        self.toks = []
        pos = 0
        text = text.rstrip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if m.group(0).strip() == "":
                break
            start = m.start(m.lastindex)
            self.toks.append((m.group(1), m.group(2), m.group(3), start))
            pos = m.end()
        self.i = 0
        self.n = len(names)

    def err(self, msg, kind="syntax"):
        col = self.col0 + (self.toks[self.i][3] if self.i < len(self.toks) else 0)
        raise DefinitionError(msg, self.line, col + 1, kind)

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def sym(self, s):
        t = self.peek()
        if t and t[2] == s:
            self.i += 1
            return True
        return False

    def parse(self):
        f = self.expr()
        if self.peek() is not None:
            self.err("unexpected token")
        return f

    def expr(self):
        neg = self.sym("-")
        if not neg:
            self.sym("+")
        f = self.term()
        if neg:
            f = {e: self.fld.normalize(-c) for e, c in f.items()}
        while True:
            if self.sym("+"):
                f = self._add(f, self.term())
            elif self.sym("-"):
                f = self._add(f, {e: self.fld.normalize(-c) for e, c in self.term().items()})
            else:
                return f

    def term(self):
        f = self.power()
        while True:
            if self.sym("*"):
                f = self._mul(f, self.power())
            elif self.sym("/"):
                g = self.power()
                if len(g) != 1 or any(next(iter(g))):
                    self.err("division only by nonzero constants")
                c = next(iter(g.values()))
                f = {e: x * self.fld.inv(self.fld(c)) for e, x in f.items()}
                f = {e: self.fld.normalize(x) for e, x in f.items() if self.fld.normalize(x)}
            else:
                return f

    def power(self):
        f = self.atom()
        if self.sym("^"):
            t = self.peek()
            if not t or t[0] is None:
                self.err("expected exponent")
            self.i += 1
            k = int(t[0])
            out = {(0,) * self.n: self.fld(1)}
            for _ in range(k):
                out = self._mul(out, f)
            f = out
        return f

    def atom(self):
        t = self.peek()
        if t is None:
            self.err("unexpected end of expression")
        num, name, other, _ = t
        if num is not None:
            self.i += 1
            c = self.fld(int(num))
            return {(0,) * self.n: c} if c else {}
        if name is not None:
            if name not in self.names:
                self.err(f"unknown variable {name!r}", "semantic")
            self.i += 1
            e = [0] * self.n
            e[self.names.index(name)] = 1
            return {tuple(e): self.fld(1)}
        if other == "(":
            self.i += 1
            f = self.expr()
            if not self.sym(")"):
                self.err("expected ')'")
            return f
        self.err(f"unexpected {other!r}")

    def _add(self, f, g):
        out = dict(f)
        for e, c in g.items():
            x = self.fld.normalize(out.get(e, 0) + c)
            if x:
                out[e] = x
            else:
                out.pop(e, None)
        return out

    def _mul(self, f, g):
        out = {}
        for e1, c1 in f.items():
            for e2, c2 in g.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                x = self.fld.normalize(out.get(e, 0) + c1 * c2)
                if x:
                    out[e] = x
                else:
                    out.pop(e, None)
        return out


def parse_poly(text, names, fld, line=0, col=0) -> dict:
    return _PolyParser(text, list(names), fld, line, col).parse()


# ---------------------------------------------------------------- definition objects

@dataclass(frozen=True)
class ModuleSpec:
    name: str
    kind: str                   # coker | residue | canonical | free | quotient
    rows: tuple = ()            # coker: tuple of rows of polynomial dicts (as sorted item tuples)
    gens: tuple = ()            # quotient: ideal generators
    twists: tuple = ()


@dataclass(frozen=True)
class CheckSpec:
    check_id: str
    args: tuple
    expected: str | None = None


@dataclass(frozen=True)
class ExpectSpec:
    invariant: str
    args: tuple
    expected: str


def _freeze(f: dict) -> tuple:
    return tuple(sorted(f.items()))


@dataclass
class Instance:
    id: str
    field: FieldSpec
    names: tuple
    ideal: tuple                # frozen polynomial dicts
    modules: dict = dc_field(default_factory=dict)     # name -> ModuleSpec
    pairs: dict = dc_field(default_factory=dict)
    triples: dict = dc_field(default_factory=dict)
    checks: list = dc_field(default_factory=list)
    expects: list = dc_field(default_factory=list)
    notes: list = dc_field(default_factory=list)
    _ring: QuotientRing | None = None
    _built: dict | None = None

    @property
    def ring(self) -> QuotientRing:
        if self._ring is None:
            self._ring = QuotientRing(self.field, self.names, [dict(g) for g in self.ideal], self.id)
        return self._ring

    def build_module(self, spec: ModuleSpec) -> GModule:
        R = self.ring
        if spec.kind == "residue":
            return residue_module(R)
        if spec.kind == "canonical":
            return canonical_module(R)
        if spec.kind == "free":
            if spec.twists == (0,):
                return ring_module(R)
            return GModule.free(R, spec.twists)
        if spec.kind == "quotient":
            return GModule.cyclic(R, [dict(g) for g in spec.gens], spec.twists[0] if spec.twists else 0)
        rows = [[dict(f) for f in row] for row in spec.rows]
        return GModule.from_matrix(R, rows, spec.twists)

    def build_modules(self) -> dict:
        if self._built is None:
            self._built = {name: self.build_module(s) for name, s in self.modules.items()}
        return self._built

    def key(self):
        """Structural identity used by the round-trip property."""
        return (self.id, str(self.field), self.names, self.ideal,
                tuple(sorted(self.modules.items())), tuple(sorted(self.pairs.items())),
                tuple(sorted(self.triples.items())), tuple(self.checks), tuple(self.expects),
                tuple(self.notes))

    def __eq__(self, other):
        return isinstance(other, Instance) and self.key() == other.key()


# ---------------------------------------------------------------- parsing

_NAME = r"[A-Za-z_][A-Za-z0-9_]*"


def _split_top(text: str, sep=","):
    """Split on separators outside brackets, returning (piece, offset) pairs."""
    out, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        elif ch == sep and depth == 0:
            out.append((text[start:i], start))
            start = i + 1
    out.append((text[start:], start))
    return out


def _strip_comment(line: str) -> str:
    i = line.find("#")
    return line if i < 0 else line[:i]


class _Parser:
    def __init__(self, text: str):
        self.lines = text.splitlines()
        self.fld = FieldSpec.rationals()
        self.instances: list[Instance] = []
        self.cur: Instance | None = None

    def run(self):
        for no, raw in enumerate(self.lines, 1):
            line = _strip_comment(raw)
            if not line.strip():
                continue
            self.line_no = no
            self.raw = line
            word = line.split()[0]
            handler = getattr(self, "_" + word, None)
            if handler is None or word.startswith("_"):
                self.err(f"unknown directive {word!r}", line.find(word))
            handler(line)
        return self.instances

    def err(self, msg, col=0, kind="syntax"):
        raise DefinitionError(msg, self.line_no, col + 1, kind)

    def need_ring(self):
        if self.cur is None:
            self.err("no ring declared yet", 0, "semantic")
        return self.cur

    def _match(self, pattern, line):
        m = re.fullmatch(pattern, line.strip())
        if not m:
            self.err("malformed line", len(line) - len(line.lstrip()))
        return m

    def _col(self, line, fragment):
        i = line.find(fragment)
        return max(i, 0)

    # -- directives
    def _field(self, line):
        m = self._match(r"field\s+(Q|Fp\s+(\d+))", line)
        if m.group(2):
            try:
                self.fld = FieldSpec.prime(int(m.group(2)))
            except ValueError as e:
                self.err(str(e), self._col(line, m.group(2)), "semantic")
        else:
            self.fld = FieldSpec.rationals()

    def _ring(self, line):
        m = self._match(rf"ring\s+({_NAME})\s*=\s*poly\s*\[([^\]]*)\]\s*(?:/\s*\((.*)\))?", line)
        name = m.group(1)
        if any(i.id == name for i in self.instances):
            self.err(f"ring {name} declared twice", self._col(line, name), "semantic")
        names = tuple(v.strip() for v in m.group(2).split(","))
        for v in names:
            if not re.fullmatch(_NAME, v):
                self.err(f"bad variable name {v!r}", self._col(line, "["), "syntax")
        if len(set(names)) != len(names):
            self.err("repeated variable name", self._col(line, "["), "semantic")
        gens = []
        if m.group(3) is not None and m.group(3).strip():
            off = m.start(3) + (len(line) - len(line.lstrip()))
            gens = self._polys(m.group(3), names, off)
        for g, col in gens:
            if not g:
                continue
            d = poly_degree(g)
            if d == -1:
                self.err("inhomogeneous generator", col, "semantic")
            if d == 0:
                self.err("defining ideal must be proper and generated in positive degree", col, "semantic")
        inst = Instance(name, self.fld, names, tuple(_freeze(g) for g, _ in gens if g))
        self.instances.append(inst)
        self.cur = inst

    def _polys(self, text, names, offset):
        out = []
        for piece, start in _split_top(text):
            if not piece.strip():
                self.err("empty polynomial", offset + start)
            col = offset + start + (len(piece) - len(piece.lstrip()))
            out.append((parse_poly(piece, names, self.fld, self.line_no, col), col))
        return out

    def _twists(self, text, col):
        items = [t.strip() for t in text.split(",") if t.strip()]
        try:
            return tuple(int(t) for t in items)
        except ValueError:
            self.err("twists must be integers", col)

    def _module(self, line):
        m = self._match(rf"module\s+({_NAME})\s+over\s+({_NAME})\s*=\s*(.*)", line)
        name, ring, body = m.group(1), m.group(2), m.group(3).strip()
        inst = self.need_ring()
        if ring != inst.id:
            known = [i.id for i in self.instances]
            kind = "undeclared ring" if ring not in known else "module/ring mismatch (not the current ring)"
            self.err(f"{kind} {ring!r}", self._col(line, " over ") + 6, "semantic")
        if name in inst.modules:
            self.err(f"module {name} declared twice", self._col(line, name), "semantic")
        off = m.start(3) + (len(line) - len(line.lstrip()))
        tw_m = re.search(r"\btwists\s*\(([^)]*)\)\s*$", body)
        twists = None
        if tw_m:
            twists = self._twists(tw_m.group(1), off + tw_m.start(1))
            body = body[:tw_m.start()].strip()
        names = inst.names
        if body in ("residue", "canonical"):
            if twists is not None:
                self.err("twists not allowed here", off)
            spec = ModuleSpec(name, body)
        elif body == "free":
            spec = ModuleSpec(name, "free", twists=twists if twists is not None else (0,))
        elif body.startswith("quotient"):
            qm = re.fullmatch(r"quotient\s*\((.*)\)", body)
            if not qm:
                self.err("expected quotient (generators)", off)
            gens = self._polys(qm.group(1), names, off + qm.start(1))
            for g, col in gens:
                if g and poly_degree(g) == -1:
                    self.err("inhomogeneous generator", col, "semantic")
            tw = twists if twists is not None else (0,)
            if len(tw) != 1:
                self.err("a quotient module has one generator", off, "semantic")
            spec = ModuleSpec(name, "quotient", gens=tuple(_freeze(g) for g, _ in gens if g), twists=tw)
        elif body.startswith("coker"):
            cm = re.fullmatch(r"coker\s*\[(.*)\]", body)
            if not cm:
                self.err("expected coker [[...], ...]", off)
            inner_off = off + cm.start(1)
            rows = []
            for piece, start in _split_top(cm.group(1)):
                p = piece.strip()
                if not (p.startswith("[") and p.endswith("]")):
                    self.err("matrix rows must be bracketed", inner_off + start)
                row_off = inner_off + start + piece.find("[") + 1
                rows.append([f for f, _ in self._polys(p[1:-1], names, row_off)] if p[1:-1].strip() else [])
            ncols = {len(r) for r in rows}
            if len(ncols) > 1:
                self.err("ragged matrix", inner_off, "semantic")
            tw = twists if twists is not None else (0,) * len(rows)
            if len(tw) != len(rows):
                self.err("one twist per matrix row required", off, "semantic")
            # homogeneity: entry (i, j) has degree deg(col j) - twist i
            for j in range(next(iter(ncols), 0)):
                deg = None
                for i, row in enumerate(rows):
                    f = row[j]
                    if not f:
                        continue
                    d = poly_degree(f)
                    if d == -1:
                        self.err("inhomogeneous matrix entry", off, "semantic")
                    if deg is None:
                        deg = d + tw[i]
                    elif deg != d + tw[i]:
                        self.err(f"inhomogeneous column {j + 1} for the given twists", off, "semantic")
            spec = ModuleSpec(name, "coker", rows=tuple(tuple(_freeze(f) for f in r) for r in rows),
                              twists=tw)
        else:
            self.err(f"unknown module constructor {body.split()[0] if body else ''!r}", off)
        if spec.kind == "canonical":
            try:
                inst.build_module(spec)
            except UnsupportedInput as e:
                self.err(str(e), off, "semantic")
        inst.modules[name] = spec

    def _names(self, text, col, want=None):
        parts = [p.strip() for p in text.split(",")]
        inst = self.need_ring()
        for p in parts:
            if p not in inst.modules:
                self.err(f"unknown module {p!r}", col, "semantic")
        if want is not None and len(parts) != want:
            self.err(f"expected {want} module names", col, "semantic")
        return tuple(parts)

    def _pair(self, line):
        m = self._match(rf"pair\s+({_NAME})\s*=\s*\(([^)]*)\)", line)
        inst = self.need_ring()
        inst.pairs[m.group(1)] = self._names(m.group(2), self._col(line, "("), 2)

    def _triple(self, line):
        m = self._match(rf"triple\s+({_NAME})\s*=\s*\(([^)]*)\)", line)
        inst = self.need_ring()
        inst.triples[m.group(1)] = self._names(m.group(2), self._col(line, "("), 3)

    def _check(self, line):
        m = self._match(rf"check\s+({_NAME})\s+(\(([^)]*)\)|{_NAME})(?:\s+expect\s+([a-z-]+))?", line)
        inst = self.need_ring()
        cid = m.group(1)
        if cid not in CHECKS:
            self.err(f"unknown check {cid!r}", self._col(line, cid), "semantic")
        if m.group(3) is not None:
            args = self._names(m.group(3), self._col(line, "("))
        else:
            ref = m.group(2)
            if ref in inst.pairs:
                args = inst.pairs[ref]
            elif ref in inst.triples:
                args = inst.triples[ref]
            elif ref in inst.modules:
                args = (ref,)
            else:
                self.err(f"unknown pair, triple or module {ref!r}", self._col(line, ref), "semantic")
        if len(args) != CHECKS[cid][0]:
            self.err(f"{cid} takes {CHECKS[cid][0]} module(s)", self._col(line, cid), "semantic")
        exp = m.group(4)
        if exp is not None and exp not in VERDICTS:
            self.err(f"unknown verdict {exp!r}", self._col(line, exp), "semantic")
        inst.checks.append(CheckSpec(cid, tuple(args), exp))

    def _expect(self, line):
        m = self._match(rf"expect\s+({_NAME})\s*\(([^)]*)\)\s*(=|>=|<=|unknown)\s*(-?inf|-?\d+)?", line)
        inv_name, op, val = m.group(1), m.group(3), m.group(4)
        args = self._names(m.group(2), self._col(line, "("))
        table = MODULE_INVARIANTS if len(args) == 1 else PAIR_INVARIANTS
        if inv_name not in table:
            self.err(f"unknown invariant {inv_name!r} for {len(args)} module(s)",
                     self._col(line, inv_name), "semantic")
        if op == "unknown":
            if val is not None:
                self.err("no value after 'unknown'", self._col(line, val))
            expected = "unknown"
        else:
            if val is None:
                self.err("missing value", len(line.rstrip()))
            expected = val if op == "=" else f"{op} {val}"
        self.need_ring().expects.append(ExpectSpec(inv_name, args, expected))

    def _note(self, line):
        text = line.strip()[4:].strip()
        self.need_ring().notes.append(text)


def parse_definition(text: str) -> list:
    """Parse a definition file into a list of Instances (one per ring)."""
    return _Parser(text).run()


# ---------------------------------------------------------------- printing

def _fmt_twists(tw):
    return "(" + ", ".join(str(t) for t in tw) + ")"


def pretty_print(instances) -> str:
    out = []
    fld = None
    for inst in instances:
        if str(inst.field) != fld:
            fld = str(inst.field)
            out.append(f"field {fld}")
        names = inst.names
        ideal = ", ".join(format_poly(dict(g), names) for g in inst.ideal)
        head = f"ring {inst.id} = poly[{', '.join(names)}]"
        out.append(head + (f" / ({ideal})" if ideal else ""))
        for note in inst.notes:
            out.append(f"note {note}")
        for name, s in inst.modules.items():
            if s.kind in ("residue", "canonical"):
                body = s.kind
            elif s.kind == "free":
                body = f"free twists {_fmt_twists(s.twists)}"
            elif s.kind == "quotient":
                gens = ", ".join(format_poly(dict(g), names) for g in s.gens)
                body = f"quotient ({gens}) twists {_fmt_twists(s.twists)}"
            else:
                rows = ", ".join("[" + ", ".join(format_poly(dict(f), names) for f in r) + "]"
                                 for r in s.rows)
                body = f"coker [{rows}] twists {_fmt_twists(s.twists)}"
            out.append(f"module {name} over {inst.id} = {body}")
        for name, (a, b) in inst.pairs.items():
            out.append(f"pair {name} = ({a}, {b})")
        for name, t in inst.triples.items():
            out.append(f"triple {name} = ({', '.join(t)})")
        for c in inst.checks:
            line = f"check {c.check_id} ({', '.join(c.args)})"
            if c.expected:
                line += f" expect {c.expected}"
            out.append(line)
        for e in inst.expects:
            if e.expected == "unknown":
                out.append(f"expect {e.invariant}({', '.join(e.args)}) unknown")
            elif e.expected[:2] in (">=", "<="):
                out.append(f"expect {e.invariant}({', '.join(e.args)}) {e.expected}")
            else:
                out.append(f"expect {e.invariant}({', '.join(e.args)}) = {e.expected}")
        out.append("")
    return "\n".join(out)


def shipped_corpus_text() -> str:
    return resources.files("homograde").joinpath("data/corpus.hg").read_text(encoding="utf-8")


def load_corpus(path: str | None = None) -> list:
    if path is None:
        return parse_definition(shipped_corpus_text())
    with open(path, encoding="utf-8") as fh:
        return parse_definition(fh.read())
