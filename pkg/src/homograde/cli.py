"""Command-line front end: ``homograde verify``, ``homograde invariant``, ``homograde print``."""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from . import __version__
from .corpus import DefinitionError, parse_definition, pretty_print, shipped_corpus_text
from .harness import (CHECKS, HNM, INCONCLUSIVE, VERIFIED, VIOLATED, Context,
                      evaluate_invariant, mismatches, run_instance, totals)
from .invariants import Budgets, MODULE_INVARIANTS, PAIR_INVARIANTS

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _positive(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _budget_flags(p):
    p.add_argument("--budget-ext", type=_positive, default=10, help="Ext/Tor scan budget (default 10)")
    p.add_argument("--budget-gdim", type=_positive, default=10, help="G-dim tail budget (default 10)")
    p.add_argument("--budget-bass", type=_positive, default=5,
                   help="Bass scan runs to depth R + N (default 5)")
    p.add_argument("--res-cap", type=_positive, default=2,
                   help="pd decision resolves to depth R + N steps (default 2)")
    p.add_argument("--rank-cap", type=_positive, default=256,
                   help="abort resolutions whose free modules exceed this rank")


def _config(ns) -> Budgets:
    return Budgets(ext=ns.budget_ext, gdim=ns.budget_gdim, bass=ns.budget_bass,
                   res_cap=ns.res_cap, rank_cap=ns.rank_cap)


def build_parser():
    p = _Parser(prog="homograde", description="Homological invariants and formula checks "
                                              "over graded quotient rings.")
    p.add_argument("--version", action="version", version=f"homograde {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    v = sub.add_parser("verify", help="run the checks declared in a corpus file")
    v.add_argument("corpus", nargs="?", help="definition file (default: $HOMOGRADE_CORPUS or shipped corpus)")
    v.add_argument("--checks", help="comma separated check ids (default: all)")
    v.add_argument("--format", choices=("json", "md", "plain"), default="plain")
    v.add_argument("--out", help="write the report here instead of stdout")
    v.add_argument("--jobs", type=_positive, default=1)
    v.add_argument("--timestamps", action="store_true", help="add a generation time to JSON reports")
    _budget_flags(v)

    i = sub.add_parser("invariant", help="compute one invariant")
    i.add_argument("file", help="definition file")
    i.add_argument("name", help="invariant: " + ", ".join(MODULE_INVARIANTS) + " (one module) or "
                   + ", ".join(PAIR_INVARIANTS) + " (two modules)")
    i.add_argument("modules", nargs="+")
    i.add_argument("--ring", help="ring name when the file declares several")
    i.add_argument("--format", choices=("json", "plain"), default="plain")
    _budget_flags(i)

    pr = sub.add_parser("print", help="parse and pretty-print a definition file")
    pr.add_argument("file", nargs="?")

    sub.add_parser("checks", help="list check ids")
    return p


# ---------------------------------------------------------------- reports

def _config_dict(cfg: Budgets, check_ids) -> dict:
    return {"budget-ext": cfg.ext, "budget-gdim": cfg.gdim, "budget-bass": cfg.bass,
            "res-cap": cfg.res_cap, "rank-cap": cfg.rank_cap,
            "checks": sorted(check_ids) if check_ids else "all"}


def report_dict(results, cfg, check_ids, timestamps=False) -> dict:
    d = {"engine-version": __version__, "config": _config_dict(cfg, check_ids),
         "instances": [r.to_dict() for r in results], "totals": totals(results)}
    if timestamps:
        import datetime
        d["generated-at"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    return d


def render_json(rep: dict) -> str:
    return json.dumps(rep, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _short(v):
    if v is None:
        return ""
    val, st = v["value"], v["status"]
    if st == "lower-bound":
        return f">= {val}"
    if st == "upper-bound":
        return f"<= {val}"
    if st == "unknown":
        return "?"
    return val


def render_md(rep: dict, diff) -> str:
    out = [f"# homograde report (engine {rep['engine-version']})", "",
           "| instance | check | args | verdict | lhs | rhs | expected |",
           "|---|---|---|---|---|---|---|"]
    for inst in rep["instances"]:
        for c in inst["checks"]:
            out.append(f"| {inst['id']} | {c['check-id']} | {', '.join(c['args'])} | {c['verdict']} | "
                       f"{_short(c['lhs'])} | {_short(c['rhs'])} | {c.get('expected', '')} |")
    out += ["", "| total | count |", "|---|---|"]
    out += [f"| {k} | {v} |" for k, v in rep["totals"].items()]
    if diff:
        out += ["", "## annotation mismatches", ""] + [f"- {line}" for line in diff]
    errs = [e for inst in rep["instances"] for e in inst.get("errors", [])]
    if errs:
        out += ["", "## engine errors", ""] + [f"- {e}" for e in errs]
    return "\n".join(out) + "\n"


def render_plain(rep: dict, diff) -> str:
    out = []
    for inst in rep["instances"]:
        out.append(f"[{inst['id']}]")
        for c in inst["checks"]:
            exp = f"  (expected {c['expected']})" if "expected" in c and c["expected"] != c["verdict"] else ""
            out.append(f"  {c['check-id']:<20} ({', '.join(c['args'])}): {c['verdict']}{exp}")
        for e in inst.get("expectations", []):
            mark = "ok" if e["ok"] else "MISMATCH"
            out.append(f"  expect {e['invariant']}({', '.join(e['args'])}) {e['expected']}: {mark}")
        for e in inst.get("errors", []):
            out.append(f"  ENGINE ERROR {e}")
    t = rep["totals"]
    out.append("totals: " + ", ".join(f"{k} {t[k]}" for k in
                                      (VERIFIED, VIOLATED, INCONCLUSIVE, HNM, "rows",
                                       "annotation-mismatches", "engine-errors")))
    for line in diff:
        out.append(f"- {line}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------- commands

def _worker(args):
    text, idx, cfg, check_ids = args
    inst = parse_definition(text)[idx]
    return run_instance(inst, cfg, check_ids)


def _read_text(path):
    if path is None:
        path = os.environ.get("HOMOGRADE_CORPUS")
    if path is None:
        return shipped_corpus_text(), "<shipped corpus>"
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read(), path
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}")


def cmd_verify(ns) -> int:
    check_ids = None
    if ns.checks:
        check_ids = [c.strip() for c in ns.checks.split(",") if c.strip()]
        unknown = [c for c in check_ids if c not in CHECKS]
        if unknown:
            raise UsageError(f"unknown check id(s): {', '.join(unknown)}; known: {', '.join(CHECKS)}")
    text, label = _read_text(ns.corpus)
    try:
        instances = parse_definition(text)
    except DefinitionError as e:
        raise UsageError(f"{label}: {e}")
    cfg = _config(ns)
    if ns.jobs > 1 and len(instances) > 1:
        with ProcessPoolExecutor(max_workers=ns.jobs) as ex:
            results = list(ex.map(_worker, [(text, i, cfg, check_ids) for i in range(len(instances))]))
    else:
        results = [run_instance(inst, cfg, check_ids) for inst in instances]
    rep = report_dict(results, cfg, check_ids, ns.timestamps)
    diff = mismatches(results)
    if ns.format == "json":
        body = render_json(rep)
    elif ns.format == "md":
        body = render_md(rep, diff)
    else:
        body = render_plain(rep, diff)
    if ns.out:
        with open(ns.out, "w", encoding="utf-8") as fh:
            fh.write(body)
    else:
        sys.stdout.write(body)
    if diff:
        print("annotation mismatches:", file=sys.stderr)
        for line in diff:
            print(f"  {line}", file=sys.stderr)
    t = rep["totals"]
    bad = t[VIOLATED] or t["engine-errors"] or t["annotation-mismatches"]
    return EXIT_FAIL if bad else EXIT_OK


def cmd_invariant(ns) -> int:
    text, label = _read_text(ns.file)
    try:
        instances = parse_definition(text)
    except DefinitionError as e:
        raise UsageError(f"{label}: {e}")
    if not instances:
        raise UsageError("no ring declared")
    if ns.ring:
        match = [i for i in instances if i.id == ns.ring]
        if not match:
            raise UsageError(f"unknown ring {ns.ring!r}")
        inst = match[0]
    elif len(instances) == 1:
        inst = instances[0]
    else:
        raise UsageError("several rings declared; pick one with --ring")
    names = tuple(ns.modules)
    table = MODULE_INVARIANTS if len(names) == 1 else PAIR_INVARIANTS if len(names) == 2 else ()
    if ns.name not in table:
        raise UsageError(f"unknown invariant {ns.name!r} for {len(names)} module(s)")
    for n in names:
        if n not in inst.modules:
            raise UsageError(f"unknown module {n!r} in ring {inst.id}")
    cfg = _config(ns)
    ctx = Context(inst.id, inst.ring, inst.build_modules(), cfg)
    val = evaluate_invariant(ctx, ns.name, names)
    if ns.format == "json":
        sys.stdout.write(json.dumps(val.to_dict(), sort_keys=True, ensure_ascii=False) + "\n")
    else:
        print(val)
    return EXIT_OK


def cmd_print(ns) -> int:
    text, label = _read_text(ns.file)
    try:
        instances = parse_definition(text)
    except DefinitionError as e:
        raise UsageError(f"{label}: {e}")
    sys.stdout.write(pretty_print(instances))
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    if ns.command is None:
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    try:
        if ns.command == "verify":
            return cmd_verify(ns)
        if ns.command == "invariant":
            return cmd_invariant(ns)
        if ns.command == "print":
            return cmd_print(ns)
        if ns.command == "checks":
            for cid, (arity, fn) in CHECKS.items():
                print(f"{cid:<20} {arity} module(s)  {(fn.__doc__ or '').strip().splitlines()[0] if fn.__doc__ else ''}")
            return EXIT_OK
    except UsageError as e:
        print(f"homograde: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as e:  # engine failure
        print(f"homograde: engine error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
