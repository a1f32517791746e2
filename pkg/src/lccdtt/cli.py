"""Command-line interface.

Exit codes: 0 all pass, 1 some failure, 2 some Unknown (and no failure),
64 usage error.
"""
import argparse
import json
import os
import sys

from . import surface
from .fin_lcc import (FinCatError, MODEL_NAMES, assignments, builtin_model,
                      canonicalize, describe_assignment, fincat_from_json,
                      fincat_to_json, is_fibrant, to_dot)
from .rewrite_eq import DEFAULT_BUDGET
from .term_core import TargetRejects, apply_functor, presentation_to_json, show

EXIT_OK, EXIT_FAIL, EXIT_UNKNOWN, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write("%s: error: %s\n" % (self.prog, message))
        raise SystemExit(EXIT_USAGE)


def _read(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as ex:
        raise UsageError("cannot read %s: %s" % (path, ex.strerror)) from ex


def _load_tt(path, out):
    """Parsed file, or None after printing the syntax error."""
    try:
        return surface.parse(_read(path))
    except surface.SurfaceError as ex:
        print(ex.diagnostic().render(path), file=out)
        return None


def _load_fincat(path):
    try:
        return fincat_from_json(json.loads(_read(path)))
    except (ValueError, KeyError, FinCatError) as ex:
        raise UsageError("%s is not a finite category file: %s" % (path, ex)) from ex


def _exit_for(results):
    st = {r.status for r in results}
    if "fail" in st:
        return EXIT_FAIL
    return EXIT_UNKNOWN if "unknown" in st else EXIT_OK


_LABEL = {surface.Check: "check", surface.EqJ: "eq", surface.Norm: "norm"}


def _report(results, path, out, trace=False):
    for r in results:
        for d in r.diagnostics:
            if d.severity == "info" and not (trace and d.trace):
                label = _LABEL.get(type(r.judgment), "item")
                note = ""
                if trace and d.message == "Equal":
                    note = " (0 steps: sides identical after elaboration)"
                print("%s:%s: pass: %s %s%s" % (path, d.span, label, d.message,
                                                 note), file=out)
            else:
                print(d.render(path), file=out)
    n = {s: sum(r.status == s for r in results) for s in ("pass", "fail", "unknown")}
    print("%d passed, %d failed, %d unknown" % (n["pass"], n["fail"], n["unknown"]),
          file=out)


def cmd_check(a, out):
    f = _load_tt(a.file, out)
    if f is None:
        return EXIT_FAIL
    res = surface.elaborate(f, a.budget, a.trace)
    _report(res, a.file, out, a.trace)
    return _exit_for(res)


def cmd_eq(a, out):
    f = _load_tt(a.file, out)
    if f is None:
        return EXIT_FAIL
    res = [r for r in surface.elaborate(f, a.budget, a.trace)
           if not isinstance(r.judgment, (surface.Check, surface.Norm))]
    _report(res, a.file, out, a.trace)
    return _exit_for(res)


def cmd_norm(a, out):
    f = _load_tt(a.file, out)
    if f is None:
        return EXIT_FAIL
    names = {it.name for it in f.items if isinstance(it, (surface.JudgmentBlock,
                                                          surface.Context))}
    if a.target not in names:
        raise UsageError("no judgment block or context named %r" % a.target)
    res = surface.elaborate(f, a.budget, a.trace, only=a.target)
    res = [r for r in res if isinstance(r.judgment, surface.Norm)
           or r.status != "pass"]
    for r in res:
        if r.status == "pass":
            print("%s  ==>  %s" % (surface.print_term(r.judgment.term), r.value),
                  file=out)
        else:
            for d in r.diagnostics:
                print(d.render(a.file), file=out)
    return _exit_for(res)


def cmd_fibrancy(a, out):
    C = _load_fincat(a.file)
    rep = is_fibrant(C)
    print("%s: %d objects, %d arrows; %s" % (C.name or a.file, len(C.objects),
                                             len(C.arrows), rep.text()), file=out)
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_model_check(a, out):
    """Every eq judgment, evaluated under every admissible assignment of
    its context into the model."""
    try:
        M = builtin_model(a.model)
    except (KeyError, ValueError) as ex:
        raise UsageError("unknown model %r (choose from %s)"
                         % (a.model, ", ".join(MODEL_NAMES))) from ex
    f = _load_tt(a.file, out)
    if f is None:
        return EXIT_FAIL
    E = surface.Elaborator(a.budget, a.trace)
    results = E.run(f)
    bad = 0
    for r in results:
        if r.status == "fail":
            bad += 1
            for d in r.diagnostics:
                print(d.render(a.file), file=out)
    for name, (G, scope) in E.contexts.items():
        eqs = []
        for it in f.items:
            if isinstance(it, surface.JudgmentBlock) and \
                    (it.ctx or _last_ctx_before(f, it)) == name:
                for j in it.items:
                    if isinstance(j, surface.EqJ):
                        try:
                            tv = E.type(j.type, scope, G)
                            eqs.append((j, E.check(j.lhs, tv, scope, G),
                                        E.check(j.rhs, tv, scope, G)))
                        except surface.SurfaceError:
                            pass
        n = 0
        for F in assignments(G, M, a.cap):
            n += 1
            for j, l, r in eqs:
                try:
                    same = apply_functor(F, l) == apply_functor(F, r)
                except TargetRejects:
                    same = False
                if not same:
                    bad += 1
                    print("%s:%s: error: eq fails under %s" % (
                        a.file, j.span, describe_assignment(M, F)), file=out)
        print("context %s: %d assignments into %s, %d eq judgments" % (
            name, n, M.name, len(eqs)), file=out)
    return EXIT_FAIL if bad else EXIT_OK


def _last_ctx_before(f, blk):
    last = None
    for it in f.items:
        if it is blk:
            return last
        if isinstance(it, surface.Context):
            last = it.name
    return last


def _is_json(path):
    return os.path.splitext(path)[1].lower() == ".json"


def cmd_export_json(a, out):
    if _is_json(a.file):
        print(json.dumps(fincat_to_json(_load_fincat(a.file)), indent=2), file=out)
        return EXIT_OK
    f = _load_tt(a.file, out)
    if f is None:
        return EXIT_FAIL
    E = surface.Elaborator(a.budget, a.trace)
    res = E.run(f)
    doc = {
        "sketches": {k or "": presentation_to_json(P) for k, P in E.sketches.items()},
        "contexts": {k: presentation_to_json(G) for k, (G, _s) in E.contexts.items()},
        "judgments": [{"block": r.block, "context": r.context,
                       "kind": type(r.judgment).__name__,
                       "status": r.status, "value": r.value,
                       "span": str(r.diagnostics[0].span) if r.diagnostics else None,
                       "trace": r.trace} for r in res],
    }
    print(json.dumps(doc, indent=2), file=out)
    return _exit_for(res)


def cmd_export_dot(a, out):
    if _is_json(a.file):
        C = _load_fincat(a.file)
        M = canonicalize(C) if is_fibrant(C).ok else None
        print(to_dot(C, M), file=out)
        return EXIT_OK
    f = _load_tt(a.file, out)
    if f is None:
        return EXIT_FAIL
    E = surface.Elaborator(a.budget)
    res = E.run(f)
    for name, P in E.sketches.items():
        print('digraph "%s" {' % (name or "sketch"), file=out)
        for x in P.obj_gens:
            print('  "%s";' % x, file=out)
        for n, g in P.mor_gens.items():
            print('  "%s" -> "%s" [label="%s"];' % (show(g.args[1]),
                                                     show(g.args[2]), n), file=out)
        print("}", file=out)
    return EXIT_FAIL if any(r.status == "fail" for r in res) else EXIT_OK


def cmd_suite(a, out):
    from . import suites
    runs = {
        "strict": lambda: suites.strict_substitution(a.seed, a.n or 1000),
        "stability": lambda: suites.stability(a.seed, a.n or 1000),
        "cwf": lambda: suites.cwf_laws(a.seed, a.n or 500),
        "beta-eta": lambda: suites.beta_eta(a.seed, a.n or 400, a.budget),
        "ab": lambda: suites.ab_equivalence(a.seed, a.n or 100, a.budget),
        "roundtrip": lambda: suites.bar_roundtrip(),
    }
    names = list(runs) if a.name == "all" else [a.name]
    code = EXIT_OK
    for n in names:
        R = runs[n]()
        print(R.summary(), file=out)
        for fam, det in R.failures[:10]:
            print("  %s: %s" % (fam, det), file=out)
        if R.failures:
            code = max(code, EXIT_UNKNOWN if all(
                isinstance(d, tuple) and d and d[0] == "Unknown"
                for _f, d in R.failures) else EXIT_FAIL)
    return EXIT_FAIL if code == EXIT_FAIL else code


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                        metavar="N", help="rewrite-step budget per question")
    common.add_argument("--seed", type=int, default=0, metavar="N",
                        help="seed for randomized suites")
    common.add_argument("--trace", action="store_true",
                        help="print engine step traces")
    p = _Parser(prog="lccdtt", description="Extensional dependent type theory "
                "in strict lcc categories: checker, engine and finite models.")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    def add(name, fn, help, file_help="surface file (.tt)"):
        s = sub.add_parser(name, parents=[common], help=help)
        s.add_argument("file", metavar="FILE", help=file_help)
        s.set_defaults(fn=fn)
        return s

    add("check", cmd_check, "elaborate a file and run all judgments")
    add("eq", cmd_eq, "decide the eq judgments of a file")
    add("norm", cmd_norm, "normalize the norm judgments of one block").add_argument(
        "--target", required=True, metavar="NAME",
        help="judgment block or context name")
    add("fibrancy", cmd_fibrancy, "check fibrancy of a finite marked category",
        "finite category (.json)")
    mc = add("model-check", cmd_model_check, "check eq judgments in a finite model")
    mc.add_argument("--model", required=True, metavar="NAME",
                    help="one of " + ", ".join(MODEL_NAMES))
    mc.add_argument("--cap", type=int, default=100000, help="assignment cap")
    add("export-json", cmd_export_json, "dump contexts and verdicts as JSON",
        "surface file (.tt) or finite category (.json)")
    add("export-dot", cmd_export_dot, "Graphviz of a sketch or finite category",
        "surface file (.tt) or finite category (.json)")
    st = sub.add_parser("suite", parents=[common], help="run a property suite")
    st.add_argument("name", choices=["all", "strict", "stability", "cwf",
                                     "beta-eta", "ab", "roundtrip"])
    st.add_argument("-n", type=int, default=None, help="sample count")
    st.set_defaults(fn=cmd_suite)
    return p


def main(argv=None, out=None):
    out = out or sys.stdout
    try:
        a = build_parser().parse_args(argv)
    except SystemExit as ex:
        return ex.code if isinstance(ex.code, int) else EXIT_USAGE
    if a.budget <= 0:
        print("lccdtt: error: --budget must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        return a.fn(a, out)
    except UsageError as ex:
        print("lccdtt: error: %s" % ex, file=sys.stderr)
        return EXIT_USAGE


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
