import pytest

from lccdtt.surface import (App, Check, Context, Prim, SurfaceFile, SyntaxError_,
                            Var, elaborate, parse, print_file)


def test_empty_file():
    assert parse("") == SurfaceFile([])
    assert parse("-- only a comment\n") == SurfaceFile([])


def test_context_telescope():
    f = parse("context G { x : Unit; }")
    assert isinstance(f.items[0], Context) and len(f.items[0].entries) == 1


def test_application_tree():
    f = parse("sketch { obj A; } context G { x : A; } "
              "judgment { check (fst (pair x x)) : A; }")
    j = f.items[2].items[0]
    assert isinstance(j, Check)
    assert j.term == App(Prim("fst"), App(App(Prim("pair"), Var("x")), Var("x")))


def test_syntax_error_has_span():
    with pytest.raises(SyntaxError_) as ei:
        parse("context G { x : ; }")
    assert ei.value.span.line == 1 and ei.value.span.col == 17


SRC = """
sketch S {
  obj A;
  arrow f : A -> B;
  arrow a0 : 1 -> A;
  eq f . id(A) = f;
  mark tm 1;
}
use-model chain2;
context G over S { x : A; y : A; p : Eq(x, y); }
judgment main in G {
  check tt : Unit;
  check (\\z. z) : Pi(z:A) A;
  check (\\z. refl z) : Pi(z:A) Eq(z, z);
  check (pair x (refl x)) : Sigma(u:A) Eq(u, x);
  eq ((\\z. f z : A -> B) x) (f x) : B;
  eq (snd (pair x y : A * A)) y : A;
  eq x y : A;
  norm fst (pair a0 x);
}
judgment bad in G {
  check x : Unit;
  check w : A;
  eq a0 x : A;
}
"""


def test_print_parse_roundtrip():
    f = parse(SRC)
    text = print_file(f)
    assert parse(text) == f
    assert print_file(parse(text)) == text


def test_elaboration_verdicts():
    res = elaborate(parse(SRC))
    main = [r.status for r in res if r.block == "main"]
    assert main == ["pass"] * 8
    bad = {type(r.judgment).__name__: r for r in res if r.block == "bad"}
    kinds = [r.status for r in res if r.block == "bad"]
    assert kinds == ["fail", "fail", "unknown"]
    for r in res:
        if r.status != "pass":
            assert all(d.span.line > 0 for d in r.diagnostics)
    msgs = [r.diagnostics[0].message for r in res if r.block == "bad"]
    assert msgs[0].startswith("TypeMismatch")
    assert msgs[1].startswith("ScopeError")
    assert msgs[2].startswith("EngineUnknown")
    assert bad


def test_beta_trace():
    f = parse("sketch { obj A; } context G { a : A; } "
              "judgment { eq (fst (pair a a)) a : A; }")
    r = elaborate(f, trace=True)[0]
    assert r.status == "pass" and r.trace
