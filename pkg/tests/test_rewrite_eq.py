from lccdtt.rewrite_eq import decide_equal, normalize, register_fact
from lccdtt.term_core import (ONE, Bang, Comp, Gen, Id, MGen, P1, P2, PbPair,
                              mk_presentation)

A, B = Gen("A"), Gen("B")


def sketch():
    return mk_presentation(["A", "B"], {"f": (A, B), "g": (A, B),
                                        "a": (ONE, A)})


def test_identity_laws():
    P = sketch()
    f = P.mor_gens["f"]
    assert normalize(Comp(Id(B), Comp(f, Id(A))), P) is f


def test_pair_projections():
    P = sketch()
    f, g = P.mor_gens["f"], P.mor_gens["g"]
    u = PbPair(Bang(B), Bang(B), f, g)
    assert decide_equal(Comp(P1(Bang(B), Bang(B)), u), f, P).kind == "Equal"
    assert decide_equal(Comp(P2(Bang(B), Bang(B)), u), g, P).kind == "Equal"


def test_terminal_collapse():
    P = sketch()
    f = P.mor_gens["f"]
    assert decide_equal(Comp(Bang(B), f), Bang(A), P).kind == "Equal"


def test_distinct_generators_are_unknown():
    P = sketch()
    f, g = P.mor_gens["f"], P.mor_gens["g"]
    assert decide_equal(f, g, P).kind == "Unknown"


def test_sketch_equation_and_reflection():
    f = MGen("f", A, B)
    g = MGen("g", A, B)
    P = mk_presentation(["A", "B"], {"f": f, "g": g}, equations=[(f, g)])
    assert decide_equal(f, g, P).kind == "Equal"
    Q = sketch()
    a = Q.mor_gens["a"]
    fa, ga = Comp(Q.mor_gens["f"], a), Comp(Q.mor_gens["g"], a)
    assert decide_equal(fa, ga, Q).kind == "Unknown"
    register_fact(Q, (fa, ga))
    assert decide_equal(fa, ga, Q).kind == "Equal"


def test_trace_and_budget():
    P = sketch()
    f, g = P.mor_gens["f"], P.mor_gens["g"]
    t = Comp(P1(Bang(B), Bang(B)), PbPair(Bang(B), Bang(B), f, g))
    v = decide_equal(t, f, P, trace=True)
    assert v.kind == "Equal" and v.trace
    assert decide_equal(t, f, P, budget=1).kind in ("Equal", "Unknown")
