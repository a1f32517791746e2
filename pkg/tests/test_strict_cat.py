from lccdtt.rewrite_eq import decide_equal
from lccdtt.strict_cat import transpose, triangle_identities, SliceMor
from lccdtt.term_core import ONE, Gen, Id, mk_presentation

A, B = Gen("A"), Gen("B")


def sketch():
    return mk_presentation(["A", "B", "X", "Y"],
                           {"s": (A, B), "x": (Gen("X"), A), "y": (Gen("Y"), B)})


def test_triangle_identities_engine_equal():
    P = sketch()
    s, x, y = (P.mor_gens[n] for n in "sxy")
    tri = triangle_identities(s, x, y, P)
    assert len(tri) == 4
    for name, l, r in tri:
        assert decide_equal(l, r, P).kind == "Equal", name


def test_triangle_identities_on_identities():
    P = sketch()
    s = P.mor_gens["s"]
    for name, l, r in triangle_identities(s, Id(A), Id(B), P):
        assert decide_equal(l, r, P).kind == "Equal", name
