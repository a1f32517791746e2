import pytest

from lccdtt.term_core import (ONE, Bang, Comp, Gen, Id, IllFormed, MkPb, P1,
                              P2, PbObj, PbPair, dom, cod, dumps, infer_boundary,
                              loads, mk_presentation, show, term_from_json,
                              term_to_json, DuplicateName)


@pytest.fixture
def P():
    return mk_presentation(["A", "B"], {"f": (Gen("A"), Gen("B")),
                                        "g": (Gen("A"), Gen("B"))})


def test_terms_are_interned(P):
    f = P.mor_gens["f"]
    assert Comp(Id(Gen("B")), f) is Comp(Id(Gen("B")), f)
    # f carries its boundary A -> B, so it has size 3
    assert Comp(Bang(Gen("B")), f).size == 6


def test_boundaries(P):
    f, g = P.mor_gens["f"], P.mor_gens["g"]
    assert (dom(f), cod(f)) == (Gen("A"), Gen("B"))
    pb = PbObj(f, g)
    assert cod(P1(f, g)) is Gen("A") and dom(P2(f, g)) is pb
    assert infer_boundary(PbPair(f, g, Id(Gen("A")), Id(Gen("A"))), P) == (
        Gen("A"), pb)


def test_ill_formed_composite(P):
    f = P.mor_gens["f"]
    with pytest.raises(IllFormed):
        Comp(f, f)


def test_duplicate_generator():
    with pytest.raises(DuplicateName):
        mk_presentation(["A", "A"])


def test_pb_marking_adds_commutation(P):
    f = P.mor_gens["f"]
    A = Gen("A")
    Q = mk_presentation(["A", "B"], {"f": (A, Gen("B"))},
                        markings=[MkPb(f, f, Id(A), Id(A))])
    assert (Comp(f, Id(A)), Comp(f, Id(A))) in Q.equations


def test_json_roundtrip(P):
    Q = loads(dumps(P))
    assert Q.obj_gens == P.obj_gens and Q.mor_gens == P.mor_gens
    t = Comp(P1(Bang(Gen("A")), Bang(Gen("B"))), Comp(PbPair(
        Bang(Gen("A")), Bang(Gen("B")), Id(Gen("A")), P.mor_gens["f"]), Id(Gen("A"))))
    assert term_from_json(term_to_json(t)) is t
    assert show(ONE) == "1"
