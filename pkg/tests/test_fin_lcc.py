from lccdtt.fin_lcc import (FinCat, assignments, builtin_model, canonicalize,
                            countermodel_search, fincat_from_json,
                            fincat_to_json, is_fibrant, to_dot)
from lccdtt.term_core import ONE, Comp, Gen, mk_presentation

import oracles


def test_chain2_fibrant_and_canonical():
    C = oracles.chain2()
    assert is_fibrant(C).ok
    M = canonicalize(C)
    assert M.n == 2 and M.verify()


def test_documented_negative_examples():
    assert not is_fibrant(oracles.chain2(tm=False)).ok
    rep = is_fibrant(oracles.noncommuting_pb())
    assert not rep.ok
    assert any("does not commute" in v for v in rep.violations)


def test_builtin_models_verify():
    for n in ("chain2", "chain3", "diamond", "cube"):
        assert builtin_model(n).verify()


def test_json_roundtrip():
    C = oracles.walking_iso()
    D = fincat_from_json(fincat_to_json(C))
    assert set(D.arrows) == set(C.arrows) and set(D.pb) == set(C.pb)
    assert is_fibrant(D).ok == is_fibrant(C).ok


def test_assignments_respect_arrows():
    P = mk_presentation(["A", "B"], {"f": (Gen("A"), Gen("B"))})
    M = builtin_model("chain2")
    got = [tuple(sorted(F.obj_map.items())) for F in assignments(P, M)]
    # A <= B in the two-element chain: three of the four object choices
    assert len(got) == 3


def test_poset_models_do_not_separate_parallel_terms():
    P = mk_presentation(["A"], {"a": (ONE, Gen("A")), "b": (ONE, Gen("A"))})
    a, b = P.mor_gens["a"], P.mor_gens["b"]
    assert countermodel_search(a, b, P, [builtin_model("diamond")]) is None


def test_dot():
    s = to_dot(oracles.chain2(), canonicalize(oracles.chain2()))
    assert s.startswith("digraph") and "doublecircle" in s
