import pytest

from lccdtt import cwf
from lccdtt.rewrite_eq import decide_equal
from lccdtt.term_core import ONE, Gen, Id, apply_functor, cod, mk_presentation

A = Gen("A")


@pytest.fixture
def S():
    return mk_presentation(["A"], {"a": (ONE, A)})


def test_extend_and_weakening(S):
    G, p, v = cwf.extend(S, A, "x")
    assert cwf.parent_of(G) is S and cwf.var_of(G) is v
    assert cod(v) is A and cwf.context_depth(G) == 1
    assert apply_functor(p, S.mor_gens["a"]) is S.mor_gens["a"]


def test_cwf_laws(S):
    G, p, v = cwf.extend(S, A, "x")
    a = S.mor_gens["a"]
    f = cwf.identity_subst(S)
    fs = cwf.mk_subst(G, f, a)
    assert cwf.subst_eq(cwf.compose_subst(fs, p), f)
    assert apply_functor(fs, v) is a
    assert cwf.subst_eq(cwf.mk_subst(G, p, v), cwf.identity_subst(G))


def test_mk_subst_rejects_wrong_type(S):
    G, _p, _v = cwf.extend(S, A, "x")
    with pytest.raises(cwf.TypeMismatch):
        cwf.mk_subst(G, cwf.identity_subst(S), cwf.unit_tm())


def test_products_and_unit(S):
    a = S.mor_gens["a"]
    u = cwf.prod_pair(a, cwf.unit_tm())
    assert cod(u) is cwf.prod_ty(A, ONE)
    assert decide_equal(cwf.prod_fst(u), a, S).kind == "Equal"


def test_pi_beta_eta(S):
    G, _p, v = cwf.extend(S, A, "x")
    lam = cwf.pi_lam(G, A, v)
    assert cod(lam) is cwf.pi_ty(G, A)
    assert decide_equal(cwf.pi_app(G, A, lam), v, G).kind == "Equal"


def test_sigma_projections(S):
    G, _p, v = cwf.extend(S, A, "x")
    a = S.mor_gens["a"]
    pr = cwf.sigma_pair(G, A, a, a)
    assert decide_equal(cwf.sigma_pr1(G, A, pr), a, S).kind == "Equal"
    assert decide_equal(cwf.sigma_pr2(G, A, pr), a, S).kind == "Equal"


def test_reflection(S):
    G, _p, x = cwf.extend(S, A, "x")
    H, _q, e = cwf.extend(G, cwf.eq_ty(x, S.mor_gens["a"]), "e")
    assert decide_equal(x, S.mor_gens["a"], G).kind == "Unknown"
    cwf.reflect(H, e)
    assert decide_equal(x, S.mor_gens["a"], H).kind == "Equal"
    with pytest.raises(cwf.TypeMismatch):
        cwf.reflect(H, x)


def test_bar_roundtrip():
    base = mk_presentation(["A"])
    C = cwf.context_as_model(base)
    Gt = C.object_to_context(A)
    v = cwf.var_of(Gt)
    s = cwf.bar_term(Gt, v)
    assert decide_equal(s, Id(A), base).kind == "Equal"
    assert decide_equal(cwf.unbar_term(Gt, s), v, Gt).kind == "Equal"
