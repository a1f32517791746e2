"""Seeded property suites over random contexts, types and substitutions.

Each suite returns a ``SuiteResult``: verdict counts per family, the
failing instances, and the equal pairs it produced (for the finite-model
soundness check).  The acceptance tests and ``lccdtt suite`` both call
these.
"""
import time
from collections import Counter

from . import cwf
from .fin_lcc import assignments, builtin_models
from .rewrite_eq import Engine, decide_equal
from .sampling import (enumerate_terms, pool_for, random_context,
                       random_subst, random_type, rng_for, term_of,
                       random_morphism)
from .strict_cat import triangle_identities
from .term_core import (ONE, Bang, Comp, Id, TargetRejects, apply_functor,
                        cod, dom, infer_boundary, mk_presentation, show)


class SuiteResult:
    def __init__(self, name):
        self.name = name
        self.counts = {}
        self.failures = []
        self.pairs = []
        self.steps = []
        self.small_unknown = 0
        self.elapsed = 0.0

    def note(self, family, verdict):
        self.counts.setdefault(family, Counter())[verdict] += 1

    def fail(self, family, detail):
        self.failures.append((family, detail))

    def total(self, verdict):
        return sum(c[verdict] for c in self.counts.values())

    def summary(self):
        fams = ", ".join("%s %s" % (f, dict(c)) for f, c in sorted(self.counts.items()))
        return "%s: %s; %d failures; %.1fs" % (self.name, fams, len(self.failures),
                                              self.elapsed)


def _timed(fn):
    def run(*a, **k):
        t0 = time.time()
        r = fn(*a, **k)
        r.elapsed = time.time() - t0
        return r
    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


# -- 1. strict substitution ----------------------------------------------------

@_timed
def strict_substitution(seed=0, n=1000):
    """sigma[f][g] is sigma[g.f] and t[f][g] is t[g.f], syntactically."""
    rng = rng_for(seed)
    R = SuiteResult("strict-substitution")
    ap = apply_functor
    for _ in range(n):
        D = random_context(rng)
        sig = random_type(D, rng, 25)
        f, G = random_subst(D, rng, 3)
        g, H = random_subst(G, rng, 3)
        t = term_of(D, sig, rng) or random_morphism(D, rng)
        gf = cwf.compose_subst(g, f)
        for fam, x in (("type", sig), ("term", t)):
            a, b = ap(g, ap(f, x)), ap(gf, x)
            R.note(fam, "Equal" if a is b else "Distinct")
            if a is not b:
                R.fail(fam, (show(x), show(a), show(b)))
            R.pairs.append((H, a, b))
    return R


# -- 2. stability of the type formers ----------------------------------------

@_timed
def stability(seed=0, n=1000):
    """X[f] rebuilt after substitution, for 1, x, Eq, Sigma and Pi (the last
    two through f+)."""
    rng = rng_for(seed)
    R = SuiteResult("stability")
    ap = apply_functor

    def check(fam, l, r, H):
        R.note(fam, "Equal" if l is r else "Distinct")
        if l is not r:
            R.fail(fam, (show(l), show(r)))
        R.pairs.append((H, l, r))

    for _ in range(n):
        D = random_context(rng)
        f, G = random_subst(D, rng, 3)
        s1, s2 = random_type(D, rng, 10, 1), random_type(D, rng, 10, 1)
        check("unit", ap(f, cwf.unit_ty()), cwf.unit_ty(), G)
        check("prod", ap(f, cwf.prod_ty(s1, s2)),
              cwf.prod_ty(ap(f, s1), ap(f, s2)), G)
        a = term_of(D, s1, rng)
        if a is not None:
            b = term_of(D, s1, rng) or a
            check("eq", ap(f, cwf.eq_ty(a, b)), cwf.eq_ty(ap(f, a), ap(f, b)), G)
        Ds = cwf.extend(D, s1)[0]
        tau = random_type(Ds, rng, 10, 1)
        fp, Gs = cwf.lift_subst(f, Ds)
        check("sigma", cwf.nf_ty(ap(f, cwf.sigma_ty(Ds, tau)), G),
              cwf.sigma_ty(Gs, ap(fp, tau)), G)
        check("pi", cwf.nf_ty(ap(f, cwf.pi_ty(Ds, tau)), G),
              cwf.pi_ty(Gs, ap(fp, tau)), G)
    return R


# -- 3. cwf laws -------------------------------------------------------------

@_timed
def cwf_laws(seed=0, n=500):
    """<f,s>.p = f, v[<f,s>] = s and <p,v> = id, syntactically."""
    rng = rng_for(seed)
    R = SuiteResult("cwf-laws")
    done = 0
    while done < n:
        D = random_context(rng, depth=rng.randint(0, 3))
        sig = random_type(D, rng, 12, 1)
        Ds, p, v = cwf.extend(D, sig)
        f, T = random_subst(D, rng, 3)
        s = term_of(T, apply_functor(f, Ds.origin.sigma), rng)
        if s is None:
            continue
        done += 1
        fs = cwf.mk_subst(Ds, f, s)
        ok1 = cwf.subst_eq(cwf.compose_subst(fs, p), f)
        vs = apply_functor(fs, v)
        ok2 = vs is s
        ok3 = cwf.subst_eq(cwf.mk_subst(Ds, p, v), cwf.identity_subst(Ds))
        for fam, ok, det in (("<f,s>.p=f", ok1, f.name),
                             ("v[<f,s>]=s", ok2, (show(vs), show(s))),
                             ("<p,v>=id", ok3, show(sig))):
            R.note(fam, "Equal" if ok else "Distinct")
            if not ok:
                R.fail(fam, det)
        R.pairs.append((T, vs, s))
    return R


# -- 4. beta / eta -----------------------------------------------------------

def _decide(R, fam, l, r, P, budget, trace):
    size = max(l.size, r.size)
    v = decide_equal(l, r, P, budget=budget, models=[], trace=trace)
    R.note(fam, v.kind)
    if v.kind == "Equal":
        R.pairs.append((P, l, r))
        if trace:
            R.steps.extend((P, s.before, s.after, s.rule) for s in v.trace)
    else:
        if v.kind == "Unknown" and size <= 30:
            R.small_unknown += 1
        R.fail(fam, (v.kind, size, show(l)[:200], show(r)[:200]))
    return v


@_timed
def beta_eta(seed=0, n=400, budget=10000, trace=False):
    """app.lam, lam.app, Sigma pairing both ways, terminal collapse and
    equality reflection, each decided by the engine."""
    rng = rng_for(seed)
    R = SuiteResult("beta-eta")
    ap = apply_functor
    for _ in range(n):
        D = random_context(rng, depth=rng.randint(0, 2))
        sig = random_type(D, rng, 10, 1)
        Gs = cwf.extend(D, sig)[0]
        P = pool_for(Gs, rng)
        t = P.any_mor(d=ONE)
        tau = cod(t)
        # Pi: app . lam and lam . app
        lam = cwf.pi_lam(Gs, tau, t)
        _decide(R, "app.lam", cwf.pi_app(Gs, tau, lam), t, Gs, budget, trace)
        W, p, u = cwf.extend(D, cwf.pi_ty(Gs, tau))
        pp, Ws = cwf.lift_subst(p, Gs)
        tau2 = ap(pp, tau)
        _decide(R, "lam.app", cwf.pi_lam(Ws, tau2, cwf.pi_app(Ws, tau2, u)),
                u, W, budget, trace)
        # Sigma: projections of a pair, and the pair of projections
        s = term_of(D, Gs.origin.sigma, rng)
        if s is not None:
            sec = cwf.mk_subst(Gs, cwf.identity_subst(D), s)
            ts = ap(sec, t)
            pr = cwf.sigma_pair(Gs, tau, s, ts)
            _decide(R, "pr1.pair", cwf.sigma_pr1(Gs, tau, pr), s, D, budget, trace)
            _decide(R, "pr2.pair", cwf.sigma_pr2(Gs, tau, pr), ts, D, budget, trace)
        W, p, u = cwf.extend(D, cwf.sigma_ty(Gs, tau))
        pp, Ws = cwf.lift_subst(p, Gs)
        tau2 = ap(pp, tau)
        u2 = cwf.sigma_pair(Ws, tau2, cwf.sigma_pr1(Ws, tau2, u),
                            cwf.sigma_pr2(Ws, tau2, u))
        _decide(R, "pair.pr", u2, u, W, budget, trace)
        # terminal collapse: any map into 1 is the canonical one
        DP = pool_for(D, rng)
        h = DP.any_mor()
        k = DP.any_mor(c=ONE, d=cod(h)) or Bang(cod(h))
        _decide(R, "terminal", Comp(k, h), Bang(dom(h)), D, budget, trace)
        # equality reflection
        X = rng.choice(DP.objs)
        a, b = term_of(D, X, rng), term_of(D, X, rng)
        if a is not None and b is not None:
            W, p, e = cwf.extend(D, cwf.eq_ty(a, b))
            cwf.reflect(W, e)
            _decide(R, "reflection", ap(p, a), ap(p, b), W, budget, trace)
    return R


# -- 7. a/b equivalence and adjunctions --------------------------------------

def _fin_identity(R, fam, pairs, P, models, cap):
    """Every assignment into the finite models sends each composite to the
    identity it should be."""
    for M in models:
        for F in assignments(P, M, cap):
            for l, r in pairs:
                try:
                    a, b = apply_functor(F, l), apply_functor(F, r)
                except TargetRejects as ex:
                    R.fail(fam, ("model rejects", M.name, str(ex)))
                    return
                if a != b:
                    R.fail(fam, ("model", M.name, a, b))
                    return
    R.note(fam, "Equal")


@_timed
def ab_equivalence(seed=0, n=100, budget=10000, cap=100000):
    """b.a and a.b against identities through their isos, and the triangle
    identities of Sigma -| s* -| Pi, in the engine and in finite models."""
    rng = rng_for(seed)
    R = SuiteResult("ab-equivalence")
    models = builtin_models()

    def dec(fam, l, r, P):
        v = decide_equal(l, r, P, budget=budget, models=[])
        R.note(fam, v.kind)
        if v.kind != "Equal":
            R.fail(fam, (v.kind, show(l)[:200]))
        else:
            R.pairs.append((P, l, r))

    for _ in range(n):
        D = random_context(rng, depth=rng.randint(0, 2))
        Gs = cwf.extend(D, random_type(D, rng, 10, 1))[0]
        sig = Gs.origin.sigma
        tau = random_type(Gs, rng, 12, 1)
        th, j = cwf.ba_iso(Gs)(tau)
        ba = [(Comp(j, th), Id(tau)), (Comp(th, j), Id(dom(j)))]
        dec("b(a(tau))", *ba[0], Gs)
        dec("b(a(tau))", *ba[1], Gs)
        _fin_identity(R, "fin b(a(tau))", ba, Gs, models, cap)
        P = pool_for(D, rng)
        x = rng.choice(P.mors(c=sig) + [Id(sig)])
        i1, i2 = cwf.ab_iso(Gs)(x)
        ab = [(Comp(i2.h, i1.h), Id(dom(x))), (Comp(i1.h, i2.h), Id(dom(i2.h)))]
        dec("a(b(x))", *ab[0], D)
        dec("a(b(x))", *ab[1], D)
        _fin_identity(R, "fin a(b(x))", ab, D, models, cap)
        s = P.any_mor()
        xs = P.any_mor(c=dom(s)) or Id(dom(s))
        ys = P.any_mor(c=cod(s)) or Id(cod(s))
        tri = triangle_identities(s, xs, ys, D)
        for _name, l, r in tri:
            dec("triangle", l, r, D)
        _fin_identity(R, "fin triangle", [(l, r) for _n, l, r in tri], D,
                      models, cap)
    return R


# -- 8. bar/unbar round trip -------------------------------------------------

@_timed
def bar_roundtrip(max_size=10, budget=10000):
    """On the free context over one object A: for every morphism term s of
    size <= max_size, bar(unbar(s)) = s in the base and unbar(bar(t)) = t
    in the extension."""
    S = mk_presentation(["A"], {})
    C = cwf.context_as_model(S)
    R = SuiteResult("bar-roundtrip")
    _objs, mors = enumerate_terms(S, max_size)
    for s in mors:
        tau, _sig = infer_boundary(s, S)
        Gt = C.object_to_context(tau)
        t = cwf.unbar_term(Gt, s)
        b = cwf.bar_term(Gt, t)
        for fam, l, r, P in (("bar.unbar", b, s, S),
                             ("unbar.bar", cwf.unbar_term(Gt, b), t, Gt)):
            v = "Equal" if l is r else decide_equal(l, r, P, budget=budget,
                                                    models=[]).kind
            R.note(fam, v)
            if v != "Equal":
                R.fail(fam, (v, show(s)))
    R.count = len(mors)
    return R


# -- 5. soundness in finite models -------------------------------------------

def soundness(pairs, models=None, cap=100000):
    """Evaluate every (P, l, r) under every admissible assignment of P into
    the models; returns (checked, skipped_identical, failures).

    Identical l and r evaluate identically, so those are counted but not
    evaluated."""
    models = models if models is not None else builtin_models()
    by_ctx = {}
    skipped = 0
    for P, l, r in pairs:
        if l is r:
            skipped += 1
            continue
        by_ctx.setdefault(id(P), (P, set()))[1].add((l, r))
    checked, failures = 0, []
    for P, prs in by_ctx.values():
        for M in models:
            for F in assignments(P, M, cap):
                for l, r in prs:
                    checked += 1
                    try:
                        a = apply_functor(F, l)
                    except TargetRejects as ex:
                        a = ("rejects", str(ex))
                    try:
                        b = apply_functor(F, r)
                    except TargetRejects as ex:
                        b = ("rejects", str(ex))
                    if a != b:
                        failures.append((M.name, show(l)[:200], show(r)[:200], a, b))
    return checked, skipped, failures


def rule_instances(seed=0, n=100, budget=10000):
    """Traced beta/eta run: every rewrite step it takes, as (P, before,
    after) triples, plus its equal pairs."""
    R = beta_eta(seed, n, budget, trace=True)
    steps = [(P, b, a) for P, b, a, _rule in R.steps
             if b is not None and a is not None]
    return R, steps


__all__ = ["SuiteResult", "strict_substitution", "stability", "cwf_laws",
           "beta_eta", "ab_equivalence", "bar_roundtrip", "soundness",
           "rule_instances", "Engine"]
