"""The covariant cwf on contexts presented by generators.

A context is a Presentation whose origin chain is rooted in a free sketch
(or the empty presentation) and grows by Extension links, each adding one
variable v : 1 -> sigma.  Types are objects, terms are maps out of One and
substitutions are strict functors between contexts, acting syntactically.
"""
from .term_core import (ONE, Bang, Comp, Curry, Eval, Extension, Functor, Id,
                        MGen, P1, P2, PbObj, PbPair, PiMap, PiObj, TermError,
                        Term, apply_functor, boundary, comp, compose_functors,
                        cod, dom, infer_boundary, infer_obj, mk_presentation,
                        show)
from .rewrite_eq import (BudgetExceeded, DEFAULT_BUDGET, decide_equal,
                         engine_for, register_fact)
from .strict_cat import (IsoFamily, SliceMor, SliceView, strictify,
                         weakening)


class TypeMismatch(TermError):
    pass


class ReflRequiresEqual(TermError):
    pass


# -- contexts ----------------------------------------------------------------

def empty_context():
    return mk_presentation()


def context_depth(G):
    n = 0
    while G.origin.kind == "extension":
        n += 1
        G = G.origin.parent
    return n


def context_vars(G):
    """Variables of G, outermost first."""
    out = []
    while G.origin.kind == "extension":
        out.append(G.origin.var)
        G = G.origin.parent
    return out[::-1]


def root_context(G):
    while G.origin.kind == "extension":
        G = G.origin.parent
    return G


def nf_ty(x, G, budget=DEFAULT_BUDGET):
    return engine_for(G, budget).normalize(x)


def same_ty(x, y, G, budget=DEFAULT_BUDGET):
    """Types are equal when their normal forms coincide."""
    if x is y:
        return True
    try:
        return nf_ty(x, G, budget) is nf_ty(y, G, budget)
    except BudgetExceeded:
        return False


def extend(G, sigma, name=None):
    """(G.sigma, p, v): one new generator v : One -> sigma.

    sigma is stored in normal form, so that normalized terms over the
    extension stay boundary-correct around v.
    """
    infer_obj(sigma, G)
    sigma = nf_ty(sigma, G)
    name = name or "x%d" % context_depth(G)
    v = MGen(name, ONE, sigma)
    gens = dict(G.mor_gens)
    gens[name] = v
    Gs = mk_presentation(G.obj_gens, gens, (), G.markings,
                         origin=Extension(G, sigma, v))
    Gs.equations = G.equations
    Gs.facts = list(G.facts)
    return Gs, weakening_subst(Gs), v


def var_of(Gs):
    return Gs.origin.var


def parent_of(Gs):
    if Gs.origin.kind != "extension":
        raise TypeMismatch("context is not an extension")
    return Gs.origin.parent


# -- substitutions -----------------------------------------------------------

def identity_subst(G):
    return Functor(G, G, {n: Term("Gen", n) for n in G.obj_gens},
                   dict(G.mor_gens), name="id")


def weakening_subst(Gs):
    """p : G -> G.sigma, the generator inclusion."""
    G = parent_of(Gs)
    return Functor(G, Gs, {n: Term("Gen", n) for n in G.obj_gens},
                   dict(G.mor_gens), name="p")


def empty_subst(G):
    """The unique substitution out of the empty context."""
    return Functor(empty_context(), G, {}, {}, name="!")


def compose_subst(g, f):
    """g after f (covariant: first f, then g)."""
    if f.target is not g.source and f.target.mor_gens != g.source.mor_gens:
        raise TypeMismatch("substitutions do not compose")
    return compose_functors(g, f)


def mk_subst(Gs, f, s):
    """<f, s> : G.sigma -> D for f : G -> D and s : One -> f(sigma)."""
    G = parent_of(Gs)
    if f.source is not G and f.source.mor_gens != G.mor_gens:
        raise TypeMismatch("substitution does not start at the parent context")
    want = apply_functor(f, Gs.origin.sigma)
    d, c = infer_boundary(s, f.target)
    if d is not ONE or not same_ty(c, want, f.target):
        raise TypeMismatch("term %s does not have type %s" % (show(s), show(want)))
    mm = dict(f.mor_map)
    mm[var_of(Gs).args[0]] = s if c is want else _nf(f.target, s)
    return Functor(Gs, f.target, f.obj_map, mm, name="<%s,s>" % (f.name or "f"))


def lift_subst(f, Gs):
    """f+ : G.sigma -> D.f(sigma), returned with the new context."""
    D = f.target
    Ds, p, v = extend(D, apply_functor(f, Gs.origin.sigma))
    return mk_subst(Gs, compose_subst(p, f), v), Ds


def subst_eq(f, g):
    """Syntactic equality of substitutions on generators."""
    if f.source.mor_gens != g.source.mor_gens:
        return False
    return all(apply_functor(f, t) is apply_functor(g, t)
               for t in list(f.source.mor_gens.values()) +
               [Term("Gen", n) for n in f.source.obj_gens])


def ty_subst(x, f):
    return apply_functor(f, x)


def tm_subst(t, f):
    return apply_functor(f, t)


def check_tm(t, ty, G):
    d, c = infer_boundary(t, G)
    if d is not ONE:
        raise TypeMismatch("term %s is not a map out of One" % show(t))
    if not same_ty(c, ty, G):
        raise TypeMismatch("%s : %s, expected %s" % (show(t), show(c), show(ty)))
    return t


def type_of(t, G):
    d, c = infer_boundary(t, G)
    if d is not ONE:
        raise TypeMismatch("term %s is not a map out of One" % show(t))
    return c


# -- unit, products, equality ------------------------------------------------

def unit_ty():
    return ONE


def unit_tm():
    return Id(ONE)


def prod_ty(s, t):
    return PbObj(Bang(s), Bang(t))


def prod_pair(a, b):
    return PbPair(Bang(cod(a)), Bang(cod(b)), a, b)


def prod_fst(u):
    f1, f2 = cod(u).args
    return Comp(P1(f1, f2), u)


def prod_snd(u):
    f1, f2 = cod(u).args
    return Comp(P2(f1, f2), u)


def eq_ty(s, t):
    if boundary(s) != boundary(t):
        raise TypeMismatch("Eq of terms of different types")
    return PbObj(s, t)


def refl(G, s, t=None, budget=DEFAULT_BUDGET):
    t = s if t is None else t
    if s is not t:
        r = decide_equal(s, t, G, budget, models=[])
        if r.kind != "Equal":
            raise ReflRequiresEqual("%s = %s is %s" % (show(s), show(t), r.kind))
    return PbPair(s, t, Id(ONE), Id(ONE))


def reflect(G, u):
    """Equality reflection: an inhabitant of Eq s t makes s = t hold in G."""
    E = cod(u)
    if dom(u) is not ONE or E.tag != "PbObj" or dom(E.args[0]) is not ONE:
        raise TypeMismatch("not an inhabitant of an equality type")
    s, t = E.args
    register_fact(G, (s, t))
    return G


# -- comparison with the slice -----------------------------------------------

def a_compare(Gs):
    """a : G.sigma -> G/sigma, strictified weakening with v sent to the
    zeta-corrected diagonal."""
    a = Gs.cache.get("a")
    if a is not None:
        return a
    G, sigma, v = parent_of(Gs), Gs.origin.sigma, var_of(Gs)
    W = weakening(G, sigma)
    fs, zeta = strictify(W, G)
    V = fs.target
    d = W.diagonal()
    a = Functor(Gs, V, fs.obj_map, fs.mor_map, name="a")
    a.mor_map[v.args[0]] = V.compose(zeta.inverse(sigma), d)
    a.hook = fs.hook
    a.zeta = zeta
    a.weak = W
    Gs.cache["a"] = a
    return a


def zeta_of(Gs):
    return a_compare(Gs).zeta


class BCompare:
    """b : G/sigma -> G.sigma, pullback along the variable."""

    def __init__(self, Gs):
        self.Gs = Gs
        self.v = var_of(Gs)

    def obj(self, x):
        return PbObj(self.v, x)

    def mor(self, k):
        v = self.v
        return PbPair(v, k.tgt, P1(v, k.src), Comp(k.h, P2(v, k.src)))


def b_compare(Gs):
    return BCompare(Gs)


def _a(Gs, t):
    return apply_functor(a_compare(Gs), t)


def ba_iso(Gs):
    """theta_tau : tau -> b(a(tau)) and its inverse j_tau, natural in tau."""
    fam = Gs.cache.get("ba")
    if fam is None:
        v = var_of(Gs)

        def comp_(tau):
            k, j = _kj(Gs, tau, {})
            at = _a(Gs, tau)
            return PbPair(v, at, Bang(tau), k), j
        fam = IsoFamily(comp_, name="theta")
        Gs.cache["ba"] = fam
    return fam


def _kj(Gs, tau, memo):
    """k_tau : tau -> dom a(tau) over v, and j_tau : b(a(tau)) -> tau."""
    r = memo.get(tau)
    if r is not None:
        return r
    v = var_of(Gs)
    sigma = Gs.origin.sigma
    at = _a(Gs, tau)
    P = PbObj(v, at)
    tag = tau.tag
    if tag == "One":
        r = (v, Bang(P))
    elif tag == "Gen":
        bs, bx = Bang(sigma), Bang(tau)
        r = (PbPair(bs, bx, Comp(v, bx), Id(tau)),
             comp(P2(bs, bx), P2(v, at)))
    elif tag == "PbObj":
        f1, f2 = tau.args
        h1, h2 = _a(Gs, f1).h, _a(Gs, f2).h
        k1, j1 = _kj(Gs, dom(f1), memo)
        k2, j2 = _kj(Gs, dom(f2), memo)
        a1, a2 = _a(Gs, dom(f1)), _a(Gs, dom(f2))
        k = PbPair(h1, h2, Comp(k1, P1(f1, f2)), Comp(k2, P2(f1, f2)))
        p1v, p2v = P1(v, at), P2(v, at)
        j = PbPair(f1, f2,
                   Comp(j1, PbPair(v, a1, p1v, comp(P1(h1, h2), p2v))),
                   Comp(j2, PbPair(v, a2, p1v, comp(P2(h1, h2), p2v))))
        r = (k, j)
    elif tag == "PiObj":
        f1, g = tau.args
        A, C = boundary(f1)
        B = dom(g)
        h1, hg = _a(Gs, f1).h, _a(Gs, g).h
        kA, jA = _kj(Gs, A, memo)
        kB, jB = _kj(Gs, B, memo)
        kC, jC = _kj(Gs, C, memo)
        aA, aB, aC = _a(Gs, A), _a(Gs, B), _a(Gs, C)
        pm, pmh = PiMap(f1, g), PiMap(h1, hg)
        # k: tau -> PiObj(h1, hg)
        f2k = Comp(kC, pm)
        Dk = PbObj(h1, f2k)
        x_a = Comp(jA, PbPair(v, aA, Bang(Dk), P1(h1, f2k)))
        ek = comp(kB, Eval(f1, g), PbPair(f1, pm, x_a, P2(h1, f2k)))
        k = Curry(h1, hg, f2k, ek)
        # j: b(a(tau)) -> tau
        p1v, p2v = P1(v, at), P2(v, at)
        f2j = Comp(jC, PbPair(v, aC, p1v, Comp(pmh, p2v)))
        Dj = PbObj(f1, f2j)
        inner = comp(Eval(h1, hg),
                     PbPair(h1, pmh, Comp(kA, P1(f1, f2j)), comp(p2v, P2(f1, f2j))))
        ej = Comp(jB, PbPair(v, aB, Bang(Dj), inner))
        j = Curry(f1, g, f2j, ej)
        r = (k, j)
    else:
        raise TypeMismatch("not a type of the extended context: %s" % show(tau))
    memo[tau] = r
    return r


def ab_iso(Gs):
    """iota_x : x -> a(b(x)) on slice objects over sigma, with inverse."""
    fam = Gs.cache.get("ab")
    if fam is None:
        G, sigma = parent_of(Gs), Gs.origin.sigma
        a = a_compare(Gs)
        av = _a(Gs, var_of(Gs)).h

        def comp_(x):
            if cod(x) is not sigma:
                raise TypeMismatch("not an object over %s: %s" % (show(sigma), show(x)))
            X = dom(x)
            ax = _a(Gs, x).h
            U, W = a.zeta.forward(X).h, a.zeta.inverse(X).h
            bs, bx = Bang(sigma), Bang(X)
            tgt = Comp(Id(sigma), P1(av, ax))
            fwd = SliceMor(PbPair(av, ax, x, Comp(W, PbPair(bs, bx, x, Id(X)))),
                           x, tgt)
            inv = SliceMor(comp(P2(bs, bx), U, P2(av, ax)), tgt, x)
            return fwd, inv
        fam = IsoFamily(comp_, name="iota")
        Gs.cache["ab"] = fam
    return fam


# -- Sigma and Pi types ------------------------------------------------------

def _nf(G, t, budget=DEFAULT_BUDGET):
    return engine_for(G, budget).normalize(t)


def _ncomp(G, *parts):
    """Normal form of a composite whose parts agree only up to normal form."""
    return _nf(G, comp(*[_nf(G, x) for x in parts]))


def display(Gs, tau):
    """a(tau): the display map over sigma representing tau, normalized."""
    infer_obj(tau, Gs)
    return _nf(parent_of(Gs), _a(Gs, tau))


def sigma_ty(Gs, tau, budget=DEFAULT_BUDGET):
    return dom(display(Gs, tau))


def pi_ty(Gs, tau, budget=DEFAULT_BUDGET):
    sigma = Gs.origin.sigma
    G = parent_of(Gs)
    return nf_ty(PiObj(_nf(G, Bang(sigma)), display(Gs, tau)), G, budget)


def _section(Gs, s):
    """<id, s> : G.sigma -> G."""
    G = parent_of(Gs)
    return mk_subst(Gs, identity_subst(G), s)


def sigma_pair(Gs, tau, s, t):
    """(s, t) : Sigma_sigma tau for s : sigma and t : tau[<id, s>]."""
    G = parent_of(Gs)
    k, _ = _kj(Gs, tau, {})
    k = _nf(G, tm_subst(k, _section(Gs, s)))
    return _ncomp(G, k, t)


def sigma_pr1(Gs, tau, u):
    G = parent_of(Gs)
    return _ncomp(G, display(Gs, tau), u)


def sigma_pr2(Gs, tau, u):
    G = parent_of(Gs)
    at = display(Gs, tau)
    u = _nf(G, u)
    s = sigma_pr1(Gs, tau, u)
    _, j = _kj(Gs, tau, {})
    j = _nf(G, tm_subst(j, _section(Gs, s)))
    return _ncomp(G, j, PbPair(s, at, Id(ONE), u))


def pi_lam(Gs, tau, t):
    """lambda-abstraction of t : Tm(G.sigma, tau)."""
    G = parent_of(Gs)
    sigma = Gs.origin.sigma
    at = display(Gs, tau)
    h = _nf(G, _a(Gs, t).h)
    bs = _nf(G, Bang(sigma))
    return _nf(G, Curry(bs, at, Id(ONE), Comp(h, P1(bs, Id(ONE)))))


def pi_app(Gs, tau, u):
    """Application of u : Tm(G, Pi_sigma tau) to the variable."""
    G = parent_of(Gs)
    sigma = Gs.origin.sigma
    v = var_of(Gs)
    at = display(Gs, tau)
    bs = _nf(G, Bang(sigma))
    u = _nf(G, u)
    kk = _nf(G, comp(Eval(bs, at),
                     PbPair(bs, PiMap(bs, at), Id(sigma), Comp(u, bs))))
    _, j = _kj(Gs, tau, {})
    j = _nf(Gs, j)
    return _ncomp(Gs, j, PbPair(v, at, Id(ONE), Comp(kk, v)))


# -- terms over an extension vs maps of the parent ---------------------------

def bar_term(Gs, t):
    """t : Tm(G.tau, sigma) with sigma from G  |->  t-bar : tau -> sigma."""
    G = parent_of(Gs)
    sigma = type_of(t, Gs)
    infer_obj(sigma, G)
    a = a_compare(Gs)
    tau = Gs.origin.sigma
    U = a.zeta.forward(sigma).h
    return comp(P2(Bang(tau), Bang(sigma)), U, apply_functor(a, t).h)


def unbar_term(Gs, s):
    """s : tau -> sigma in G  |->  s . v, a term of G.tau."""
    v = var_of(Gs)
    if dom(s) is not cod(v):
        # extension types are stored in normal form
        s = _nf(parent_of(Gs), s)
        if dom(s) is not cod(v):
            raise TypeMismatch("map does not start at the extension type")
    return Comp(s, v)


class CwfOver:
    """Contexts that are iterated extensions of a base context.

    ``object_to_context`` and ``morphism_to_subst`` send the base category
    into extension contexts and substitutions between them;
    ``subst_to_morphism`` goes back through bar_term.
    """

    def __init__(self, base, kind):
        self.base = base
        self.kind = kind
        self._ext = {}

    def __repr__(self):
        return "CwfOver(%s, %r)" % (self.kind, self.base)

    def empty(self):
        return self.base

    def extend(self, G, sigma):
        return extend(G, sigma)

    def context(self, *tys):
        G = self.base
        for t in tys:
            G = extend(G, t)[0]
        return G

    def object_to_context(self, sigma):
        Gs = self._ext.get(sigma)
        if Gs is None:
            Gs = extend(self.base, sigma)[0]
            self._ext[sigma] = Gs
        return Gs

    def morphism_to_subst(self, s):
        """s : tau -> sigma  |->  <p, s . v> : base.sigma -> base.tau."""
        tau, sigma = infer_boundary(s, self.base)
        Gs, Gt = self.object_to_context(sigma), self.object_to_context(tau)
        return mk_subst(Gs, weakening_subst(Gt), unbar_term(Gt, s))

    def subst_to_morphism(self, f):
        Gs = f.source
        Gt = f.target
        return bar_term(Gt, apply_functor(f, var_of(Gs)))


def coslice_cwf(G):
    return CwfOver(G, "coslice")


def core_cwf(C):
    return CwfOver(C, "core")


def context_as_model(C):
    if C.origin.kind != "free":
        raise TypeMismatch("context_as_model expects a free sketch context")
    return CwfOver(C, "context")
