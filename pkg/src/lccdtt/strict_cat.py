"""Slices with canonical structure, the functors s*, Sigma_s, Pi_s and their
transposes, the coalgebra lambda, the comparison iso phi and
strictification of weak lcc functors.
"""
from collections import namedtuple

from .term_core import (LIFTED_ONE, ONE, Bang, Comp, Curry, Eval, Functor,
                        Id, IllFormed, LiftedGen, MarkInv, MkTm, P1, P2,
                        PbObj, PbPair, PiMap, PiObj, Term, apply_functor,
                        boundary, cod, comp, dom, infer_obj, is_lift_marking,
                        lift_pb_marking, lift_pi_eval, lift_pi_marking,
                        lift_presentation)


class UnsupportedOrigin(Exception):
    pass


SliceMor = namedtuple("SliceMor", "h src tgt")
SliceMor.__doc__ = "Arrow of a slice: underlying h with src = tgt . h."


class SliceView:
    """The slice of a presentation over sigma, with canonical structure
    read off the base: terminal Id(sigma), pullbacks and dependent products
    computed on underlying arrows."""

    def __init__(self, base, sigma):
        infer_obj(sigma, base)
        self.base = base
        self.sigma = sigma

    def __repr__(self):
        return "SliceView(%r)" % (self.sigma,)

    def one(self):
        return Id(self.sigma)

    def ident(self, x):
        return SliceMor(Id(dom(x)), x, x)

    def compose(self, g, f):
        return SliceMor(Comp(g.h, f.h), f.src, g.tgt)

    def bang(self, x):
        return SliceMor(x, x, Id(self.sigma))

    def pb_obj(self, f1, f2):
        return Comp(f1.src, P1(f1.h, f2.h))

    def p1(self, f1, f2):
        return SliceMor(P1(f1.h, f2.h), self.pb_obj(f1, f2), f1.src)

    def p2(self, f1, f2):
        return SliceMor(P2(f1.h, f2.h), self.pb_obj(f1, f2), f2.src)

    def pb_pair(self, f1, f2, q1, q2):
        return SliceMor(PbPair(f1.h, f2.h, q1.h, q2.h), q1.src,
                        self.pb_obj(f1, f2))

    def pi_obj(self, f1, g):
        return Comp(f1.tgt, PiMap(f1.h, g.h))

    def pi_map(self, f1, g):
        return SliceMor(PiMap(f1.h, g.h), self.pi_obj(f1, g), f1.tgt)

    def eval_(self, f1, g):
        pm = self.pi_map(f1, g)
        return SliceMor(Eval(f1.h, g.h), self.pb_obj(f1, pm), g.src)

    def curry(self, f1, g, f2, e):
        return SliceMor(Curry(f1.h, g.h, f2.h, e.h), f2.src, self.pi_obj(f1, g))

    def mark(self, tag, args):
        return (tag,) + tuple(args)

    def mark_inv(self, m):
        from .term_core import TargetRejects
        raise TargetRejects("slice views realize no markings")


def slice_view(G, sigma):
    return SliceView(G, sigma)


# -- s*, Sigma_s, Pi_s ---------------------------------------------------------

class PullbackFunctor:
    """s* : slice over tau -> slice over sigma, for s : sigma -> tau (weak)."""

    strict = False

    def __init__(self, s, G):
        self.s = s
        self.base = G
        self.sigma, self.tau = boundary(s)

    def obj(self, y):
        return P1(self.s, y)

    def mor(self, k):
        s = self.s
        return SliceMor(PbPair(s, k.tgt, P1(s, k.src), Comp(k.h, P2(s, k.src))),
                        self.obj(k.src), self.obj(k.tgt))

    # adjunction data for Sigma_s -| s*
    def unit(self, x):
        s = self.s
        return SliceMor(PbPair(s, Comp(s, x), x, Id(dom(x))), x,
                        self.obj(Comp(s, x)))

    def counit(self, y):
        s = self.s
        return SliceMor(P2(s, y), Comp(s, self.obj(y)), y)


def pullback_functor(s, G):
    return PullbackFunctor(s, G)


def sigma_functor(s):
    """Sigma_s: post-composition with s, on objects and arrows."""
    return (lambda x: Comp(s, x),
            lambda k: SliceMor(k.h, Comp(s, k.src), Comp(s, k.tgt)))


def pi_functor(s):
    """Pi_s on slice objects and arrows, with unit and counit of s* -| Pi_s."""
    def obj(x):
        return PiMap(s, x)

    def mor(k):
        return SliceMor(Curry(s, k.tgt, PiMap(s, k.src), Comp(k.h, Eval(s, k.src))),
                        obj(k.src), obj(k.tgt))

    def unit(y):
        q = P1(s, y)
        return SliceMor(Curry(s, q, y, Id(PbObj(s, y))), y, obj(q))

    def counit(x):
        return SliceMor(Eval(s, x), P1(s, PiMap(s, x)), x)
    return obj, mor, unit, counit


def transpose(s, direction, k):
    """Adjoint mates along s.

    direction "sigma-right": k : Sigma_s x -> y  gives  x -> s* y
              "sigma-left" : m : x -> s* y       gives  Sigma_s x -> y
              "pi-right"   : k : s* y -> x       gives  y -> Pi_s x
              "pi-left"    : m : y -> Pi_s x     gives  s* y -> x
    Slice arrows are SliceMor values; the objects involved are read off
    their src/tgt fields.
    """
    if direction == "sigma-right":
        x, y = k.src.args[1], k.tgt
        return SliceMor(PbPair(s, y, x, k.h), x, P1(s, y))
    if direction == "sigma-left":
        y = k.tgt.args[1]
        x = k.src
        return SliceMor(Comp(P2(s, y), k.h), Comp(s, x), y)
    if direction == "pi-right":
        y, x = k.src.args[1], k.tgt
        return SliceMor(Curry(s, x, y, k.h), y, PiMap(s, x))
    if direction == "pi-left":
        y, x = k.src, k.tgt.args[1]
        return SliceMor(comp(Eval(s, x), PbPair(s, PiMap(s, x), P1(s, y),
                                                Comp(k.h, P2(s, y)))),
                        P1(s, y), x)
    raise ValueError("unknown direction %r" % direction)


def triangle_identities(s, x, y, G=None):
    """The four triangle identities of Sigma_s -| s* -| Pi_s as pairs of
    underlying arrows that must be equal; x lives over dom s, y over cod s."""
    S = PullbackFunctor(s, G)
    pobj, pmor, punit, pcounit = pi_functor(s)
    sx = Comp(s, x)
    sy = S.obj(y)
    out = []
    # Sigma -| s*
    out.append(("sigma-counit.Sigma(unit)",
                Comp(S.counit(sx).h, S.unit(x).h), Id(dom(x))))
    out.append(("s*(counit).unit-s*",
                Comp(S.mor(S.counit(y)).h, S.unit(sy).h), Id(dom(sy))))
    # s* -| Pi
    out.append(("pi-counit-s*.s*(unit)",
                Comp(pcounit(sy).h, S.mor(punit(y)).h), Id(dom(sy))))
    px = pobj(x)
    out.append(("Pi(counit).unit-Pi",
                Comp(pmor(pcounit(x)).h, punit(px).h), Id(dom(px))))
    return out


# -- weakening sigma* : G -> G/sigma ------------------------------------------

class Weakening:
    """Pullback along Bang(sigma), as a weak functor G -> SliceView(G, sigma),
    together with explicit inverses of its comparison maps."""

    strict = False

    def __init__(self, G, sigma):
        self.source = G
        self.sigma = sigma
        self.target = SliceView(G, sigma)

    def _pr1(self, X):
        return P1(Bang(self.sigma), Bang(X))

    def _pr2(self, X):
        return P2(Bang(self.sigma), Bang(X))

    def _pair(self, X, a, b):
        return PbPair(Bang(self.sigma), Bang(X), a, b)

    def obj(self, X):
        return self._pr1(X)

    def mor(self, h):
        A, B = boundary(h)
        return SliceMor(self._pair(B, self._pr1(A), Comp(h, self._pr2(A))),
                        self._pr1(A), self._pr1(B))

    def diagonal(self):
        S = self.sigma
        return SliceMor(self._pair(S, Id(S), Id(S)), Id(S), self._pr1(S))

    def inv_tm(self):
        S = self.sigma
        return SliceMor(self._pair(ONE, Id(S), Bang(S)), Id(S), self._pr1(ONE))

    def inv_pb(self, f1, f2):
        A, B = dom(f1), dom(f2)
        h1, h2 = self.mor(f1).h, self.mor(f2).h
        Pb = PbObj(f1, f2)
        src = Comp(self._pr1(A), P1(h1, h2))
        u = self._pair(Pb, src, PbPair(f1, f2, Comp(self._pr2(A), P1(h1, h2)),
                                       Comp(self._pr2(B), P2(h1, h2))))
        return SliceMor(u, src, self._pr1(Pb))

    def inv_pi(self, f1, g):
        A, C = boundary(f1)
        B = dom(g)
        h1, hg = self.mor(f1).h, self.mor(g).h
        pm = PiMap(h1, hg)
        src = Comp(self._pr1(C), pm)
        f2 = Comp(self._pr2(C), pm)
        inner = self._pair(A, comp(self._pr1(C), pm, P2(f1, f2)), P1(f1, f2))
        e = comp(self._pr2(B), Eval(h1, hg), PbPair(h1, pm, inner, P2(f1, f2)))
        Pi = PiObj(f1, g)
        return SliceMor(self._pair(Pi, src, Curry(f1, g, f2, e)), src,
                        self._pr1(Pi))


def weakening(G, sigma):
    return Weakening(G, sigma)


class StrictAsWeak:
    """A strict presentation functor seen as weak data (trivial comparisons)."""

    strict = True

    def __init__(self, F):
        self.F = F
        self.source = F.source
        self.target = F.target

    def obj(self, x):
        return apply_functor(self.F, x)

    def mor(self, h):
        return apply_functor(self.F, h)

    def inv_tm(self):
        return Id(ONE)

    def inv_pb(self, f1, f2):
        return Id(PbObj(self.mor(f1), self.mor(f2)))

    def inv_pi(self, f1, g):
        return Id(PiObj(self.mor(f1), self.mor(g)))


# -- lambda and phi ----------------------------------------------------------

PSI = Term("MarkInv", MkTm(LIFTED_ONE))


def coalgebra_lambda(G):
    """The coalgebra structure G -> F(G(G)) of a free or extension context.

    A generator g : X -> Y goes to phi_Y^-1 . LiftedGen(g) . phi_X, which is
    LiftedGen(g) itself when X and Y are generators; for the variable
    v : 1 -> sigma of an extension this is the corrected v'.  Inverses of
    sketch markings are conjugated the same way.
    """
    lam = G.cache.get("lambda")
    if lam is not None:
        return lam
    if G.origin.kind not in ("free", "extension"):
        raise UnsupportedOrigin(G.origin.kind)
    L = lift_presentation(G)
    memo = G.cache.setdefault("phi", {})

    def hook(t, ap):
        if t.tag == "MGen" or (t.tag == "MarkInv" and not is_lift_marking(t.args[0])):
            X, Y = boundary(t)
            a = _phi(lam, X, memo)[0]
            b = _phi(lam, Y, memo)[1]
            return _conj(b, LiftedGen(t), a)
        return None
    lam = Functor(G, L, {n: Term("Lifted", Term("Gen", n)) for n in G.obj_gens},
                  {}, hook=hook, name="lambda")
    G.cache["lambda"] = lam
    return lam


def _conj(b, h, a):
    parts = [x for x in (b, h, a) if x.tag != "Id"]
    return comp(*parts) if parts else h


def phi_iso(G, x):
    """(phi_x, phi_x^-1) between lambda(x) and the lifted generator Lifted(x)."""
    infer_obj(x, G)
    lam = coalgebra_lambda(G)
    return _phi(lam, x, G.cache["phi"])


def _phi(lam, x, memo):
    r = memo.get(x)
    if r is not None:
        return r
    tag = x.tag
    if tag == "Gen":
        r = (Id(Term("Lifted", x)), Id(Term("Lifted", x)))
    elif tag == "One":
        r = (PSI, Bang(LIFTED_ONE))
    elif tag == "PbObj":
        f1, f2 = x.args
        lf1, lf2 = apply_functor(lam, f1), apply_functor(lam, f2)
        L1, L2 = LiftedGen(f1), LiftedGen(f2)
        pa, pai = _phi(lam, dom(f1), memo)
        pb, pbi = _phi(lam, dom(f2), memo)
        m = lift_pb_marking(f1, f2)
        fwd = Comp(MarkInv(m), PbPair(L1, L2, Comp(pa, P1(lf1, lf2)),
                                      Comp(pb, P2(lf1, lf2))))
        inv = PbPair(lf1, lf2, Comp(pai, LiftedGen(P1(f1, f2))),
                     Comp(pbi, LiftedGen(P2(f1, f2))))
        r = (fwd, inv)
    elif tag == "PiObj":
        f1, g = x.args
        A, C = boundary(f1)
        B = dom(g)
        lf1, lg = apply_functor(lam, f1), apply_functor(lam, g)
        L1, Lg = LiftedGen(f1), LiftedGen(g)
        pa, pai = _phi(lam, A, memo)
        pb, pbi = _phi(lam, B, memo)
        pc, pci = _phi(lam, C, memo)
        lpm = PiMap(lf1, lg)
        pm = PiMap(f1, g)
        m = lift_pi_marking(f1, g)
        f2x = Comp(pc, lpm)
        e1 = comp(pb, Eval(lf1, lg),
                  PbPair(lf1, lpm, Comp(pai, P1(L1, f2x)), P2(L1, f2x)))
        fwd = Comp(MarkInv(m), Curry(L1, Lg, f2x, e1))
        f2y = Comp(pci, LiftedGen(pm))
        e2 = comp(pbi, lift_pi_eval(f1, g),
                  PbPair(L1, LiftedGen(pm), Comp(pa, P1(lf1, f2y)), P2(lf1, f2y)))
        inv = Curry(lf1, lg, f2y, e2)
        r = (fwd, inv)
    else:
        raise IllFormed("phi is defined on base objects only", x)
    memo[x] = r
    return r


# -- strictification ---------------------------------------------------------

class IsoFamily:
    """Components x -> (forward, inverse), computed on demand."""

    def __init__(self, fn, name=None):
        self.fn = fn
        self.name = name
        self._memo = {}

    def __call__(self, x):
        r = self._memo.get(x)
        if r is None:
            r = self.fn(x)
            self._memo[x] = r
        return r

    def forward(self, x):
        return self(x)[0]

    def inverse(self, x):
        return self(x)[1]


def extend_bar(f, G):
    """f-bar : F(G(G)) -> target, the strict extension of weak f."""
    T = f.target

    def hook(t, ap):
        tag = t.tag
        if tag == "Lifted":
            return f.obj(t.args[0])
        if tag == "LiftedGen":
            return f.mor(t.args[0])
        if tag == "MarkInv" and is_lift_marking(t.args[0]):
            m = t.args[0]
            if m.tag == "MkTm":
                return f.inv_tm()
            base = [a.args[0] for a in m.args[:2]]
            if m.tag == "MkPb":
                return f.inv_pb(*base)
            return f.inv_pi(*base)
        return None
    return Functor(lift_presentation(G), T, {}, {}, hook=hook, name="fbar")


def _markinv_hook(fbar, lam):
    # sketch marking inverses are not generators; route them through lambda
    def hook(t, ap):
        if t.tag == "MarkInv" and not is_lift_marking(t.args[0]):
            return apply_functor(fbar, apply_functor(lam, t))
        return None
    return hook


def strictify(f, G=None):
    """(f^s, zeta) with f^s = fbar . lambda and zeta_x = fbar(phi_x)."""
    G = G or f.source
    lam = coalgebra_lambda(G)
    fbar = extend_bar(f, G)
    fs = Functor(G, f.target,
                 {n: apply_functor(fbar, apply_functor(lam, Term("Gen", n)))
                  for n in G.obj_gens},
                 {n: apply_functor(fbar, apply_functor(lam, g))
                  for n, g in G.mor_gens.items()},
                 strict=True, name="strictified")
    fs.hook = _markinv_hook(fbar, lam)

    def zeta(x):
        a, b = phi_iso(G, x)
        return apply_functor(fbar, a), apply_functor(fbar, b)
    return fs, IsoFamily(zeta, name="zeta")
