"""Seeded random sketches, contexts, types, terms and substitutions.

Used by the property suites and by the CLI's ``--seed``.  Everything is
drawn from a ``random.Random`` passed in by the caller, so a seed fixes
the whole population.
"""
import random

from .term_core import (ONE, Bang, Comp, Gen, Id, PbObj, PiObj, boundary,
                        cod, dom, mk_presentation)
from . import cwf


def rng_for(seed):
    return random.Random(seed)


def random_sketch(rng, max_objs=3, max_arrows=4, elements=True):
    """A markings-free sketch on 1..max_objs objects.

    Arrows run between object generators; with ``elements`` some objects
    also get a global element so that their types are inhabited.
    """
    k = rng.randint(1, max_objs)
    objs = ["ABC"[i] for i in range(k)]
    gens = {}
    for i in range(rng.randint(0, max_arrows)):
        gens["f%d" % i] = (Gen(rng.choice(objs)), Gen(rng.choice(objs)))
    if elements:
        for i, o in enumerate(objs):
            if i == 0 or rng.random() < 0.5:
                gens["c%d" % i] = (ONE, Gen(o))
    return mk_presentation(objs, gens)


class Pool:
    """Small well-typed morphisms of a context, grouped by boundary."""

    def __init__(self, G, rng, rounds=1, max_size=7):
        self.G = G
        self.rng = rng
        self.by_bnd = {}
        self.objs = [ONE] + [Gen(n) for n in G.obj_gens]
        for g in G.mor_gens.values():
            self.add(g)
            for x in boundary(g):
                if x not in self.objs:
                    self.objs.append(x)
        for x in list(self.objs):
            self.add(Id(x))
            self.add(Bang(x))
        for _ in range(rounds):
            items = [m for ms in self.by_bnd.values() for m in ms]
            for f in items:
                for g in items:
                    if cod(g) is dom(f) and f.size + g.size <= max_size \
                            and f.tag not in ("Id",) and g.tag != "Id":
                        self.add(Comp(f, g))

    def add(self, m):
        b = boundary(m)
        lst = self.by_bnd.setdefault(b, [])
        if m not in lst:
            lst.append(m)

    def mors(self, d=None, c=None):
        return [m for (x, y), ms in self.by_bnd.items() for m in ms
                if (d is None or x is d) and (c is None or y is c)]

    def any_mor(self, d=None, c=None):
        ms = self.mors(d, c)
        return self.rng.choice(ms) if ms else None


def pool_for(G, rng):
    P = G.cache.get("pool")
    if P is None or P.rng is not rng:
        P = Pool(G, rng)
        G.cache["pool"] = P
    return P


def random_type(G, rng, size=25, depth=2):
    """A random object of G of term size at most ``size``."""
    P = pool_for(G, rng)
    for _ in range(20):
        t = _type(G, P, rng, depth)
        if t is not None and t.size <= size:
            return t
    return rng.choice(P.objs)


def _type(G, P, rng, depth):
    r = rng.random()
    if depth <= 0 or r < 0.35:
        return rng.choice(P.objs)
    if r < 0.55:
        a, b = _type(G, P, rng, depth - 1), _type(G, P, rng, depth - 1)
        return cwf.prod_ty(a, b)
    if r < 0.7:
        X = rng.choice(P.objs)
        s, t = term_of(G, X, rng), term_of(G, X, rng)
        if s is None:
            return cwf.unit_ty()
        return cwf.eq_ty(s, t if t is not None else s)
    if r < 0.85:
        f1 = P.any_mor()
        f2 = P.any_mor(c=cod(f1))
        return PbObj(f1, f2)
    g = P.any_mor()
    f1 = P.any_mor(d=cod(g))
    if f1 is None:
        return cwf.unit_ty()
    return PiObj(f1, g)


def term_of(G, X, rng, depth=3):
    """A random term One -> X, or None when none is found."""
    P = pool_for(G, rng)
    if X is ONE:
        return rng.choice([Id(ONE), Bang(ONE)])
    cands = P.mors(ONE, X)
    if X.tag == "PbObj" and depth > 0:
        f1, f2 = X.args
        if f1.tag == "Bang" and f2.tag == "Bang":
            a = term_of(G, dom(f1), rng, depth - 1)
            b = term_of(G, dom(f2), rng, depth - 1)
            if a is not None and b is not None:
                cands.append(cwf.prod_pair(a, b))
        elif dom(f1) is ONE and f1 is f2:
            cands.append(cwf.refl(G, f1))
    if not cands:
        return None
    return rng.choice(cands)


def random_morphism(G, rng, d=None):
    P = pool_for(G, rng)
    return P.any_mor(d=d)


def random_context(rng, sketch=None, depth=None, size=12):
    """An iterated extension of a random sketch, of depth at most 4."""
    G = sketch if sketch is not None else random_sketch(rng)
    n = rng.randint(0, 4) if depth is None else depth
    for _ in range(n):
        G = cwf.extend(G, random_type(G, rng, size, depth=1))[0]
    return G


def random_subst(D, rng, depth=3):
    """A generated substitution out of D, built from at most ``depth``
    uses of p, <f, s>, f+ and composition.  Returns (f, target)."""
    if depth <= 0:
        return cwf.identity_subst(D), D
    r = rng.random()
    if r < 0.2:
        return cwf.identity_subst(D), D
    if r < 0.45:
        Ds, p, _ = cwf.extend(D, random_type(D, rng, 10, depth=1))
        return p, Ds
    if D.origin.kind == "extension" and r < 0.75:
        G = cwf.parent_of(D)
        if rng.random() < 0.5:
            f, T = random_subst(G, rng, depth - 1)
            fp, Ts = cwf.lift_subst(f, D)
            return fp, Ts
        f, T = random_subst(G, rng, depth - 1)
        s = term_of(T, cwf.ty_subst(D.origin.sigma, f), rng)
        if s is not None:
            return cwf.mk_subst(D, f, s), T
        fp, Ts = cwf.lift_subst(f, D)
        return fp, Ts
    k = rng.randint(0, depth - 1)
    f, T = random_subst(D, rng, k)
    g, U = random_subst(T, rng, depth - 1 - k)
    return cwf.compose_subst(g, f), U



def enumerate_terms(P, max_size):
    """Every well-formed object and morphism term of P of size at most
    ``max_size``, built from generators, 1 and the canonical constructors.
    Returns (objects, morphisms), each a list ordered by size."""
    from .term_core import Curry, Eval, P1, P2, PbPair, PiMap, TermError
    objs = {1: [ONE] + [Gen(n) for n in P.obj_gens]}
    mors = {}
    for g in P.mor_gens.values():
        mors.setdefault(g.size, []).append(g)
    seen = set(objs[1]) | set(m for ms in mors.values() for m in ms)

    def add(table, t):
        if t.size <= max_size and t not in seen:
            seen.add(t)
            table.setdefault(t.size, []).append(t)

    def upto(table, n):
        return [t for k in range(1, n + 1) for t in table.get(k, [])]

    def attempt(table, make, *args):
        try:
            add(table, make(*args))
        except TermError:
            pass

    for n in range(2, max_size + 1):
        ob = upto(objs, n - 1)
        mo = upto(mors, n - 1)
        for x in ob:
            if 1 + x.size == n:
                attempt(mors, Id, x)
                attempt(mors, Bang, x)
        for a in mo:
            for b in mo:
                if 1 + a.size + b.size != n:
                    continue
                if cod(b) is dom(a):
                    attempt(mors, Comp, a, b)
                if cod(a) is cod(b):
                    attempt(objs, PbObj, a, b)
                    attempt(mors, P1, a, b)
                    attempt(mors, P2, a, b)
                if cod(b) is dom(a):
                    attempt(objs, PiObj, a, b)
                    attempt(mors, PiMap, a, b)
                    attempt(mors, Eval, a, b)
        # four-argument constructors
        small = [m for m in mo if m.size <= n - 7]
        for f1 in small:
            for f2 in small:
                r = n - 1 - f1.size - f2.size
                if r < 4 or cod(f1) is not cod(f2):
                    continue
                for q1 in small:
                    if q1.size > r - 2 or cod(q1) is not dom(f1):
                        continue
                    for q2 in small:
                        if q1.size + q2.size == r:
                            attempt(mors, PbPair, f1, f2, q1, q2)
                for g in small:
                    if g.size > r - 2:
                        continue
                    for e in small:
                        if g.size + e.size == r:
                            attempt(mors, Curry, f1, g, f2, e)
    return upto(objs, max_size), upto(mors, max_size)


__all__ = ["rng_for", "random_sketch", "Pool", "pool_for", "random_type",
           "term_of", "random_morphism", "random_context", "random_subst",
           "enumerate_terms"]
