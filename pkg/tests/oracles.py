"""Brute-force reference checks, written independently of fin_lcc.

The fibrancy oracle restates the universal properties as counting
statements over hom-sets and compares marking sets against them; it shares
no helper with ``lccdtt.fin_lcc``.  The corpus mixes posets, categories
with parallel arrows, and perturbed markings.
"""
import itertools
import random

from lccdtt.fin_lcc import FinCat, mark_all, poset_arrow


class Tables:
    """Hom-sets and composition of a FinCat, re-read from its raw tables."""

    def __init__(self, C):
        self.obs = list(C.objects)
        self.src = {a: d for a, (d, c) in C.arrows.items()}
        self.tgt = {a: c for a, (d, c) in C.arrows.items()}
        self.o = dict(C.compose)
        self.homs = {(x, y): [] for x in self.obs for y in self.obs}
        for a in sorted(C.arrows):
            self.homs[(self.src[a], self.tgt[a])].append(a)

    def cone_count(self, X, A, B, x1, x2, W, q1, q2):
        return sum(1 for u in self.homs[(X, W)]
                   if self.o[(q1, u)] == x1 and self.o[(q2, u)] == x2)

    def pb(self, q1, q2, f1, f2):
        o = self.o
        if o[(f1, q1)] != o[(f2, q2)]:
            return False
        W, A, B = self.src[q1], self.tgt[q1], self.tgt[q2]
        for X in self.obs:
            for x1, x2 in itertools.product(self.homs[(X, A)], self.homs[(X, B)]):
                if o[(f1, x1)] == o[(f2, x2)] and \
                        self.cone_count(X, A, B, x1, x2, W, q1, q2) != 1:
                    return False
        return True

    def all_pb(self, f1, f2):
        A, B = self.src[f1], self.src[f2]
        return [(q1, q2) for W in self.obs
                for q1 in self.homs[(W, A)] for q2 in self.homs[(W, B)]
                if self.pb(q1, q2, f1, f2)]

    def pi(self, f1, g, f2, p1, p2, e):
        """Universal iff for every h : Q -> cod f1, composing with the
        counit is a bijection from maps Q -> dom f2 over cod f1 to sections
        of g over the pullback of f1 along h."""
        o = self.o
        if not self.pb(p1, p2, f1, f2) or o[(g, e)] != p1:
            return False
        Cc, A, P, B = self.tgt[f1], self.src[f1], self.src[f2], self.src[g]
        for Q in self.obs:
            for h in self.homs[(Q, Cc)]:
                sq = self.all_pb(f1, h)
                if not sq:
                    return False
                r1, r2 = sq[0]
                R = self.src[r1]
                over = [u for u in self.homs[(Q, P)] if o[(f2, u)] == h]
                sections = {e2 for e2 in self.homs[(R, B)] if o[(g, e2)] == r1}
                image = []
                for u in over:
                    ms = [m for m in self.homs[(R, self.src[p1])]
                          if o[(p1, m)] == r1 and o[(p2, m)] == o[(u, r2)]]
                    if len(ms) != 1:
                        return False
                    image.append(o[(e, ms[0])])
                if len(set(image)) != len(image) or set(image) != sections:
                    return False
        return True


def brute_fibrant(C):
    T = Tables(C)
    arrows = sorted(T.src)
    terminal = {x for x in T.obs if all(len(T.homs[(y, x)]) == 1 for y in T.obs)}
    if not terminal or terminal != set(C.tm):
        return False
    pbs = set()
    for f1, f2 in itertools.product(arrows, arrows):
        if T.tgt[f1] != T.tgt[f2]:
            continue
        sq = T.all_pb(f1, f2)
        if not sq:
            return False
        pbs.update((q1, q2, f1, f2) for q1, q2 in sq)
    if pbs != set(C.pb):
        return False
    pis = set()
    for f1 in arrows:
        for g in arrows:
            if T.tgt[g] != T.src[f1]:
                continue
            found = False
            for f2 in arrows:
                if T.tgt[f2] != T.tgt[f1]:
                    continue
                for p1, p2 in T.all_pb(f1, f2):
                    for e in T.homs[(T.src[p1], T.src[g])]:
                        if T.pi(f1, g, f2, p1, p2, e):
                            pis.add((f1, g, f2, p1, p2, e))
                            found = True
            if not found:
                return False
    return pis == set(C.pi)


# -- corpus ------------------------------------------------------------------

def chain2(tm=True):
    C = FinCat.from_poset(["0", "1"], [("0", "1")], "all", name="chain2")
    return C if tm else C.with_markings(tm=[])


def noncommuting_pb():
    """Two parallel arrows a, b : X -> Y and a Pb marking on a square that
    does not commute."""
    arrows = {"a": ("X", "Y"), "b": ("X", "Y"),
              "iX": ("X", "X"), "iY": ("Y", "Y")}
    compose = {}
    for n, (d, c) in arrows.items():
        compose[(n, "i" + d)] = n
        compose[("i" + c, n)] = n
    C = FinCat(["X", "Y"], arrows, compose, {"X": "iX", "Y": "iY"},
               name="noncommuting")
    C = mark_all(C)
    return C.with_markings(pb=list(C.pb) + [("iX", "iX", "a", "b")])


def walking_iso(marked=True):
    """Two isomorphic objects: lcc, with every structure unique up to iso."""
    arrows = {"iX": ("X", "X"), "iY": ("Y", "Y"), "u": ("X", "Y"), "w": ("Y", "X")}
    compose = {("u", "iX"): "u", ("iY", "u"): "u", ("w", "iY"): "w",
               ("iX", "w"): "w", ("iX", "iX"): "iX", ("iY", "iY"): "iY",
               ("w", "u"): "iX", ("u", "w"): "iY"}
    C = FinCat(["X", "Y"], arrows, compose, {"X": "iX", "Y": "iY"}, name="iso")
    return mark_all(C) if marked else C


def idempotent_monoid():
    """One object with an idempotent e: has a terminal only if e = id."""
    arrows = {"i": ("X", "X"), "e": ("X", "X")}
    compose = {("i", "i"): "i", ("i", "e"): "e", ("e", "i"): "e", ("e", "e"): "e"}
    return mark_all(FinCat(["X"], arrows, compose, {"X": "i"}, name="idem"))


def random_poset(rng, n):
    """Random order on n elements; usually the last one is made a top."""
    els = [str(i) for i in range(n)]
    leq = [(els[i], els[j]) for i in range(n) for j in range(i + 1, n)
           if rng.random() < 0.45]
    if n and rng.random() < 0.7:
        leq += [(x, els[-1]) for x in els[:-1]]
    return FinCat.from_poset(els, leq, name="poset%d" % n)


def perturb(C, rng):
    """Drop or add one marking, or flip a Tm marking."""
    choice = rng.randrange(4)
    if choice == 0 and C.pb:
        pb = list(C.pb)
        pb.pop(rng.randrange(len(pb)))
        return C.with_markings(pb=pb)
    if choice == 1 and C.pi:
        pi = list(C.pi)
        pi.pop(rng.randrange(len(pi)))
        return C.with_markings(pi=pi)
    if choice == 2:
        x = rng.choice(C.objects)
        tm = [y for y in C.tm if y != x] if x in C.tm else list(C.tm) + [x]
        return C.with_markings(tm=tm)
    # a commuting square that is usually not a pullback
    x = rng.choice(C.objects)
    ids = poset_arrow(x, x) if poset_arrow(x, x) in C.arrows else None
    cands = [(a, b) for a in C.arrows for b in C.arrows
             if C.cod(a) == C.cod(b) and C.dom(a) == x == C.dom(b)]
    if ids is None or not cands:
        return C.with_markings(tm=[])
    a, b = rng.choice(cands)
    return C.with_markings(pb=list(C.pb) + [(ids, ids, a, b)])


def corpus(seed=0, n_random=30):
    """(name, FinCat) pairs; the documented examples come first."""
    out = [
        ("chain2 fully marked", chain2()),
        ("chain2 without Tm marking", chain2(tm=False)),
        ("non-commuting Pb marking", noncommuting_pb()),
        ("walking isomorphism", walking_iso()),
        ("walking isomorphism unmarked", walking_iso(False)),
        ("idempotent monoid", idempotent_monoid()),
    ]
    for name, els, leq in [
            ("chain3", ["0", "a", "1"], [("0", "a"), ("a", "1")]),
            ("diamond", ["0", "x", "y", "1"],
             [("0", "x"), ("0", "y"), ("x", "1"), ("y", "1")]),
            ("v-shape", ["x", "y", "1"], [("x", "1"), ("y", "1")]),
            ("pentagon", ["0", "a", "b", "c", "1"],
             [("0", "a"), ("a", "b"), ("b", "1"), ("0", "c"), ("c", "1")]),
            ("m3", ["0", "a", "b", "c", "1"],
             [("0", "a"), ("0", "b"), ("0", "c"), ("a", "1"), ("b", "1"),
              ("c", "1")])]:
        out.append((name, FinCat.from_poset(els, leq, "all", name=name)))
    rng = random.Random(seed)
    for i in range(n_random):
        P = mark_all(random_poset(rng, rng.randint(1, 5)))
        out.append(("random poset %d" % i, P))
        out.append(("random poset %d perturbed" % i, perturb(P, rng)))
    return out
