"""Equational theory of strict lcc categories.

Normal forms are right-nested composite chains.  Rules are applied to
children first, then to chain segments scanning from the right (the
innermost arrow of a composite is its rightmost factor).  Pairings,
transposes and maps into One are pushed to the right end of a chain by the
naturality rules, so the projection/pairing redexes are always adjacent.
"""
import hashlib

from .term_core import (ONE, BoundaryMismatch, Id, Term, boundary, cod,
                        dom, show, MARK_TAGS, comparison)

DEFAULT_BUDGET = 10000


class BudgetExceeded(Exception):
    def __init__(self, best, steps):
        Exception.__init__(self, "rewrite budget exhausted after %d steps" % steps)
        self.best = best
        self.steps = steps


class Step:
    __slots__ = ("rule", "pos", "before", "after")

    def __init__(self, rule, pos, before, after):
        self.rule, self.pos, self.before, self.after = rule, pos, before, after

    def line(self):
        return "%s @%s %s -> %s" % (self.rule, self.pos, thash(self.before),
                                    thash(self.after))


def thash(t):
    return hashlib.sha1(show(t).encode()).hexdigest()[:10]


# -- verdicts ----------------------------------------------------------------

class Equal:
    kind = "Equal"

    def __init__(self, trace=()):
        self.trace = list(trace)

    def __repr__(self):
        return "Equal(%d steps)" % len(self.trace)


class Distinct:
    kind = "Distinct"

    def __init__(self, model, assignment):
        self.model, self.assignment = model, assignment

    def __repr__(self):
        from .fin_lcc import describe_assignment
        return "Distinct(%s)" % describe_assignment(self.model, self.assignment)


class Unknown:
    kind = "Unknown"

    def __init__(self, report, trace=()):
        self.report = report
        self.trace = list(trace)

    def __repr__(self):
        return "Unknown(%s)" % self.report


# -- chains ------------------------------------------------------------------

def flatten(t):
    if t.tag == "Comp":
        return flatten(t.args[0]) + flatten(t.args[1])
    if t.tag == "Id":
        return []
    return [t]


def build(chain, d):
    if not chain:
        return Id(d)
    t = chain[-1]
    for x in reversed(chain[:-1]):
        t = Term("Comp", x, t)
        boundary(t)
    return t


def _key(t):
    return (t.size, show(t))


TERMINATORS = ("Bang", "PbPair", "Curry")


def _unfold_points(c):
    """c and, when c is a . ! out of PbObj(a, b) with a a global element,
    the other side b . P2 of that square (and symmetrically)."""
    yield c
    if not c or c[-1].tag != "Bang" or c[-1].args[0].tag != "PbObj":
        return
    a, b = c[-1].args[0].args
    for this, that, p in ((a, b, "P2"), (b, a, "P1")):
        if dom(this) is ONE and list(c[:-1]) == flatten(this):
            yield flatten(that) + [Term(p, a, b)]


def _pair_paths(h, depth):
    """(r, q) with q = r . h, r a chain of projections (and PiMaps out of
    transposes); nested pairings are followed ``depth`` levels down."""
    if depth <= 0:
        return
    if h.tag == "Curry":
        f1, g, f2 = h.args[:3]
        pm = Term("PiMap", f1, g)
        yield (pm,), f2
        for r, leaf in _pair_paths(f2, depth - 1):
            yield r + (pm,), leaf
        return
    if h.tag != "PbPair":
        return
    f1, f2 = h.args[:2]
    for k, p in ((2, "P1"), (3, "P2")):
        pk = Term(p, f1, f2)
        q = h.args[k]
        yield (pk,), q
        for r, leaf in _pair_paths(q, depth - 1):
            yield r + (pk,), leaf


class Engine:
    """Normalizer and decision procedure for one presentation's theory."""

    def __init__(self, P, budget=DEFAULT_BUDGET, tracing=False):
        self.P = P
        self.budget = budget
        self.tracing = tracing
        self.memo = {}
        self.trace = []
        self.steps = 0
        self.rules = []
        self.vertex_marks = {}
        self._active = set()
        base = P.origin.base if P.is_lift else None
        self.base_engine = Engine(base, budget) if base is not None else None
        eqs = list(P.equations) + list(P.facts)
        for m in P.markings:
            self._note_vertex(m)
        for l, r in eqs:
            self.add_rule(l, r)
        # a global element of PbObj(s, t) with s, t global elements forces
        # s = s.P1.e = t.P2.e = t.  Used by the closure only: as a rewrite
        # rule it would move the boundaries of e itself.
        self.point_eqs = []
        for g in P.mor_gens.values():
            E = cod(g)
            if dom(g) is ONE and E.tag == "PbObj" and dom(E.args[0]) is ONE:
                self.point_eqs.append(tuple(self.nf(a) for a in E.args))

    def _note_vertex(self, m):
        if m.tag != "MkTm":
            v = boundary(comparison(m))[0]
            self.vertex_marks.setdefault(v, m)

    def add_rule(self, l, r):
        old = self.budget
        self.budget = None
        try:
            l, r = self.nf(l), self.nf(r)
        finally:
            self.budget = old
        if l is r:
            return
        if _key(l) < _key(r):
            l, r = r, l
        self.rules.append((l, flatten(l), flatten(r)))
        self.memo = {}

    # -- entry points
    def normalize(self, t):
        self.steps = 0
        if self.base_engine is not None:
            self.base_engine.steps = 0
        return self.nf(t)

    def _tick(self, rule, pos, before, after):
        self.steps += 1
        if self.budget is not None and self.steps > self.budget:
            raise BudgetExceeded(before, self.steps)
        if self.tracing:
            self.trace.append(Step(rule, pos, before, after))

    def nf(self, t):
        r = self.memo.get(t)
        if r is not None:
            return r
        if t.is_obj:
            r = self._nf_obj(t)
        elif t.tag in MARK_TAGS:
            r = Term(t.tag, *[self.nf(a) for a in t.args])
        else:
            d = self.nf(dom(t))
            r = build(self._nf_chain(t, d), d)
        self.memo[t] = r
        self.memo[r] = r
        return r

    def _nf_obj(self, x):
        if x.tag in ("Gen", "One"):
            return x
        return Term(x.tag, *[self.nf(a) for a in x.args])

    def _nf_chain(self, t, d):
        if t.tag == "Comp":
            chain = flatten(self.nf(t.args[0])) + flatten(self.nf(t.args[1]))
        elif t.tag == "Id":
            return []
        else:
            chain = self._nf_node(t)
        return self._reduce(chain, d)

    def _nf_node(self, t):
        tag = t.tag
        if tag == "MGen":
            x = t
        elif tag == "LiftedGen":
            a = self.base_engine.nf(t.args[0])
            r = [Term("LiftedGen", z) for z in flatten(a)]
            if a.tag == "Id":
                self._tick("lift-id", 0, t, Id(cod(t)))
            elif len(r) > 1:
                self._tick("lift-comp", 0, t, build(r, dom(t)))
            return r
        else:
            x = Term(tag, *[self.nf(a) for a in t.args])
            boundary(x)
        if tag == "Bang" and x.args[0] is ONE:
            self._tick("tm2", 0, x, Id(ONE))
            return []
        if tag == "PbPair":
            w = self._pb_eta(x)
            if w is not None:
                self._tick("pb2η", 0, x, w)
                return flatten(w)
        if tag == "Curry":
            w = self._pi_eta(x)
            if w is not None:
                self._tick("pi2η", 0, x, w)
                return flatten(w)
        return [x]

    def _comp(self, *parts):
        chain = []
        for p in parts:
            chain.extend(flatten(self.nf(p)))
        d = self.nf(dom(parts[-1]))
        return build(self._reduce(chain, d), d)

    def _pb_eta(self, x):
        f1, f2, q1, q2 = x.args
        p1, p2 = Term("P1", f1, f2), Term("P2", f1, f2)
        cands = []
        for q, p in ((q1, p1), (q2, p2)):
            c = flatten(q)
            if c and c[0] is p:
                cands.append(c[1:])
        for c in cands:
            w = build(c, dom(q1))
            if cod(w) is not cod(x):
                continue
            if self._comp(p1, w) is q1 and self._comp(p2, w) is q2:
                return w
        return None

    def _pi_eta(self, x):
        f1, g, f2, e = x.args
        pm = Term("PiMap", f1, g)
        ev = Term("Eval", f1, g)
        c = flatten(e)
        sub = self.subterminal(cod(f2))
        if len(c) == 1 and c[0] is ev and (f2 is pm or sub):
            return Id(cod(x))
        if len(c) != 2 or c[0] is not ev or c[1].tag != "PbPair":
            return None
        pr = c[1]
        if pr.args[0] is not f1 or pr.args[1] is not pm:
            return None
        b = flatten(pr.args[3])
        p2 = Term("P2", f1, f2)
        if not b or b[-1] is not p2:
            return None
        w = build(b[:-1], dom(f2))
        if cod(w) is not cod(x) or not (sub or self._comp(pm, w) is f2):
            return None
        redo = self._comp(ev, Term("PbPair", f1, pm, Term("P1", f1, f2),
                                   self._comp(w, p2)))
        return w if redo is e else None

    # -- subterminal objects and canonical maps into them
    def subterminal(self, S):
        if S is ONE or self.P.tm_marked(S):
            return True
        if S.tag == "PbObj":
            return self.subterminal(dom(S.args[0])) and \
                self.subterminal(dom(S.args[1]))
        if S.tag == "PiObj":
            # Pi along f of an iso is terminal over cod f
            f1, g = S.args
            return self.subterminal(cod(f1)) and (
                g.tag == "Id" or (self.subterminal(dom(g)) and
                                  self.subterminal(cod(g))))
        return False

    def canon(self, d, S):
        """The canonical map d -> S into a subterminal S: the canonical
        global element of S after Bang(d)."""
        if d is S:
            return Id(S)
        if S is ONE:
            return Term("Bang", d)
        c = self.element(S)
        return c if d is ONE else Term("Comp", c, Term("Bang", d))

    def element(self, S):
        if S is ONE:
            return Id(ONE)
        if self.P.tm_marked(S):
            return Term("MarkInv", Term("MkTm", S))
        if S.tag == "PiObj":
            f1, g = S.args
            f2 = self.element(cod(f1))
            pb = Term("PbObj", f1, f2)
            e = self.canon(pb, dom(g)) if self.subterminal(dom(g)) else \
                Term("P1", f1, f2)
            return Term("Curry", f1, g, f2, e)
        f1, f2 = S.args
        return Term("PbPair", f1, f2, self.element(dom(f1)),
                    self.element(dom(f2)))

    # -- chain reduction
    def _reduce(self, chain, d):
        while True:
            hit = self._scan(chain, d)
            if hit is None:
                return chain
            rule, start, stop, repl = hit
            before = build(chain, d) if self.tracing else None
            chain = chain[:start] + repl + chain[stop:]
            self._tick(rule, start, before,
                       build(chain, d) if self.tracing else None)

    def _scan(self, chain, d):
        n = len(chain)
        for end in range(n - 1, -1, -1):
            x = chain[end]
            hit = self._at(chain, end, x, d, n)
            if hit is not None:
                return hit
        return None

    def _at(self, chain, end, x, d, n):
        tag = x.tag
        # maps into subterminal objects
        S = cod(x)
        # a bare PiMap stays: it occurs inside the domain of Eval
        sub = self.subterminal(S) and not (tag == "PiMap" and end == n - 1)
        if sub:
            can = flatten(self.canon(d, S))
            if chain[end:] != can:
                rule = "tm2" if S is ONE else (
                    "mark-tm" if self.P.tm_marked(S) else "tm2-sub")
                return rule, end, n, can
        # naturality of terminators
        if tag in TERMINATORS and end < n - 1 and not sub:
            rest = build(chain[end + 1:], d)
            a = x.args
            if tag == "Bang":
                r = Term("Bang", d)
                rule = "tm2"
            elif tag == "PbPair":
                r = self.nf(Term("PbPair", a[0], a[1], Term("Comp", a[2], rest),
                                 Term("Comp", a[3], rest)))
                rule = "pb-nat"
            else:
                f1, g, f2, e = a
                f2r = Term("Comp", f2, rest)
                pb = Term("PbPair", f1, f2, Term("P1", f1, f2r),
                          Term("Comp", rest, Term("P2", f1, f2r)))
                r = self.nf(Term("Curry", f1, g, f2r, Term("Comp", e, pb)))
                rule = "pi-nat"
            return rule, end, n, flatten(r)
        prev = chain[end - 1] if end > 0 else None
        if tag == "PbPair" and prev is not None:
            f1, f2, q1, q2 = x.args
            if prev is Term("P1", f1, f2):
                return "pb2β", end - 1, end + 1, flatten(q1)
            if prev is Term("P2", f1, f2):
                return "pb2β", end - 1, end + 1, flatten(q2)
            if prev.tag == "Eval" and q2.tag == "Curry":
                h1, g = prev.args
                if f1 is h1 and f2 is Term("PiMap", h1, g) and \
                        q2.args[0] is h1 and q2.args[1] is g:
                    f2b, eb = q2.args[2], q2.args[3]
                    r = self._comp(eb, Term("PbPair", h1, f2b, q1, Id(dom(f2b))))
                    return "pi2β", end - 1, end + 1, flatten(r)
            if prev.tag == "MarkInv" and prev.args[0].tag == "MkPb":
                m = prev.args[0]
                if m.args[0] is f1 and m.args[1] is f2:
                    h = self._divide(m.args[2], q1)
                    if h is not None and self._comp(m.args[3], h) is q2:
                        return "mark-pb", end - 1, end + 1, flatten(h)
            r = self._pi_mark_eps(chain, end, x)
            if r is not None:
                return r
        if tag == "Curry" and prev is not None:
            f1, g, f2, e = x.args
            if prev is Term("PiMap", f1, g):
                return "pi2-tri", end - 1, end + 1, flatten(f2)
            if prev.tag == "MarkInv" and prev.args[0].tag == "MkPi":
                m = prev.args[0]
                if m.args[0] is f1 and m.args[1] is g:
                    h = self._divide(m.args[2], f2)
                    if h is not None and self._comp(comparison(m), h) is x:
                        return "mark-pi", end - 1, end + 1, flatten(h)
        if tag == "Eval":
            # g . Eval = P1; an identity g matches the empty segment
            seg = flatten(x.args[1])
            s = end - len(seg)
            if s >= 0 and chain[s:end] == seg:
                f1, g = x.args
                return "pi0", s, end + 1, [Term("P1", f1, Term("PiMap", f1, g))]
            f1, g = x.args
            if g.tag == "PbPair":
                for q, p in ((g.args[2], "P1"), (g.args[3], "P2")):
                    seg = flatten(q)
                    s = end - len(seg)
                    if seg and s >= 0 and chain[s:end] == seg:
                        return "pi0", s, end + 1, [
                            Term(p, g.args[0], g.args[1]),
                            Term("P1", f1, Term("PiMap", f1, g))]
        if tag == "P2":
            f1, f2 = x.args
            seg = flatten(f2)
            s = end - len(seg)
            if s >= 0 and chain[s:end] == seg:
                return "pb0", s, end + 1, flatten(f1) + [Term("P1", f1, f2)]
            # q_i . P2 = P_i . f2 . P2 = P_i . f1 . P1 when f2 is a pairing
            if f2.tag == "PbPair":
                g1, g2 = f2.args[:2]
                for q, p in ((f2.args[2], "P1"), (f2.args[3], "P2")):
                    seg = flatten(q)
                    s = end - len(seg)
                    # an identity leg matches the empty segment
                    if s >= 0 and chain[s:end] == seg:
                        return "pb0", s, end + 1, [Term(p, g1, g2)] + \
                            flatten(f1) + [Term("P1", f1, f2)]
        if tag == "MarkInv":
            m = x.args[0]
            if m.tag == "MkPb":
                f1, f2, q1, q2 = m.args
                for q, p in ((q1, "P1"), (q2, "P2")):
                    seg = flatten(q)
                    s = end - len(seg)
                    if seg and s >= 0 and chain[s:end] == seg:
                        return "mark-pb", s, end + 1, [Term(p, f1, f2)]
            elif m.tag == "MkPi":
                f1, g, f2, e = m.args
                seg = flatten(f2)
                s = end - len(seg)
                if seg and s >= 0 and chain[s:end] == seg:
                    return "mark-pi", s, end + 1, [Term("PiMap", f1, g)]
        if tag == "LiftedGen" and prev is not None and prev.tag == "LiftedGen":
            s = end - 1
            while s > 0 and chain[s - 1].tag == "LiftedGen":
                s -= 1
            run = [z.args[0] for z in chain[s:end + 1]]
            r = flatten(self.base_engine.nf(build(run, dom(run[-1]))))
            if r != run:
                return "lift-comp", s, end + 1, [Term("LiftedGen", z) for z in r]
        for l, lc, rc in self.rules:
            s = end + 1 - len(lc)
            if lc and s >= 0 and chain[s:end + 1] == lc:
                return "eq", s, end + 1, rc
        return None

    def _divide(self, q, a):
        """h with a = q . h when the chain of a starts with the chain of q."""
        qc, ac = flatten(q), flatten(a)
        if ac[:len(qc)] != qc:
            return None
        return build(ac[len(qc):], dom(a))

    def _pi_mark_eps(self, chain, end, x):
        # e_m . <a, MarkInv(m) . b> -> Eval . <a, b>, for m = MkPi(f1, g, f2, e_m)
        f1, f2, a, b = x.args
        bc = flatten(b)
        if not bc or bc[0].tag != "MarkInv":
            return None
        m = bc[0].args[0]
        if m.tag != "MkPi" or m.args[0] is not f1 or m.args[2] is not f2:
            return None
        g = m.args[1]
        seg = flatten(m.args[3])
        s = end - len(seg)
        if seg and s >= 0 and chain[s:end] == seg:
            pm = Term("PiMap", f1, g)
            rest = build(bc[1:], dom(b))
            r = self._comp(Term("Eval", f1, g),
                           self.nf(Term("PbPair", f1, pm, a, rest)))
            return "mark-pi", s, end + 1, flatten(r)
        return None

    # -- equality
    def equal(self, t, u, depth=0):
        """Decide t = u for normal forms; True only with a derivation."""
        if t is u:
            return True
        key = (t, u)
        if key in self._active or depth > 24:
            return False
        self._active.add(key)
        try:
            return self._equal(t, u, depth)
        finally:
            self._active.discard(key)

    def _equal(self, t, u, depth):
        c = cod(t)
        if self.subterminal(c):
            self._note("terminal-collapse", t, u)
            return True
        if c.tag == "PbObj":
            f1, f2 = c.args
            self._note("pb-ext", t, u)
            return all(self.equal(self._comp(Term(p, f1, f2), t),
                                  self._comp(Term(p, f1, f2), u), depth + 1)
                       for p in ("P1", "P2"))
        if c.tag == "PiObj":
            if self._square_search(t, u):
                self._note("pb-square", t, u)
                return True
            if self._left_cancel(t, u, depth):
                return True
            f1, g = c.args
            pm = Term("PiMap", f1, g)
            mt, mu = self._comp(pm, t), self._comp(pm, u)
            if mt is not mu and not self.equal(mt, mu, depth + 1):
                return False
            self._note("pi-ext", t, u)
            ev = Term("Eval", f1, g)
            if f1.tag == "Id":
                # along an identity Eval is invertible; stay on dom(t)
                et = self._comp(ev, Term("PbPair", f1, pm, mt, t))
                eu = self._comp(ev, Term("PbPair", f1, pm, mu, u))
            else:
                p1, p2 = Term("P1", f1, mt), Term("P2", f1, mt)
                et = self._comp(ev, Term("PbPair", f1, pm, p1, Term("Comp", t, p2)))
                eu = self._comp(ev, Term("PbPair", f1, pm, p1, Term("Comp", u, p2)))
            # g split mono: compare after g, where pi0 applies
            if self._split_mono(g) and self.equal(self._comp(g, et),
                                                  self._comp(g, eu), depth + 1):
                return True
            return self.equal(et, eu, depth + 1)
        m = self.vertex_marks.get(c) or self._lift_vertex(c)
        if m is not None:
            k = comparison(m)
            self._note("mark-ext", t, u)
            return self.equal(self._comp(k, t), self._comp(k, u), depth + 1)
        return self._generic(t, u, depth)

    def _split_mono(self, g):
        """g has a syntactic retraction (identities, pairings with an
        identity leg, and their composites)."""
        for x in flatten(g):
            if x.tag != "PbPair":
                return False
            q1, q2 = x.args[2], x.args[3]
            if q1.tag != "Id" and q2.tag != "Id":
                return False
        return True

    def _generic(self, t, u, depth):
        if self._closure(t, u):
            return True
        if self._square_search(t, u):
            self._note("pb-square", t, u)
            return True
        return self._left_cancel(t, u, depth)

    def _left_cancel(self, t, u, depth):
        # x . t' = x . u' follows from t' = u'
        tc, uc = flatten(t), flatten(u)
        n = 0
        while n < min(len(tc), len(uc)) - 1 and tc[n] is uc[n]:
            n += 1
        if n:
            d = dom(t)
            self._note("left-cancel", t, u)
            return self.equal(build(tc[n:], d), build(uc[n:], d), depth + 1)
        return False

    def _lift_vertex(self, c):
        if not self.P.is_lift or c.tag != "Lifted":
            return None
        from .term_core import lift_pb_marking, lift_pi_marking
        x = c.args[0]
        if x.tag == "PbObj":
            return lift_pb_marking(*x.args)
        if x.tag == "PiObj":
            return lift_pi_marking(*x.args)
        return None

    def _note(self, rule, t, u):
        if self.tracing:
            self.trace.append(Step(rule, "root", t, u))

    def _closure(self, t, u):
        cc = Congruence()
        for l, lc, rc in self.rules:
            cc.merge(l, build(rc, dom(l)) if rc else Id(dom(l)))
        for a, b in self.point_eqs:
            cc.merge(a, b)
        cc.add(t)
        cc.add(u)
        if cc.same(t, u):
            self._note("congruence", t, u)
            return True
        return False

    def _moves(self, chain):
        """Chains one square equation away (pullback squares read either
        way, pi0, and projections of known pairings)."""
        pairs = set()
        for x in chain:
            if x.tag in ("P1", "P2", "Eval"):
                pairs.update(y for y in x.args if y.tag == "PbPair")
            elif x.tag == "PbPair":
                pairs.add(x)
        n = len(chain)
        for i, x in enumerate(chain):
            if x.tag in ("P1", "P2"):
                f1, f2 = x.args
                this, other = (f1, f2) if x.tag == "P1" else (f2, f1)
                seg = flatten(this)
                s = i - len(seg)
                if s >= 0 and chain[s:i] == tuple(seg):
                    alt = Term("P2" if x.tag == "P1" else "P1", f1, f2)
                    yield chain[:s] + tuple(flatten(other)) + (alt,) + chain[i + 1:]
            elif x.tag == "Eval":
                f1, g = x.args
                seg = flatten(g)
                s = i - len(seg)
                if seg and s >= 0 and chain[s:i] == tuple(seg):
                    yield chain[:s] + (Term("P1", f1, Term("PiMap", f1, g)),) + \
                        chain[i + 1:]
                # g split by a projection path r: Eval = r . g . Eval
                for r, leaf in _pair_paths(g, 3):
                    if leaf.tag == "Id":
                        yield chain[:i] + r + (
                            Term("P1", f1, Term("PiMap", f1, g)),) + chain[i + 1:]
            if x.tag in ("P1", "P2"):
                # a component of h read off the square h . P1 = f2 . P2:
                # q . P1 = r . f2 . P2 whenever q = r . h for a path r of
                # projections into nested pairings (q may be an identity)
                f1, f2 = x.args
                h, other = (f1, f2) if x.tag == "P1" else (f2, f1)
                alt = Term("P2" if x.tag == "P1" else "P1", f1, f2)
                for r, leaf in _pair_paths(h, 3):
                    L = tuple(flatten(leaf))
                    s = i - len(L)
                    if s >= 0 and chain[s:i] == L:
                        yield chain[:s] + r + tuple(flatten(other)) + (alt,) + \
                            chain[i + 1:]
            if x.tag in ("P1", "P2"):
                # the leg opposite a PiMap(h, g) . q: through Eval, h's side
                # of the pullback factors through g
                f1, f2 = x.args
                h, other = (f1, f2) if x.tag == "P1" else (f2, f1)
                for oc in _unfold_points(flatten(other)):
                    if oc and oc[0].tag == "PiMap" and oc[0].args[0] is h:
                        g = oc[0].args[1]
                        alt = Term("P2" if x.tag == "P1" else "P1", f1, f2)
                        yield chain[:i] + tuple(flatten(g)) + (
                            Term("Eval", h, g),
                            Term("PbPair", h, oc[0], x,
                                 build(list(oc[1:]) + [alt], dom(alt)))) + \
                            chain[i + 1:]
            if x.tag == "PiMap" and x.args[0].tag == "Id":
                # Pi along an identity: PiMap = g . Eval . <PiMap, id>
                f1, g = x.args
                yield chain[:i] + tuple(flatten(g)) + (
                    Term("Eval", f1, g),
                    Term("PbPair", f1, x, x, Id(dom(x)))) + chain[i + 1:]
            if i + 1 < n and x.tag in ("P1", "P2") and chain[i + 1].tag == "PbPair":
                pr = chain[i + 1]
                if pr.args[:2] == x.args:
                    k = 2 if x.tag == "P1" else 3
                    yield chain[:i] + tuple(flatten(pr.args[k])) + chain[i + 2:]
        for pr in pairs:
            g1, g2 = pr.args[:2]
            for k, p in ((2, "P1"), (3, "P2")):
                seg = tuple(flatten(pr.args[k]))
                if not seg:
                    continue
                L = len(seg)
                for s in range(0, n - L + 1):
                    if chain[s:s + L] == seg:
                        yield chain[:s] + (Term(p, g1, g2), pr) + chain[s + L:]

    def _succ(self, x, d):
        # each move, and its normal form when that differs
        for y in self._moves(x):
            yield y
            z = self._side_nf(y, d)
            if z is not None and z != y:
                yield z

    def _side_nf(self, c, d, cap=2000):
        """Normal form of a search candidate under its own step cap, so
        the search does not eat the caller's rewrite budget."""
        steps, budget = self.steps, self.budget
        self.steps, self.budget = 0, cap
        try:
            return tuple(flatten(self.nf(build(list(c), d))))
        except BudgetExceeded:
            return None
        finally:
            self.steps, self.budget = steps, budget

    def _square_search(self, t, u, limit=400):
        d = dom(t)
        seen_t, seen_u = {tuple(flatten(t))}, {tuple(flatten(u))}
        ft, fu = list(seen_t), list(seen_u)
        for _ in range(8):
            if seen_t & seen_u:
                return True
            if len(seen_t) + len(seen_u) > limit:
                break
            nt = [y for x in ft for y in self._succ(x, d) if y not in seen_t]
            seen_t.update(nt)
            nu = [y for x in fu for y in self._succ(x, d) if y not in seen_u]
            seen_u.update(nu)
            ft, fu = nt, nu
        if seen_t & seen_u:
            return True
        nt = {self._side_nf(c, d) for c in seen_t}
        nt.discard(None)
        return any(self._side_nf(c, d) in nt for c in seen_u)

class Congruence:
    """Union-find with congruence propagation over interned terms."""

    def __init__(self):
        self.parent = {}
        self.terms = []

    def add(self, t):
        if t in self.parent:
            return
        self.parent[t] = t
        self.terms.append(t)
        for a in t.args:
            if isinstance(a, Term):
                self.add(a)

    def find(self, t):
        while self.parent[t] is not t:
            self.parent[t] = self.parent[self.parent[t]]
            t = self.parent[t]
        return t

    def merge(self, a, b):
        self.add(a)
        self.add(b)
        self._union(a, b)

    def _union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra is not rb:
            self.parent[ra] = rb

    def _sig(self, t):
        return (t.tag,) + tuple(self.find(a) if isinstance(a, Term) else a
                                for a in t.args)

    def same(self, a, b):
        changed = True
        while changed:
            changed = False
            seen = {}
            for t in self.terms:
                if not t.args:
                    continue
                s = self._sig(t)
                o = seen.get(s)
                if o is None:
                    seen[s] = t
                elif self.find(o) is not self.find(t):
                    self._union(o, t)
                    changed = True
        return self.find(a) is self.find(b)


# -- public API --------------------------------------------------------------

def engine_for(P, budget=DEFAULT_BUDGET):
    key = ("engine", len(P.facts),
           len(P.origin.base.facts) if P.is_lift else 0)
    E = P.cache.get(key)
    if E is None:
        E = Engine(P, budget)
        P.cache[key] = E
    E.budget = budget
    if E.base_engine is not None:
        E.base_engine.budget = budget
    E.tracing = False
    return E


def normalize(t, P, budget=DEFAULT_BUDGET, trace=None):
    """Normal form of t.  Raises BudgetExceeded (carrying best-so-far)."""
    if trace is not None:
        E = Engine(P, budget, tracing=True)
        r = E.normalize(t)
        trace.extend(E.trace)
        return r
    return engine_for(P, budget).normalize(t)


def normalize_report(t, P, budget=DEFAULT_BUDGET):
    """(term, exceeded_flag)."""
    try:
        return normalize(t, P, budget), False
    except BudgetExceeded as e:
        return e.best, True


def decide_equal(t, u, P, budget=DEFAULT_BUDGET, models=None, trace=False):
    """Three-valued equality of two parallel terms (or two object terms)."""
    if t.is_mor != u.is_mor:
        raise BoundaryMismatch("comparing an object with a morphism")
    if t.is_mor and boundary(t) != boundary(u):
        E0 = engine_for(P, budget)
        try:
            bt = tuple(E0.normalize(x) for x in boundary(t))
            bu = tuple(E0.normalize(x) for x in boundary(u))
        except BudgetExceeded:
            bt, bu = None, ()
        if bt != bu:
            raise BoundaryMismatch("%s vs %s" % (show(t), show(u)))
    E = Engine(P, budget, tracing=True) if trace else engine_for(P, budget)
    try:
        E.steps = 0
        a, b = E.nf(t), E.nf(u)
        same = a is b or (t.is_mor and E.equal(a, b))
    except BudgetExceeded as ex:
        return Unknown("budget of %d rewrite steps exhausted" % ex.steps, E.trace)
    if same:
        return Equal(E.trace)
    if models:
        from .fin_lcc import countermodel_search
        hit = countermodel_search(t, u, P, models)
        if hit is not None:
            return Distinct(*hit)
    return Unknown("no derivation and no separating finite model", E.trace)


def register_fact(P, pair):
    """Add t = u to P's closure state (equality reflection)."""
    t, u = pair
    if boundary(t) != boundary(u):
        E = engine_for(P)
        if tuple(map(E.normalize, boundary(t))) != \
                tuple(map(E.normalize, boundary(u))):
            raise BoundaryMismatch("%s vs %s" % (show(t), show(u)))
    if t is u:
        return P
    P.facts.append((t, u))
    return P


def rule_names():
    return ["tm2", "tm2-sub", "mark-tm", "pb0", "pb2β", "pb2η", "pb-nat",
            "pi0", "pi2-tri", "pi2β", "pi2η", "pi-nat", "unit", "assoc",
            "mark-pb", "mark-pi", "lift-comp", "lift-id", "eq"]
