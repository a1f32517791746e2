"""Finite marked categories: fibrancy checking, canonical lcc structure on
finite (necessarily preorder) lcc categories, and evaluation of terms.
"""
import itertools
import json

from .term_core import Functor, TargetRejects, apply_functor


class NotLcc(Exception):
    def __init__(self, msg, witness=None):
        Exception.__init__(self, msg)
        self.witness = witness


class EquationFails(Exception):
    pass


class FinCatError(Exception):
    pass


FORMAT = "lccdtt.fincat/1"


class FinCat:
    """A finite category given by explicit tables.

    ``arrows`` maps an arrow name to (dom, cod); ``compose`` maps (g, f) to
    g.f for composable pairs; ``identity`` maps objects to arrow names.
    Markings: ``tm`` objects, ``pb`` tuples (q1, q2, f1, f2) and ``pi``
    tuples (f1, g, f2, p1, p2, e) of arrow names.
    """

    def __init__(self, objects, arrows, compose, identity, tm=(), pb=(),
                 pi=(), name=None):
        self.objects = list(objects)
        self.arrows = dict(arrows)
        self.compose = dict(compose)
        self.identity = dict(identity)
        self.tm = [x for x in tm]
        self.pb = [tuple(m) for m in pb]
        self.pi = [tuple(m) for m in pi]
        self.name = name
        self._hom = {}
        for a, (d, c) in self.arrows.items():
            self._hom.setdefault((d, c), []).append(a)
        self.validate()

    def hom(self, x, y):
        return self._hom.get((x, y), [])

    def dom(self, a):
        return self.arrows[a][0]

    def cod(self, a):
        return self.arrows[a][1]

    def comp(self, g, f):
        return self.compose[(g, f)]

    def validate(self):
        obs = set(self.objects)
        if len(obs) != len(self.objects):
            raise FinCatError("duplicate objects")
        for a, (d, c) in self.arrows.items():
            if d not in obs or c not in obs:
                raise FinCatError("arrow %s has unknown endpoints" % a)
        for x in self.objects:
            i = self.identity.get(x)
            if i is None or self.arrows.get(i) != (x, x):
                raise FinCatError("missing identity on %s" % x)
        for g, (gd, gc) in self.arrows.items():
            for f in self.hom_into(gd):
                h = self.compose.get((g, f))
                if h is None or self.arrows.get(h) != (self.dom(f), gc):
                    raise FinCatError("composition %s.%s missing or ill-typed"
                                      % (g, f))
        for a, (d, c) in self.arrows.items():
            if self.compose[(a, self.identity[d])] != a or \
                    self.compose[(self.identity[c], a)] != a:
                raise FinCatError("identity law fails at %s" % a)
        for h, (hd, hc) in self.arrows.items():
            for g in self.hom_into(hd):
                for f in self.hom_into(self.dom(g)):
                    if self.comp(h, self.comp(g, f)) != \
                            self.comp(self.comp(h, g), f):
                        raise FinCatError("associativity fails at %s,%s,%s"
                                          % (h, g, f))
        for x in self.tm:
            if x not in obs:
                raise FinCatError("Tm marking on unknown object %s" % x)
        for m in self.pb:
            q1, q2, f1, f2 = m
            self._need_arrows(m)
            if not (self.cod(q1) == self.dom(f1) and self.cod(q2) == self.dom(f2)
                    and self.dom(q1) == self.dom(q2)
                    and self.cod(f1) == self.cod(f2)):
                raise FinCatError("Pb marking %r has the wrong shape" % (m,))
        for m in self.pi:
            f1, g, f2, p1, p2, e = m
            self._need_arrows(m)
            ok = (self.cod(g) == self.dom(f1) and self.cod(f2) == self.cod(f1)
                  and self.cod(p1) == self.dom(f1) and self.cod(p2) == self.dom(f2)
                  and self.dom(p1) == self.dom(p2) == self.dom(e)
                  and self.cod(e) == self.dom(g))
            if not ok:
                raise FinCatError("Pi marking %r has the wrong shape" % (m,))

    def _need_arrows(self, m):
        for a in m:
            if a not in self.arrows:
                raise FinCatError("marking mentions unknown arrow %s" % a)

    def hom_into(self, y):
        return [a for a, (d, c) in self.arrows.items() if c == y]

    @property
    def is_preorder(self):
        return all(len(v) <= 1 for v in self._hom.values())

    @classmethod
    def from_poset(cls, elements, leq, markings=None, name=None):
        """Category of a finite poset; ``leq`` pairs are closed reflexively
        and transitively.  ``markings`` is "all" or a dict with tm list,
        pb entries [w, a, b, c] and pi entries [a, b, c, p]."""
        el = list(elements)
        rel = {(x, x) for x in el} | {tuple(p) for p in leq}
        changed = True
        while changed:
            changed = False
            for (a, b) in list(rel):
                for (c, d) in list(rel):
                    if b == c and (a, d) not in rel:
                        rel.add((a, d))
                        changed = True
        for (a, b) in rel:
            if a != b and (b, a) in rel:
                raise FinCatError("not antisymmetric: %s, %s" % (a, b))
        arr = {poset_arrow(a, b): (a, b) for (a, b) in rel}
        compose = {}
        for (b, c) in rel:
            for (a, b2) in rel:
                if b2 == b:
                    compose[(poset_arrow(b, c), poset_arrow(a, b))] = \
                        poset_arrow(a, c)
        ident = {x: poset_arrow(x, x) for x in el}
        C = cls(el, arr, compose, ident, name=name)
        if markings == "all":
            return mark_all(C)
        if markings:
            C = _poset_markings(C, markings)
        return C

    def with_markings(self, tm=None, pb=None, pi=None):
        return FinCat(self.objects, self.arrows, self.compose, self.identity,
                      self.tm if tm is None else tm,
                      self.pb if pb is None else pb,
                      self.pi if pi is None else pi, name=self.name)


def poset_arrow(a, b):
    return "%s<=%s" % (a, b)


def _poset_markings(C, mk):
    A = poset_arrow
    tm = list(mk.get("tm", []))
    pb = [(A(w, a), A(w, b), A(a, c), A(b, c)) for w, a, b, c in mk.get("pb", [])]
    pi = []
    for a, b, c, p in mk.get("pi", []):
        ws = pullback_squares(C, A(a, c), A(p, c))
        if not ws:
            raise FinCatError("no pullback under Pi marking %r" % ([a, b, c, p],))
        q1, q2 = ws[0]
        w = C.dom(q1)
        pi.append((A(a, c), A(b, a), A(p, c), q1, q2, A(w, b)))
    return C.with_markings(tm, pb, pi)


# -- universal properties ----------------------------------------------------

def is_terminal(C, x):
    return all(len(C.hom(y, x)) == 1 for y in C.objects)


def commutes(C, q1, q2, f1, f2):
    return C.comp(f1, q1) == C.comp(f2, q2)


def is_pullback(C, q1, q2, f1, f2):
    if not commutes(C, q1, q2, f1, f2):
        return False
    W, A, B = C.dom(q1), C.dom(f1), C.dom(f2)
    for X in C.objects:
        for x1 in C.hom(X, A):
            for x2 in C.hom(X, B):
                if C.comp(f1, x1) != C.comp(f2, x2):
                    continue
                n = sum(1 for u in C.hom(X, W)
                        if C.comp(q1, u) == x1 and C.comp(q2, u) == x2)
                if n != 1:
                    return False
    return True


def pullback_squares(C, f1, f2):
    A, B = C.dom(f1), C.dom(f2)
    out = []
    for W in C.objects:
        for q1 in C.hom(W, A):
            for q2 in C.hom(W, B):
                if is_pullback(C, q1, q2, f1, f2):
                    out.append((q1, q2))
    return out


def _mediator(C, q1, q2, x1, x2):
    for u in C.hom(C.dom(x1), C.dom(q1)):
        if C.comp(q1, u) == x1 and C.comp(q2, u) == x2:
            return u
    return None


def is_pi(C, f1, g, f2, p1, p2, e):
    if C.cod(g) != C.dom(f1) or not is_pullback(C, p1, p2, f1, f2):
        return False
    if C.comp(g, e) != p1:
        return False
    Cc, P = C.cod(f1), C.dom(f2)
    for Q in C.objects:
        for h in C.hom(Q, Cc):
            sq = pullback_squares(C, f1, h)
            if not sq:
                return False
            r1, r2 = sq[0]
            for e2 in C.hom(C.dom(r1), C.dom(g)):
                if C.comp(g, e2) != r1:
                    continue
                n = 0
                for u in C.hom(Q, P):
                    if C.comp(f2, u) != h:
                        continue
                    m = _mediator(C, p1, p2, r1, C.comp(u, r2))
                    if m is not None and C.comp(e, m) == e2:
                        n += 1
                if n != 1:
                    return False
    return True


def pi_diagrams(C, f1, g):
    Cc = C.cod(f1)
    out = []
    for f2 in C.hom_into(Cc):
        for p1, p2 in pullback_squares(C, f1, f2):
            for e in C.hom(C.dom(p1), C.dom(g)):
                if is_pi(C, f1, g, f2, p1, p2, e):
                    out.append((f1, g, f2, p1, p2, e))
    return out


def _cospans(C):
    for f1 in C.arrows:
        for f2 in C.arrows:
            if C.cod(f1) == C.cod(f2):
                yield f1, f2


def _pi_inputs(C):
    for f1 in C.arrows:
        for g in C.hom_into(C.dom(f1)):
            yield f1, g


def mark_all(C):
    """Mark exactly the universal diagrams of each shape."""
    tm = [x for x in C.objects if is_terminal(C, x)]
    pb = sorted({(q1, q2, f1, f2) for f1, f2 in _cospans(C)
                 for q1, q2 in pullback_squares(C, f1, f2)})
    pi = sorted({d for f1, g in _pi_inputs(C) for d in pi_diagrams(C, f1, g)})
    return C.with_markings(tm, pb, pi)


class Report:
    def __init__(self, violations):
        self.violations = list(violations)

    @property
    def ok(self):
        return not self.violations

    def __bool__(self):
        return self.ok

    def __repr__(self):
        return "Report(ok=%s, %d violations)" % (self.ok, len(self.violations))

    def text(self):
        if self.ok:
            return "fibrant"
        return "not fibrant\n" + "\n".join("  - " + v for v in self.violations)


def is_fibrant(C):
    """Markings must be exactly the universal diagrams of each shape, and
    every shape must have a universal solution."""
    v = []
    terms = [x for x in C.objects if is_terminal(C, x)]
    if not terms:
        v.append("no terminal object")
    for x in terms:
        if x not in C.tm:
            v.append("terminal object not marked: %s" % x)
    for x in C.tm:
        if x not in terms:
            v.append("marked Tm object is not terminal: %s" % x)
    universal_pb = set()
    for f1, f2 in _cospans(C):
        sq = pullback_squares(C, f1, f2)
        if not sq:
            v.append("no pullback for cospan (%s, %s)" % (f1, f2))
        for q1, q2 in sq:
            universal_pb.add((q1, q2, f1, f2))
    marked_pb = set(C.pb)
    for m in C.pb:
        if not commutes(C, *m):
            v.append("marked Pb square does not commute: %r" % (m,))
        elif m not in universal_pb:
            v.append("marked Pb square is not a pullback: %r" % (m,))
    for m in sorted(universal_pb - marked_pb):
        v.append("pullback square not marked: %r" % (m,))
    universal_pi = set()
    for f1, g in _pi_inputs(C):
        ds = pi_diagrams(C, f1, g)
        if not ds:
            v.append("no dependent product for (%s, %s)" % (f1, g))
        universal_pi.update(ds)
    for m in C.pi:
        if m not in universal_pi:
            v.append("marked Pi diagram is not universal: %r" % (m,))
    for m in sorted(universal_pi - set(C.pi)):
        v.append("dependent product diagram not marked: %r" % (m,))
    return Report(v)


# -- canonical structure -----------------------------------------------------

class FinStrictLcc:
    """Finite lcc preorder with least-index canonical choices.

    Objects are indices; an arrow is the pair (dom, cod).  Also a StrictLcc
    target for ``apply_functor``.
    """

    def __init__(self, names, leq, name=None):
        self.names = list(names)
        self.n = len(self.names)
        self.leq = [list(r) for r in leq]
        self.name = name
        n, le = self.n, self.leq
        rng = range(n)
        tops = [t for t in rng if all(le[x][t] for x in rng)]
        if not tops:
            raise NotLcc("no terminal object")
        self.top = tops[0]
        self.meet = [[None] * n for _ in rng]
        for a in rng:
            for b in rng:
                for w in rng:
                    if le[w][a] and le[w][b] and all(
                            le[x][w] for x in rng if le[x][a] and le[x][b]):
                        self.meet[a][b] = w
                        break
                if self.meet[a][b] is None:
                    raise NotLcc("no pullback", (a, b))
        self.pi = {}
        for c in rng:
            for a in rng:
                if not le[a][c]:
                    continue
                for b in rng:
                    if not le[b][a]:
                        continue
                    for p in rng:
                        if le[p][c] and all(
                                le[x][p] == le[self.meet[x][a]][b]
                                for x in rng if le[x][c]):
                            self.pi[(a, c, b)] = p
                            break
                    if (a, c, b) not in self.pi:
                        raise NotLcc("no dependent product", (a, c, b))

    def __repr__(self):
        return "FinStrictLcc(%s, %d objects)" % (self.name, self.n)

    def index(self, name):
        return self.names.index(name)

    def arrow(self, d, c):
        if not self.leq[d][c]:
            raise TargetRejects("no arrow %s -> %s in %s"
                                % (self.names[d], self.names[c], self.name))
        return (d, c)

    def verify(self):
        """Re-check every chosen universal property exhaustively."""
        rng, le = range(self.n), self.leq
        assert all(le[x][self.top] for x in rng)
        for a in rng:
            for b in rng:
                w = self.meet[a][b]
                for x in rng:
                    assert le[x][w] == (le[x][a] and le[x][b])
        for (a, c, b), p in self.pi.items():
            for x in rng:
                if le[x][c]:
                    assert le[x][p] == le[self.meet[x][a]][b]
        return True

    # StrictLcc target interface
    def one(self):
        return self.top

    def pb_obj(self, f1, f2):
        if f1[1] != f2[1]:
            raise TargetRejects("not a cospan")
        return self.meet[f1[0]][f2[0]]

    def pi_obj(self, f1, g):
        if g[1] != f1[0]:
            raise TargetRejects("not a Pi input")
        return self.pi[(f1[0], f1[1], g[0])]

    def ident(self, a):
        return (a, a)

    def compose(self, g, f):
        if f[1] != g[0]:
            raise TargetRejects("not composable")
        return (f[0], g[1])

    def bang(self, a):
        return (a, self.top)

    def p1(self, f1, f2):
        return self.arrow(self.pb_obj(f1, f2), f1[0])

    def p2(self, f1, f2):
        return self.arrow(self.pb_obj(f1, f2), f2[0])

    def pb_pair(self, f1, f2, q1, q2):
        return self.arrow(q1[0], self.pb_obj(f1, f2))

    def pi_map(self, f1, g):
        return self.arrow(self.pi_obj(f1, g), f1[1])

    def eval_(self, f1, g):
        return self.arrow(self.pb_obj(f1, self.pi_map(f1, g)), g[0])

    def curry(self, f1, g, f2, e):
        return self.arrow(f2[0], self.pi_obj(f1, g))

    def mark(self, tag, args):
        return (tag,) + tuple(args)

    def mark_inv(self, m):
        tag = m[0]
        if tag == "MkTm":
            return self.arrow(self.top, m[1])
        if tag == "MkPb":
            c = self.pb_pair(*m[1:])
        else:
            c = self.curry(*m[1:])
        return self.arrow(c[1], c[0])


def canonicalize(C):
    """Canonical lcc structure on a finite category (markings ignored)."""
    if not any(is_terminal(C, x) for x in C.objects):
        raise NotLcc("no terminal object")
    for f1, f2 in _cospans(C):
        if not pullback_squares(C, f1, f2):
            raise NotLcc("cospan without pullback", (f1, f2))
    for f1, g in _pi_inputs(C):
        if not pi_diagrams(C, f1, g):
            raise NotLcc("no dependent product", (f1, g))
    if not C.is_preorder:
        x, y = next(k for k, v in C._hom.items() if len(v) > 1)
        raise NotLcc("parallel arrows in a finite lcc category", (x, y))
    idx = {x: i for i, x in enumerate(C.objects)}
    leq = [[False] * len(C.objects) for _ in C.objects]
    for d, c in C.arrows.values():
        leq[idx[d]][idx[c]] = True
    M = FinStrictLcc(C.objects, leq, name=C.name)
    M.verify()
    return M


# -- built-in models ---------------------------------------------------------

def _powerset_poset(k):
    els = list(itertools.product([0, 1], repeat=k))
    names = ["".join(map(str, e)) for e in els]
    leq = [(names[i], names[j]) for i, a in enumerate(els)
           for j, b in enumerate(els) if all(x <= y for x, y in zip(a, b))]
    return names, leq


def _model_defs():
    d = {
        "chain2": (["0", "1"], [("0", "1")]),
        "chain3": (["0", "a", "1"], [("0", "a"), ("a", "1")]),
        "diamond": (["0", "x", "y", "1"],
                    [("0", "x"), ("0", "y"), ("x", "1"), ("y", "1")]),
    }
    d["cube"] = _powerset_poset(3)
    return d


_MODELS = {}


def builtin_model(name):
    if name not in _MODELS:
        defs = _model_defs()
        if name not in defs:
            raise KeyError("unknown model %r (have %s)"
                           % (name, ", ".join(sorted(defs))))
        els, leq = defs[name]
        _MODELS[name] = canonicalize(FinCat.from_poset(els, leq, name=name))
    return _MODELS[name]


MODEL_NAMES = ("chain2", "chain3", "diamond", "cube")
DEFAULT_MODELS = ("chain2", "chain3", "diamond")


def builtin_models(names=DEFAULT_MODELS):
    return [builtin_model(n) for n in names]


# -- evaluation --------------------------------------------------------------

def eval_term(F, t):
    """Evaluate a term through a functor into a FinStrictLcc."""
    return apply_functor(F, t)


def assignments(P, M, cap=100000):
    """Admissible generator assignments of P into M, as functors.

    Objects range over all elements; each arrow generator is forced (M is a
    preorder) and the assignment is dropped when no such arrow exists or a
    marking is not sent to a universal diagram.
    """
    gens = list(P.obj_gens)
    count = 0
    for combo in itertools.product(range(M.n), repeat=len(gens)):
        if count >= cap:
            return
        count += 1
        F = Functor(P, M, dict(zip(gens, combo)), {}, name="assign")
        try:
            for n, g in P.mor_gens.items():
                d = apply_functor(F, g.args[1])
                c = apply_functor(F, g.args[2])
                F.mor_map[n] = M.arrow(d, c)
            for m in P.markings:
                M.mark_inv(apply_functor(F, m))
            for l, r in P.equations:
                if apply_functor(F, l) != apply_functor(F, r):
                    raise EquationFails((l, r))
        except TargetRejects:
            continue
        yield F


def countermodel_search(t, u, P, models, cap=100000):
    """First (model, assignment) separating t from u, or None."""
    for M in models:
        for F in assignments(P, M, cap):
            try:
                a, b = apply_functor(F, t), apply_functor(F, u)
            except TargetRejects:
                continue
            if a != b:
                return M, F
    return None


def describe_assignment(M, F):
    env = {n: M.names[i] for n, i in F.obj_map.items()}
    return "%s: %s" % (M.name, ", ".join("%s=%s" % kv for kv in sorted(env.items())))


# -- I/O ---------------------------------------------------------------------

def fincat_from_json(d):
    if isinstance(d, str):
        d = json.loads(d)
    if d.get("format") != FORMAT:
        raise FinCatError("unsupported format %r" % d.get("format"))
    name = d.get("name")
    if "poset" in d:
        p = d["poset"]
        return FinCat.from_poset(p["elements"], p.get("leq", []),
                                 d.get("markings"), name=name)
    arrows = {a["name"]: (a["dom"], a["cod"]) for a in d["arrows"]}
    ident = d.get("identities") or {}
    for x in d["objects"]:
        if x not in ident:
            ident[x] = "id_" + x
            arrows[ident[x]] = (x, x)
    compose = {(g, f): h for g, f, h in d.get("compose", [])}
    for a, (dd, cc) in list(arrows.items()):
        compose.setdefault((a, ident[dd]), a)
        compose.setdefault((ident[cc], a), a)
    mk = d.get("markings") or {}
    C = FinCat(d["objects"], arrows, compose, ident, name=name)
    if mk == "all":
        return mark_all(C)
    return C.with_markings(mk.get("tm", []), mk.get("pb", []), mk.get("pi", []))


def fincat_to_json(C):
    return {
        "format": FORMAT,
        "name": C.name,
        "objects": list(C.objects),
        "arrows": [{"name": a, "dom": d, "cod": c}
                   for a, (d, c) in sorted(C.arrows.items())],
        "identities": dict(C.identity),
        "compose": sorted([g, f, h] for (g, f), h in C.compose.items()),
        "markings": {"tm": list(C.tm), "pb": [list(m) for m in C.pb],
                     "pi": [list(m) for m in C.pi]},
    }


def to_dot(C, M=None):
    """DOT of the non-identity arrows; with M, the chosen canonical
    structure is added as comments and the terminal is double-circled."""
    ids = set(C.identity.values())
    lines = ["digraph %s {" % _dot_id(C.name or "C")]
    term = M.names[M.top] if M is not None else None
    for x in C.objects:
        shape = "doublecircle" if x == term or x in C.tm else "circle"
        lines.append('  %s [shape=%s];' % (_dot_id(x), shape))
    for a, (d, c) in sorted(C.arrows.items()):
        if a in ids:
            continue
        lines.append('  %s -> %s [label=%s];' % (_dot_id(d), _dot_id(c), _dot_id(a)))
    if M is not None:
        for a in range(M.n):
            for b in range(a, M.n):
                lines.append("  // pb %s %s = %s" % (M.names[a], M.names[b],
                                                      M.names[M.meet[a][b]]))
        for (a, c, b), p in sorted(M.pi.items()):
            lines.append("  // pi %s->%s of %s = %s" % (
                M.names[a], M.names[c], M.names[b], M.names[p]))
    lines.append("}")
    return "\n".join(lines)


def _dot_id(s):
    return '"%s"' % str(s).replace('"', '\\"')
