"""Hash-consed object and morphism terms over presentations of strict lcc
categories, boundary inference, functor application and the lift F(G(-)).

Morphism generators carry their own boundary (``MGen(name, dom, cod)``), so
the boundary of any term is a function of the term alone; a presentation is
only consulted to check that generators and markings belong to it.
"""
import json
import weakref


class TermError(Exception):
    pass


class IllFormed(TermError):
    def __init__(self, msg, subterm=None):
        TermError.__init__(self, msg)
        self.subterm = subterm


class BoundaryMismatch(TermError):
    pass


class DuplicateName(TermError):
    pass


class MalformedMarking(TermError):
    pass


class AlreadyLifted(TermError):
    pass


class TargetRejects(TermError):
    pass


OBJ_TAGS = frozenset(["Gen", "One", "PbObj", "PiObj", "Lifted"])
MOR_TAGS = frozenset(["MGen", "Id", "Comp", "Bang", "P1", "P2", "PbPair",
                      "PiMap", "Eval", "Curry", "MarkInv", "LiftedGen"])
MARK_TAGS = frozenset(["MkTm", "MkPb", "MkPi"])

_TABLE = weakref.WeakValueDictionary()


class Term:
    """An interned term node.  Structural equality is identity."""

    __slots__ = ("tag", "args", "size", "__weakref__")

    def __new__(cls, tag, *args):
        key = (tag,) + args
        t = _TABLE.get(key)
        if t is not None:
            return t
        t = object.__new__(cls)
        t.tag = tag
        t.args = args
        t.size = 1 + sum(a.size for a in args if isinstance(a, Term))
        _TABLE[key] = t
        return t

    @property
    def is_obj(self):
        return self.tag in OBJ_TAGS

    @property
    def is_mor(self):
        return self.tag in MOR_TAGS

    def __repr__(self):
        return show(self)

    def __reduce__(self):
        return (Term, (self.tag,) + self.args)


def show(t):
    tag, a = t.tag, t.args
    if tag == "Gen":
        return a[0]
    if tag == "MGen":
        return a[0]
    if tag == "One":
        return "1"
    if tag == "Comp":
        return "(%s . %s)" % (show(a[0]), show(a[1]))
    if tag == "Id":
        return "id[%s]" % show(a[0])
    if tag == "Bang":
        return "![%s]" % show(a[0])
    return "%s(%s)" % (tag, ", ".join(show(x) for x in a))


# -- boundaries ------------------------------------------------------------

_BOUNDARY = {}


def boundary(t):
    """(dom, cod) of a morphism term; raises IllFormed on violations."""
    b = _BOUNDARY.get(t)
    if b is None:
        b = _compute_boundary(t)
        _BOUNDARY[t] = b
    return b


def dom(t):
    return boundary(t)[0]


def cod(t):
    return boundary(t)[1]


def _need(cond, msg, t):
    if not cond:
        raise IllFormed(msg + ": " + show(t), t)


def _compute_boundary(t):
    tag, a = t.tag, t.args
    if tag == "MGen":
        return a[1], a[2]
    if tag == "Id":
        return a[0], a[0]
    if tag == "Comp":
        g, f = a
        _need(cod(f) is dom(g), "composite of non-composable arrows", t)
        return dom(f), cod(g)
    if tag == "Bang":
        return a[0], ONE
    if tag == "P1":
        _need(cod(a[0]) is cod(a[1]), "pullback of non-cospan", t)
        return Term("PbObj", a[0], a[1]), dom(a[0])
    if tag == "P2":
        _need(cod(a[0]) is cod(a[1]), "pullback of non-cospan", t)
        return Term("PbObj", a[0], a[1]), dom(a[1])
    if tag == "PbPair":
        f1, f2, q1, q2 = a
        _need(cod(f1) is cod(f2), "pullback of non-cospan", t)
        _need(dom(q1) is dom(q2), "pairing legs with different domains", t)
        _need(cod(q1) is dom(f1) and cod(q2) is dom(f2),
              "pairing legs do not land on the cospan", t)
        return dom(q1), Term("PbObj", f1, f2)
    if tag == "PiMap":
        f1, g = a
        _need(cod(g) is dom(f1), "dependent product of non-composable pair", t)
        return Term("PiObj", f1, g), cod(f1)
    if tag == "Eval":
        f1, g = a
        _need(cod(g) is dom(f1), "dependent product of non-composable pair", t)
        return Term("PbObj", f1, Term("PiMap", f1, g)), dom(g)
    if tag == "Curry":
        f1, g, f2, e = a
        _need(cod(g) is dom(f1), "dependent product of non-composable pair", t)
        _need(cod(f2) is cod(f1), "competitor does not share the base", t)
        _need(dom(e) is Term("PbObj", f1, f2) and cod(e) is dom(g),
              "competitor evaluation has the wrong boundary", t)
        return dom(f2), Term("PiObj", f1, g)
    if tag == "MarkInv":
        c = comparison(a[0])
        d, k = boundary(c)
        return k, d
    if tag == "LiftedGen":
        d, k = boundary(a[0])
        return Term("Lifted", d), Term("Lifted", k)
    raise IllFormed("not a morphism term: " + show(t), t)


def check_obj(x):
    """Validate an object term (local invariants, recursively)."""
    tag, a = x.tag, x.args
    if tag in ("Gen", "One"):
        return x
    if tag == "PbObj":
        _need(cod(a[0]) is cod(a[1]), "pullback of non-cospan", x)
        return x
    if tag == "PiObj":
        _need(cod(a[1]) is dom(a[0]), "dependent product of non-composable pair", x)
        return x
    if tag == "Lifted":
        _need(a[0].is_obj and a[0].tag != "Lifted", "nested lift", x)
        check_obj(a[0])
        return x
    raise IllFormed("not an object term: " + show(x), x)


def comparison(m):
    """Comparison map of a marked diagram into the canonical universal one."""
    tag, a = m.tag, m.args
    if tag == "MkTm":
        return Term("Bang", a[0])
    if tag == "MkPb":
        return Term("PbPair", a[0], a[1], a[2], a[3])
    if tag == "MkPi":
        return Term("Curry", a[0], a[1], a[2], a[3])
    raise MalformedMarking("not a marking: " + show(m))


# -- smart constructors ----------------------------------------------------

ONE = Term("One")


def Gen(name):
    return Term("Gen", name)


def MGen(name, d, c):
    return Term("MGen", name, d, c)


def Id(a):
    return Term("Id", a)


def Comp(g, f):
    t = Term("Comp", g, f)
    boundary(t)
    return t


def comp(*fs):
    """Right-nested composite fs[0] . fs[1] . ... ; identities are kept."""
    t = fs[-1]
    for g in reversed(fs[:-1]):
        t = Comp(g, t)
    return t


def Bang(a):
    return Term("Bang", a)


def PbObj(f1, f2):
    return check_obj(Term("PbObj", f1, f2))


def PiObj(f1, g):
    return check_obj(Term("PiObj", f1, g))


def Lifted(x):
    return check_obj(Term("Lifted", x))


def _mk(tag, *args):
    t = Term(tag, *args)
    boundary(t)
    return t


def P1(f1, f2):
    return _mk("P1", f1, f2)


def P2(f1, f2):
    return _mk("P2", f1, f2)


def PbPair(f1, f2, q1, q2):
    return _mk("PbPair", f1, f2, q1, q2)


def PiMap(f1, g):
    return _mk("PiMap", f1, g)


def Eval(f1, g):
    return _mk("Eval", f1, g)


def Curry(f1, g, f2, e):
    return _mk("Curry", f1, g, f2, e)


def MarkInv(m):
    return _mk("MarkInv", m)


def LiftedGen(f):
    _need(f.is_mor and not _mentions_lift(f), "nested lift", f)
    return _mk("LiftedGen", f)


def MkTm(x):
    return Term("MkTm", x)


def MkPb(f1, f2, q1, q2):
    m = Term("MkPb", f1, f2, q1, q2)
    try:
        boundary(comparison(m))
    except IllFormed as e:
        raise MalformedMarking(str(e))
    return m


def MkPi(f1, g, f2, e):
    m = Term("MkPi", f1, g, f2, e)
    try:
        boundary(comparison(m))
    except IllFormed as err:
        raise MalformedMarking(str(err))
    return m


def _mentions_lift(t):
    if t.tag in ("Lifted", "LiftedGen"):
        return True
    return any(_mentions_lift(a) for a in t.args if isinstance(a, Term))


def subterms(t):
    """All Term nodes of t (including t), each once, children first."""
    seen, out, stack = set(), [], [(t, False)]
    while stack:
        x, done = stack.pop()
        if done:
            out.append(x)
            continue
        if x in seen:
            continue
        seen.add(x)
        stack.append((x, True))
        for a in reversed(x.args):
            if isinstance(a, Term) and a not in seen:
                stack.append((a, False))
    return out


# -- presentations ---------------------------------------------------------

class Free:
    kind = "free"

    def __repr__(self):
        return "Free()"


class Extension:
    kind = "extension"

    def __init__(self, parent, sigma, var):
        self.parent, self.sigma, self.var = parent, sigma, var

    def __repr__(self):
        return "Extension(%r, %s)" % (self.sigma, self.var.args[0])


class Lift:
    kind = "lift"

    def __init__(self, base):
        self.base = base

    def __repr__(self):
        return "Lift(...)"


class Presentation:
    """A finitely presented strict lcc category.

    Also serves as the syntactic StrictLcc target: its constructor methods
    build canonical terms.  ``facts`` is the mutable closure state used by
    equality reflection; everything else is fixed after construction.
    """

    def __init__(self, obj_gens, mor_gens, equations, markings, origin):
        self.obj_gens = tuple(obj_gens)
        self.mor_gens = dict(mor_gens)
        self.equations = tuple(equations)
        self.markings = tuple(markings)
        self.origin = origin
        self.facts = []
        self._gen_set = set(self.mor_gens.values())
        self._mark_set = set(self.markings)
        self._lift = None
        self.cache = {}

    def __repr__(self):
        return "Presentation(objs=%d, arrows=%d, eqs=%d, marks=%d, %r)" % (
            len(self.obj_gens), len(self.mor_gens), len(self.equations),
            len(self.markings), self.origin)

    @property
    def is_lift(self):
        return self.origin.kind == "lift"

    def has_marking(self, m):
        if m in self._mark_set:
            return True
        return self.is_lift and is_lift_marking(m)

    def tm_marked(self, x):
        if self.is_lift:
            return x is LIFTED_ONE
        return Term("MkTm", x) in self._mark_set

    # StrictLcc target interface
    def one(self):
        return ONE

    def pb_obj(self, f1, f2):
        return PbObj(f1, f2)

    def pi_obj(self, f1, g):
        return PiObj(f1, g)

    def ident(self, a):
        return Id(a)

    def compose(self, g, f):
        return Comp(g, f)

    def bang(self, a):
        return Bang(a)

    def p1(self, f1, f2):
        return P1(f1, f2)

    def p2(self, f1, f2):
        return P2(f1, f2)

    def pb_pair(self, f1, f2, q1, q2):
        return PbPair(f1, f2, q1, q2)

    def pi_map(self, f1, g):
        return PiMap(f1, g)

    def eval_(self, f1, g):
        return Eval(f1, g)

    def curry(self, f1, g, f2, e):
        return Curry(f1, g, f2, e)

    def mark(self, tag, args):
        return Term(tag, *args)

    def mark_inv(self, m):
        if not self.has_marking(m):
            raise TargetRejects("marking not realized in target: " + show(m))
        return MarkInv(m)


def mk_presentation(obj_gens=(), mor_gens=None, equations=(), markings=(),
                    origin=None):
    """Validate and build a presentation.

    ``mor_gens`` maps names to (dom, cod) pairs or to ready MGen terms.
    Realizing a Pb or Pi marking adds its commutation equation.
    """
    obj_gens = list(obj_gens)
    mor_gens = mor_gens or {}
    names = set()
    for n in obj_gens:
        if n in names:
            raise DuplicateName(n)
        names.add(n)
    gens = {}
    for n, spec in mor_gens.items():
        if n in names:
            raise DuplicateName(n)
        names.add(n)
        g = spec if isinstance(spec, Term) else MGen(n, spec[0], spec[1])
        if g.tag != "MGen" or g.args[0] != n:
            raise IllFormed("bad generator entry for " + n)
        gens[n] = g
    P = Presentation(obj_gens, gens, [], [], origin or Free())
    for n, g in gens.items():
        for x in g.args[1:]:
            if not isinstance(x, Term) or not x.is_obj:
                raise IllFormed("generator boundary is not an object: " + n)
            infer_obj(x, P)
    eqs = []
    for l, r in equations:
        if infer_boundary(l, P) is not infer_boundary(r, P) and \
                infer_boundary(l, P) != infer_boundary(r, P):
            raise BoundaryMismatch("%s vs %s" % (show(l), show(r)))
        eqs.append((l, r))
    marks = []
    for m in markings:
        if not isinstance(m, Term) or m.tag not in MARK_TAGS:
            raise MalformedMarking(repr(m))
        try:
            if m.tag == "MkTm":
                infer_obj(m.args[0], P)
            else:
                infer_boundary(comparison(m), P)
        except IllFormed as e:
            raise MalformedMarking(str(e))
        marks.append(m)
        if m.tag == "MkPb":
            f1, f2, q1, q2 = m.args
            eqs.append((Comp(f1, q1), Comp(f2, q2)))
        elif m.tag == "MkPi":
            f1, g, f2, e = m.args
            eqs.append((Comp(g, e), P1(f1, f2)))
    P.equations = tuple(eqs)
    P.markings = tuple(marks)
    P._mark_set = set(marks)
    return P


def _gen_ok(t, P):
    tag = t.tag
    if tag == "Gen":
        return t.args[0] in P.obj_gens
    if tag == "MGen":
        return t in P._gen_set
    if tag == "MarkInv":
        return P.has_marking(t.args[0])
    return True


def _check_over(t, P):
    if t.tag in ("Lifted", "LiftedGen"):
        if not P.is_lift:
            raise IllFormed("lifted term outside a lift presentation", t)
        base = P.origin.base
        if t.tag == "Lifted":
            infer_obj(t.args[0], base)
        else:
            infer_boundary(t.args[0], base)
        return
    if t.tag in MARK_TAGS:
        for a in t.args:
            _check_over(a, P)
        return
    if not _gen_ok(t, P):
        raise IllFormed("term mentions a foreign generator or marking", t)
    for a in t.args:
        if isinstance(a, Term):
            _check_over(a, P)


def infer_boundary(t, P=None):
    """(dom, cod) of t, checking that t is well formed over P."""
    if not isinstance(t, Term) or not t.is_mor:
        raise IllFormed("not a morphism term: %r" % (t,), t)
    if P is not None:
        key = ("wf", t)
        if key not in P.cache:
            _check_over(t, P)
            P.cache[key] = True
    return boundary(t)


def infer_obj(x, P=None):
    if not isinstance(x, Term) or not x.is_obj:
        raise IllFormed("not an object term: %r" % (x,), x)
    check_obj(x)
    for a in x.args:
        if isinstance(a, Term) and a.is_mor:
            boundary(a)
    if P is not None:
        key = ("wf", x)
        if key not in P.cache:
            _check_over(x, P)
            P.cache[key] = True
    return x


# -- functors --------------------------------------------------------------

class Functor:
    """Generator assignment extended homomorphically.

    ``hook(t, ap)`` may intercept any node (used for lifted leaves and
    marking inverses of weak data); it returns None to decline.
    """

    def __init__(self, source, target, obj_map, mor_map, strict=True,
                 hook=None, name=None):
        self.source = source
        self.target = target
        self.obj_map = dict(obj_map)
        self.mor_map = dict(mor_map)
        self.strict = strict
        self.hook = hook
        self.name = name
        self._memo = {}

    def __call__(self, t):
        return apply_functor(self, t)

    def __repr__(self):
        return "Functor(%s)" % (self.name or "")


def apply_functor(F, t):
    memo = F._memo
    r = memo.get(t)
    if r is not None:
        return r
    T = F.target
    hook = F.hook
    ap = F.__call__
    stack = [(t, False)]
    while stack:
        x, done = stack.pop()
        if x in memo:
            continue
        if done:
            memo[x] = _apply_node(F, T, x, memo)
            continue
        if hook is not None:
            r = hook(x, ap)
            if r is not None:
                memo[x] = r
                continue
        stack.append((x, True))
        for a in x.args:
            if isinstance(a, Term) and a not in memo:
                stack.append((a, False))
    return memo[t]


def _apply_node(F, T, t, memo):
    tag, a = t.tag, t.args
    ap = memo.__getitem__
    if tag == "Gen":
        try:
            return F.obj_map[a[0]]
        except KeyError:
            raise IllFormed("object generator not in functor source", t)
    if tag == "MGen":
        try:
            return F.mor_map[a[0]]
        except KeyError:
            raise IllFormed("morphism generator not in functor source", t)
    if tag == "One":
        return T.one()
    if tag == "PbObj":
        return T.pb_obj(ap(a[0]), ap(a[1]))
    if tag == "PiObj":
        return T.pi_obj(ap(a[0]), ap(a[1]))
    if tag == "Id":
        return T.ident(ap(a[0]))
    if tag == "Comp":
        return T.compose(ap(a[0]), ap(a[1]))
    if tag == "Bang":
        return T.bang(ap(a[0]))
    if tag == "P1":
        return T.p1(ap(a[0]), ap(a[1]))
    if tag == "P2":
        return T.p2(ap(a[0]), ap(a[1]))
    if tag == "PbPair":
        return T.pb_pair(*[ap(x) for x in a])
    if tag == "PiMap":
        return T.pi_map(ap(a[0]), ap(a[1]))
    if tag == "Eval":
        return T.eval_(ap(a[0]), ap(a[1]))
    if tag == "Curry":
        return T.curry(*[ap(x) for x in a])
    if tag in MARK_TAGS:
        return T.mark(tag, [ap(x) for x in a])
    if tag == "MarkInv":
        return T.mark_inv(ap(a[0]))
    raise IllFormed("functor cannot map lifted leaf without a hook", t)


def identity_functor(P):
    return Functor(P, P, {n: Gen(n) for n in P.obj_gens}, dict(P.mor_gens),
                   name="id")


def compose_functors(G, F):
    """G after F, computed on generators."""
    return Functor(F.source, G.target,
                   {n: apply_functor(G, x) for n, x in F.obj_map.items()},
                   {n: apply_functor(G, x) for n, x in F.mor_map.items()},
                   strict=F.strict and G.strict,
                   name="%s.%s" % (G.name or "G", F.name or "F"))


# -- the lift F(G(P)) --------------------------------------------------------

LIFTED_ONE = Term("Lifted", ONE)


def lift_presentation(P):
    """Lazy presentation F(G(P)): one generator per term of P."""
    if P.is_lift:
        raise AlreadyLifted("cannot lift a lift presentation")
    if P._lift is None:
        L = Presentation((), {}, (), (), Lift(P))
        P._lift = L
    return P._lift


def is_lift_marking(m):
    """Lift markings are the images of canonical diagrams of the base."""
    tag, a = m.tag, m.args
    if tag == "MkTm":
        return a[0] is LIFTED_ONE
    if any(x.tag != "LiftedGen" for x in a[:3]):
        return False
    b = [x.args[0] for x in a[:3]]
    if tag == "MkPb":
        f1, f2 = b[0], b[1]
        return (a[2] is Term("LiftedGen", Term("P1", f1, f2)) and
                a[3] is Term("LiftedGen", Term("P2", f1, f2)))
    if tag == "MkPi":
        f1, g, f2 = b
        return f2 is Term("PiMap", f1, g) and a[3] is lift_pi_eval(f1, g)
    return False


def lift_pb_marking(f1, f2):
    return MkPb(LiftedGen(f1), LiftedGen(f2),
                LiftedGen(P1(f1, f2)), LiftedGen(P2(f1, f2)))


def lift_pi_eval(f1, g):
    """Evaluation leg of the lifted Pi diagram, read through the lifted
    pullback marking."""
    pm = PiMap(f1, g)
    return Comp(LiftedGen(Eval(f1, g)), MarkInv(lift_pb_marking(f1, pm)))


def lift_pi_marking(f1, g):
    return MkPi(LiftedGen(f1), LiftedGen(g), LiftedGen(PiMap(f1, g)),
                lift_pi_eval(f1, g))


def eta_embed(x, P):
    """One-generator embedding of a term of P into F(G(P)); not homomorphic."""
    if P.is_lift:
        raise AlreadyLifted("eta_embed on a lift presentation")
    if x.is_obj:
        infer_obj(x, P)
        return Lifted(x)
    infer_boundary(x, P)
    return LiftedGen(x)


def eps_collapse(t):
    """Replace lifted leaves by their payloads, keeping canonical structure."""
    memo = {}

    def go(x):
        r = memo.get(x)
        if r is None:
            if x.tag in ("Lifted", "LiftedGen"):
                r = x.args[0]
            else:
                for a in x.args:
                    if isinstance(a, Term):
                        go(a)
                r = _collapse_node(x, memo)
            memo[x] = r
        return r
    return go(t)


def _collapse_node(t, memo):
    if t.tag in ("Lifted", "LiftedGen"):
        return t.args[0]
    if t.tag in ("Gen", "MGen", "One"):
        if t.tag == "MGen":
            raise IllFormed("generator outside the lift", t)
        return t
    args = tuple(memo[a] if isinstance(a, Term) else a for a in t.args)
    if t.tag == "MarkInv":
        m = args[0]
        if m.tag == "MkTm" and m.args[0] is ONE:
            return Id(ONE)
        if m.tag == "MkPb":
            return Id(PbObj(m.args[0], m.args[1]))
        if m.tag == "MkPi":
            return Id(PiObj(m.args[0], m.args[1]))
    r = Term(t.tag, *args)
    if r.is_mor:
        boundary(r)
    return r


# -- JSON ------------------------------------------------------------------

FORMAT = "lccdtt.presentation/1"


def term_to_json(t):
    return [t.tag] + [term_to_json(a) if isinstance(a, Term) else a
                      for a in t.args]


def term_from_json(j):
    tag = j[0]
    args = tuple(term_from_json(a) if isinstance(a, list) else a
                 for a in j[1:])
    t = Term(tag, *args)
    if t.is_mor:
        boundary(t)
    elif t.is_obj:
        check_obj(t)
    elif tag not in MARK_TAGS:
        raise IllFormed("unknown term tag " + repr(tag))
    return t


def presentation_to_json(P):
    d = {
        "format": FORMAT,
        "objects": list(P.obj_gens),
        "arrows": [{"name": n, "dom": term_to_json(g.args[1]),
                    "cod": term_to_json(g.args[2])}
                   for n, g in P.mor_gens.items()],
        "equations": [[term_to_json(l), term_to_json(r)]
                      for l, r in P.equations],
        "markings": [term_to_json(m) for m in P.markings],
    }
    o = P.origin
    if o.kind == "free":
        d["origin"] = {"kind": "free"}
    elif o.kind == "extension":
        d["origin"] = {"kind": "extension",
                       "parent": presentation_to_json(o.parent),
                       "sigma": term_to_json(o.sigma),
                       "var": o.var.args[0]}
    else:
        d["origin"] = {"kind": "lift", "base": presentation_to_json(o.base)}
    return d


def presentation_from_json(d):
    if d.get("format") != FORMAT:
        raise IllFormed("unsupported presentation format %r" % d.get("format"))
    o = d["origin"]
    if o["kind"] == "free":
        origin = Free()
    elif o["kind"] == "extension":
        parent = presentation_from_json(o["parent"])
        origin = Extension(parent, term_from_json(o["sigma"]), None)
    elif o["kind"] == "lift":
        return lift_presentation(presentation_from_json(o["base"]))
    else:
        raise IllFormed("unknown origin " + repr(o["kind"]))
    gens = {a["name"]: MGen(a["name"], term_from_json(a["dom"]),
                            term_from_json(a["cod"])) for a in d["arrows"]}
    P = Presentation(d["objects"], gens,
                     [(term_from_json(l), term_from_json(r))
                      for l, r in d["equations"]],
                     [term_from_json(m) for m in d["markings"]], origin)
    if o["kind"] == "extension":
        origin.var = gens[o["var"]]
    for l, r in P.equations:
        if infer_boundary(l, P) != infer_boundary(r, P):
            raise BoundaryMismatch("%s vs %s" % (show(l), show(r)))
    return P


def dumps(P):
    return json.dumps(presentation_to_json(P), sort_keys=True,
                      separators=(",", ":"))


def loads(s):
    return presentation_from_json(json.loads(s))
