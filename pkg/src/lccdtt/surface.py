"""Surface language: lexer, parser, printer and elaborator.

Grammar (EBNF; ``--`` starts a comment that runs to end of line)::

    file      = { item } ;
    item      = sketch | context | judgments | "use-model" IDENT ";" ;
    sketch    = "sketch" [IDENT] "{" { sdecl } "}" ;
    sdecl     = "obj" IDENT ";"
              | "arrow" IDENT ":" sexpr "->" sexpr ";"
              | "eq" sexpr "=" sexpr ";"
              | "mark" "tm" sexpr ";"
              | "mark" ("pb" | "pi") "(" sexpr {"," sexpr} ")" ";" ;
    sexpr     = satom { "." satom } ;
    satom     = IDENT | "1" | "(" sexpr ")"
              | ("id" | "!" | "p1" | "p2" | "pb" | "pi" | "pair" | "pimap"
                 | "eval" | "curry") "(" sexpr {"," sexpr} ")" ;
    context   = "context" IDENT ["over" IDENT] "{" { IDENT ":" type ";" } "}" ;
    judgments = "judgment" [IDENT] ["in" IDENT] "{" { jdecl } "}" ;
    jdecl     = "check" term ":" type ";"
              | "eq" atom atom ":" type ";"
              | "norm" term ";" ;
    type      = tprod [ "->" type ] ;
    tprod     = tatom { ("*" | "×") tatom } ;
    tatom     = "Unit" | IDENT | "Eq" "(" term "," term ")"
              | ("Sigma" | "Pi") "(" IDENT ":" type ")" type
              | "(" type ")" ;
    term      = "\\" IDENT "." term | atom { atom } ;
    atom      = IDENT | "tt" | "pair" | "fst" | "snd" | "refl"
              | "(" term [ ":" type ] ")" ;

A context without ``over`` sits over the most recent sketch (or the empty
sketch); a judgment block without ``in`` uses the most recent context.
"""
import dataclasses
import re
from dataclasses import dataclass, field
from typing import Optional

from . import cwf
from .fin_lcc import builtin_model, describe_assignment
from .rewrite_eq import (BudgetExceeded, DEFAULT_BUDGET, decide_equal,
                         engine_for)
from .term_core import (ONE, Bang, Comp, Curry, Eval, Gen, Id, MkPb, MkPi,
                        MkTm, P1, P2, PbObj, PbPair, PiMap, PiObj, TermError,
                        cod, dom, infer_boundary, infer_obj, mk_presentation,
                        show)


# -- spans and diagnostics ---------------------------------------------------

@dataclass(frozen=True)
class Span:
    line: int
    col: int
    end_line: int
    end_col: int

    def __str__(self):
        return "%d:%d-%d:%d" % (self.line, self.col, self.end_line, self.end_col)


NOSPAN = Span(0, 0, 0, 0)


@dataclass
class Diagnostic:
    severity: str          # "error", "unknown", "info"
    span: Span
    message: str
    trace: Optional[list] = None
    countermodel: Optional[str] = None

    def render(self, path="<input>"):
        out = "%s:%s: %s: %s" % (path, self.span, self.severity, self.message)
        if self.countermodel:
            out += "\n  countermodel: " + self.countermodel
        for line in self.trace or ():
            out += "\n  " + line
        return out


class SurfaceError(Exception):
    kind = "error"

    def __init__(self, message, span=NOSPAN, trace=None):
        super().__init__(message)
        self.span = span
        self.trace = trace

    def diagnostic(self):
        return Diagnostic("error", self.span, "%s: %s" % (self.kind, self),
                          self.trace)


class SyntaxError_(SurfaceError):
    kind = "SyntaxError"


class ScopeError(SurfaceError):
    kind = "ScopeError"


class TypeMismatch(SurfaceError):
    kind = "TypeMismatch"


class EngineUnknown(SurfaceError):
    kind = "EngineUnknown"

    def diagnostic(self):
        return Diagnostic("unknown", self.span, "%s: %s" % (self.kind, self),
                          self.trace)


# -- AST ---------------------------------------------------------------------

def _node(cls):
    return dataclass(eq=True)(cls)


def _span():
    return field(default=NOSPAN, compare=False, repr=False)


@_node
class SName:
    name: str
    span: Span = _span()


@_node
class SOne:
    span: Span = _span()


@_node
class SCall:
    op: str
    args: list
    span: Span = _span()


@_node
class SComp:
    parts: list            # outermost first
    span: Span = _span()


@_node
class ObjDecl:
    name: str
    span: Span = _span()


@_node
class ArrowDecl:
    name: str
    dom: object
    cod: object
    span: Span = _span()


@_node
class EqDecl:
    lhs: object
    rhs: object
    span: Span = _span()


@_node
class MarkDecl:
    kind: str
    args: list
    span: Span = _span()


@_node
class Sketch:
    name: Optional[str]
    decls: list
    span: Span = _span()


@_node
class TUnit:
    span: Span = _span()


@_node
class TName:
    name: str
    span: Span = _span()


@_node
class TProd:
    left: object
    right: object
    span: Span = _span()


@_node
class TEq:
    lhs: object
    rhs: object
    span: Span = _span()


@_node
class TBind:
    kind: str              # "Sigma" or "Pi"; "->" is Pi with var "_"
    var: str
    dom: object
    body: object
    span: Span = _span()


@_node
class Var:
    name: str
    span: Span = _span()


@_node
class TT:
    span: Span = _span()


@_node
class Prim:
    name: str              # pair, fst, snd, refl
    span: Span = _span()


@_node
class Lam:
    var: str
    body: object
    span: Span = _span()


@_node
class App:
    fn: object
    arg: object
    span: Span = _span()


@_node
class Ann:
    term: object
    type: object
    span: Span = _span()


@_node
class Binding:
    name: str
    type: object
    span: Span = _span()


@_node
class Context:
    name: str
    over: Optional[str]
    entries: list
    span: Span = _span()


@_node
class Check:
    term: object
    type: object
    span: Span = _span()


@_node
class EqJ:
    lhs: object
    rhs: object
    type: object
    span: Span = _span()


@_node
class Norm:
    term: object
    span: Span = _span()


@_node
class JudgmentBlock:
    name: Optional[str]
    ctx: Optional[str]
    items: list
    span: Span = _span()


@_node
class UseModel:
    name: str
    span: Span = _span()


@_node
class SurfaceFile:
    items: list = field(default_factory=list)


# -- lexer -------------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+|--[^\n]*)
  | (?P<nl>\n)
  | (?P<sym>->|use-model|[{}();:,.=*×!\\])
  | (?P<num>[0-9]+)
  | (?P<id>[A-Za-z_][A-Za-z0-9_']*)
""", re.VERBOSE)


@dataclass
class Tok:
    kind: str
    text: str
    span: Span


def lex(text):
    toks, pos, line, col = [], 0, 1, 1
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise SyntaxError_("unexpected character %r" % text[pos],
                               Span(line, col, line, col + 1))
        s = m.group()
        if m.lastgroup == "nl":
            line, col = line + 1, 1
        else:
            if m.lastgroup != "ws":
                kind = "sym" if m.lastgroup == "sym" else m.lastgroup
                toks.append(Tok(kind, s, Span(line, col, line, col + len(s))))
            col += len(s)
        pos = m.end()
    toks.append(Tok("eof", "", Span(line, col, line, col)))
    return toks


# -- parser ------------------------------------------------------------------

SKETCH_OPS = {"id": 1, "!": 1, "p1": 2, "p2": 2, "pb": 2, "pi": 2,
              "pair": 4, "pimap": 2, "eval": 2, "curry": 4}
MARK_ARITY = {"tm": 1, "pb": 4, "pi": 4}
PRIMS = ("pair", "fst", "snd", "refl")
RESERVED = {"tt", "Unit", "Eq", "Sigma", "Pi", "pair", "fst", "snd", "refl"}


def _join(a, b):
    return Span(a.line, a.col, b.end_line, b.end_col)


class Parser:
    def __init__(self, text):
        self.toks = lex(text)
        self.i = 0

    @property
    def tok(self):
        return self.toks[self.i]

    def at(self, *texts):
        t = self.tok
        return t.kind in ("sym", "id", "num") and t.text in texts

    def advance(self):
        t = self.tok
        self.i += 1
        return t

    def expect(self, text):
        if not self.at(text):
            self.fail("expected %r" % text)
        return self.advance()

    def ident(self, what="identifier"):
        if self.tok.kind != "id":
            self.fail("expected " + what)
        return self.advance()

    def fail(self, msg):
        t = self.tok
        raise SyntaxError_("%s, found %s" % (msg, repr(t.text) if t.text else
                                             "end of input"), t.span)

    def since(self, start):
        return _join(start, self.toks[self.i - 1].span)

    # file level
    def file(self):
        items = []
        while self.tok.kind != "eof":
            if self.at("sketch"):
                items.append(self.sketch())
            elif self.at("context"):
                items.append(self.context())
            elif self.at("judgment"):
                items.append(self.judgments())
            elif self.at("use-model"):
                s = self.advance().span
                name = self.ident("model name").text
                self.expect(";")
                items.append(UseModel(name, self.since(s)))
            else:
                self.fail("expected sketch, context, judgment or use-model")
        return SurfaceFile(items)

    def sketch(self):
        s = self.advance().span
        name = self.advance().text if self.tok.kind == "id" else None
        self.expect("{")
        decls = []
        while not self.at("}"):
            d = self.tok.span
            if self.at("obj"):
                self.advance()
                decls.append(ObjDecl(self.ident("object name").text))
            elif self.at("arrow"):
                self.advance()
                n = self.ident("arrow name").text
                self.expect(":")
                a = self.sexpr()
                self.expect("->")
                decls.append(ArrowDecl(n, a, self.sexpr()))
            elif self.at("eq"):
                self.advance()
                l = self.sexpr()
                self.expect("=")
                decls.append(EqDecl(l, self.sexpr()))
            elif self.at("mark"):
                self.advance()
                kind = self.ident("marking kind").text
                if kind not in MARK_ARITY:
                    self.fail("marking kind must be tm, pb or pi")
                if kind == "tm":
                    args = [self.sexpr()]
                else:
                    args = self.sargs()
                    if len(args) != 4:
                        raise SyntaxError_("mark %s takes 4 arguments" % kind,
                                           self.since(d))
                decls.append(MarkDecl(kind, args))
            else:
                self.fail("expected obj, arrow, eq or mark")
            self.expect(";")
            decls[-1].span = self.since(d)
        self.advance()
        return Sketch(name, decls, self.since(s))

    def sargs(self):
        self.expect("(")
        args = [self.sexpr()]
        while self.at(","):
            self.advance()
            args.append(self.sexpr())
        self.expect(")")
        return args

    def sexpr(self):
        s = self.tok.span
        parts = [self.satom()]
        while self.at("."):
            self.advance()
            parts.append(self.satom())
        return parts[0] if len(parts) == 1 else SComp(parts, self.since(s))

    def satom(self):
        s = self.tok.span
        if self.at("("):
            self.advance()
            e = self.sexpr()
            self.expect(")")
            return e
        if self.at("1"):
            self.advance()
            return SOne(s)
        if self.tok.text in SKETCH_OPS and self.toks[self.i + 1].text == "(":
            op = self.advance().text
            args = self.sargs()
            if len(args) != SKETCH_OPS[op]:
                raise SyntaxError_("%s takes %d arguments" % (op, SKETCH_OPS[op]),
                                   self.since(s))
            return SCall(op, args, self.since(s))
        return SName(self.ident("object or arrow").text, s)

    def context(self):
        s = self.advance().span
        name = self.ident("context name").text
        over = None
        if self.at("over"):
            self.advance()
            over = self.ident("sketch name").text
        self.expect("{")
        entries = []
        while not self.at("}"):
            b = self.tok.span
            x = self.ident("variable").text
            self.expect(":")
            ty = self.type()
            self.expect(";")
            entries.append(Binding(x, ty, self.since(b)))
        self.advance()
        return Context(name, over, entries, self.since(s))

    def judgments(self):
        s = self.advance().span
        name = ctx = None
        if self.tok.kind == "id" and not self.at("in"):
            name = self.advance().text
        if self.at("in"):
            self.advance()
            ctx = self.ident("context name").text
        self.expect("{")
        items = []
        while not self.at("}"):
            j = self.tok.span
            if self.at("check"):
                self.advance()
                t = self.term()
                self.expect(":")
                items.append(Check(t, self.type()))
            elif self.at("eq"):
                self.advance()
                a, b = self.atom(), self.atom()
                self.expect(":")
                items.append(EqJ(a, b, self.type()))
            elif self.at("norm"):
                self.advance()
                items.append(Norm(self.term()))
            else:
                self.fail("expected check, eq or norm")
            self.expect(";")
            items[-1].span = self.since(j)
        self.advance()
        return JudgmentBlock(name, ctx, items, self.since(s))

    # types
    def type(self):
        s = self.tok.span
        t = self.tprod()
        if self.at("->"):
            self.advance()
            return TBind("Pi", "_", t, self.type(), self.since(s))
        return t

    def tprod(self):
        s = self.tok.span
        t = self.tatom()
        while self.at("*", "×"):
            self.advance()
            t = TProd(t, self.tatom(), self.since(s))
        return t

    def tatom(self):
        s = self.tok.span
        if self.at("("):
            self.advance()
            t = self.type()
            self.expect(")")
            return t
        if self.at("Unit"):
            self.advance()
            return TUnit(s)
        if self.at("Eq"):
            self.advance()
            self.expect("(")
            a = self.term()
            self.expect(",")
            b = self.term()
            self.expect(")")
            return TEq(a, b, self.since(s))
        if self.at("Sigma", "Pi"):
            kind = self.advance().text
            self.expect("(")
            x = self.ident("bound variable").text
            self.expect(":")
            a = self.type()
            self.expect(")")
            return TBind(kind, x, a, self.type(), self.since(s))
        t = self.ident("type")
        if t.text in RESERVED:
            raise SyntaxError_("%r is not a type" % t.text, t.span)
        return TName(t.text, s)

    # terms
    def term(self):
        s = self.tok.span
        if self.at("\\"):
            self.advance()
            x = self.ident("bound variable").text
            self.expect(".")
            return Lam(x, self.term(), self.since(s))
        t = self.atom()
        while self.starts_atom():
            t = App(t, self.atom(), self.since(s))
        return t

    def starts_atom(self):
        return self.at("(") or (self.tok.kind == "id" and
                                self.tok.text not in ("in",))

    def atom(self):
        s = self.tok.span
        if self.at("("):
            self.advance()
            t = self.term()
            if self.at(":"):
                self.advance()
                t = Ann(t, self.type(), self.since(s))
            self.expect(")")
            return t
        if self.at("tt"):
            self.advance()
            return TT(s)
        if self.at(*PRIMS):
            return Prim(self.advance().text, s)
        t = self.ident("term")
        if t.text in RESERVED:
            raise SyntaxError_("%r is not a term" % t.text, t.span)
        return Var(t.text, s)


def parse(text):
    return Parser(text).file()


# -- printer -----------------------------------------------------------------

def print_sexpr(e):
    if isinstance(e, SName):
        return e.name
    if isinstance(e, SOne):
        return "1"
    if isinstance(e, SCall):
        return "%s(%s)" % (e.op, ", ".join(map(print_sexpr, e.args)))
    return " . ".join(("(%s)" % print_sexpr(p)) if isinstance(p, SComp)
                      else print_sexpr(p) for p in e.parts)


def print_type(t):
    if isinstance(t, TUnit):
        return "Unit"
    if isinstance(t, TName):
        return t.name
    if isinstance(t, TEq):
        return "Eq(%s, %s)" % (print_term(t.lhs), print_term(t.rhs))
    if isinstance(t, TProd):
        r = print_type(t.right)
        return "%s * %s" % (_tatom(t.left, TProd),
                            r if isinstance(t.right, (TUnit, TName, TEq)) else "(%s)" % r)
    if t.var == "_" and t.kind == "Pi":
        return "%s -> %s" % (_tatom(t.dom, TProd), print_type(t.body))
    return "%s(%s : %s) %s" % (t.kind, t.var, print_type(t.dom),
                               _tatom(t.body, object))


def _tatom(t, ok):
    s = print_type(t)
    if isinstance(t, (TUnit, TName, TEq)) or isinstance(t, ok):
        return s
    return "(%s)" % s


def print_term(t):
    if isinstance(t, Var):
        return t.name
    if isinstance(t, TT):
        return "tt"
    if isinstance(t, Prim):
        return t.name
    if isinstance(t, Lam):
        return "\\%s. %s" % (t.var, print_term(t.body))
    if isinstance(t, Ann):
        return "(%s : %s)" % (print_term(t.term), print_type(t.type))
    f = print_term(t.fn)
    if isinstance(t.fn, Lam):
        f = "(%s)" % f
    return "%s %s" % (f, _atom(t.arg))


def _atom(t):
    s = print_term(t)
    return "(%s)" % s if isinstance(t, (App, Lam)) else s


def print_file(f):
    out = []
    for it in f.items:
        if isinstance(it, UseModel):
            out.append("use-model %s;" % it.name)
        elif isinstance(it, Sketch):
            out.append("sketch%s {" % (" " + it.name if it.name else ""))
            for d in it.decls:
                if isinstance(d, ObjDecl):
                    out.append("  obj %s;" % d.name)
                elif isinstance(d, ArrowDecl):
                    out.append("  arrow %s : %s -> %s;" % (
                        d.name, print_sexpr(d.dom), print_sexpr(d.cod)))
                elif isinstance(d, EqDecl):
                    out.append("  eq %s = %s;" % (print_sexpr(d.lhs),
                                                  print_sexpr(d.rhs)))
                elif d.kind == "tm":
                    out.append("  mark tm %s;" % print_sexpr(d.args[0]))
                else:
                    out.append("  mark %s (%s);" % (
                        d.kind, ", ".join(map(print_sexpr, d.args))))
            out.append("}")
        elif isinstance(it, Context):
            out.append("context %s%s {" % (it.name, " over " + it.over
                                           if it.over else ""))
            out.extend("  %s : %s;" % (b.name, print_type(b.type))
                       for b in it.entries)
            out.append("}")
        else:
            head = "judgment"
            if it.name:
                head += " " + it.name
            if it.ctx:
                head += " in " + it.ctx
            out.append(head + " {")
            for j in it.items:
                if isinstance(j, Check):
                    out.append("  check %s : %s;" % (print_term(j.term),
                                                     print_type(j.type)))
                elif isinstance(j, EqJ):
                    out.append("  eq %s %s : %s;" % (
                        _eq_atom(j.lhs), _eq_atom(j.rhs), print_type(j.type)))
                else:
                    out.append("  norm %s;" % print_term(j.term))
            out.append("}")
    return "\n".join(out) + ("\n" if out else "")


def _eq_atom(t):
    s = print_term(t)
    return s if isinstance(t, (Var, TT, Prim, Ann)) else "(%s)" % s


# -- elaboration -------------------------------------------------------------

class TyVal:
    """An elaborated type.  ``obj(G)`` is its object in context G (or any
    extension of it); Sigma and Pi keep their body unelaborated and
    instantiate it per context, since weakening is the identity on
    generators."""

    def __init__(self, kind, *data):
        self.kind, self.data = kind, data
        self._inst = {}

    def obj(self, G):
        k = self.kind
        if k == "base":
            return self.data[0]
        if k == "unit":
            return cwf.unit_ty()
        if k == "prod":
            return cwf.prod_ty(self.data[0].obj(G), self.data[1].obj(G))
        if k == "eq":
            return cwf.eq_ty(self.data[0], self.data[1])
        Gs, tau, _ = self.instantiate(G)
        return (cwf.sigma_ty if k == "Sigma" else cwf.pi_ty)(Gs, tau)

    def instantiate(self, G):
        """(G.dom, body object, body TyVal) for a Sigma or Pi."""
        hit = self._inst.get(id(G))
        if hit is not None and hit[0] is G:
            return hit[1]
        x, dtv, body, scope, elab = self.data
        Gs, _p, v = cwf.extend(G, dtv.obj(G), fresh_name(G, x))
        btv = elab.type(body, scope.bind(x, v, dtv), Gs)
        tau = cwf.nf_ty(btv.obj(Gs), Gs)
        res = (Gs, tau, btv)
        self._inst[id(G)] = (G, res)
        return res

    def at(self, G, a):
        """Body type with the bound variable replaced by a."""
        x, dtv, body, scope, elab = self.data
        return elab.type(body, scope.let(x, a, dtv), G)


def fresh_name(G, x):
    taken = set(G.obj_gens) | set(G.mor_gens)
    base = x if x != "_" else "x"
    n, i = base, 0
    while n in taken:
        i += 1
        n = "%s%d" % (base, i)
    return n


class Scope:
    def __init__(self, entries=None):
        self.entries = entries or {}

    def bind(self, x, term, tv):
        d = dict(self.entries)
        if x != "_":
            d[x] = (term, tv)
        return Scope(d)

    let = bind

    def get(self, x):
        return self.entries.get(x)


@dataclass
class Result:
    judgment: object
    status: str                       # pass, fail, unknown
    diagnostics: list
    block: Optional[str] = None
    context: Optional[str] = None
    value: Optional[str] = None       # normal form for norm, verdict otherwise
    trace: Optional[list] = None


def _render_step(s):
    def sh(x):
        if isinstance(x, (list, tuple)):
            return " . ".join(show(y) for y in x)
        return show(x) if x is not None else "-"
    return "%s @%s: %s  ~>  %s" % (s.rule, s.pos, sh(s.before), sh(s.after))


class Elaborator:
    def __init__(self, budget=DEFAULT_BUDGET, trace=False):
        self.budget = budget
        self.trace = trace
        self.sketches = {}
        self.contexts = {}
        self.models = []
        self.results = []
        self._last_sketch = None
        self._last_ctx = None

    # files
    def run(self, f, only=None):
        """Elaborate every item; returns the list of Results.  ``only``
        restricts to judgment blocks (or contexts) with that name."""
        for it in f.items:
            try:
                if isinstance(it, UseModel):
                    try:
                        self.models.append(builtin_model(it.name))
                    except (KeyError, ValueError) as ex:
                        raise ScopeError("unknown model %r" % it.name, it.span) from ex
                elif isinstance(it, Sketch):
                    self.sketch(it)
                elif isinstance(it, Context):
                    self.context(it)
                elif only is None or only in (it.name, it.ctx) or \
                        (it.ctx is None and only == self._last_ctx):
                    self.block(it)
            except SurfaceError as ex:
                self.results.append(Result(it, "fail", [ex.diagnostic()]))
        return self.results

    def sketch(self, sk):
        objs, arrows, eqs, marks = [], {}, [], []
        env = {}

        def obj(e):
            x = self.sterm(e, env)
            if not x.is_obj:
                raise TypeMismatch("expected an object", e.span)
            return x

        for d in sk.decls:
            try:
                if isinstance(d, ObjDecl):
                    if d.name in env:
                        raise ScopeError("duplicate name %r" % d.name, d.span)
                    objs.append(d.name)
                    env[d.name] = Gen(d.name)
                elif isinstance(d, ArrowDecl):
                    if d.name in env:
                        raise ScopeError("duplicate name %r" % d.name, d.span)
                    for e in (d.dom, d.cod):
                        if isinstance(e, SName) and e.name not in env:
                            objs.append(e.name)
                            env[e.name] = Gen(e.name)
                    arrows[d.name] = (obj(d.dom), obj(d.cod))
                    env[d.name] = mk_presentation(objs, arrows).mor_gens[d.name]
                elif isinstance(d, EqDecl):
                    eqs.append((self.sterm(d.lhs, env), self.sterm(d.rhs, env)))
                else:
                    args = [self.sterm(a, env) for a in d.args]
                    marks.append({"tm": MkTm, "pb": MkPb, "pi": MkPi}[d.kind](*args))
            except TermError as ex:
                raise TypeMismatch(str(ex), d.span) from ex
        try:
            P = mk_presentation(objs, arrows, eqs, marks)
        except TermError as ex:
            raise TypeMismatch(str(ex), sk.span) from ex
        self.sketches[sk.name] = P
        self._last_sketch = sk.name
        return P

    def sterm(self, e, env):
        if isinstance(e, SOne):
            return ONE
        if isinstance(e, SName):
            if e.name not in env:
                raise ScopeError("unbound name %r" % e.name, e.span)
            return env[e.name]
        try:
            if isinstance(e, SComp):
                parts = [self.sterm(p, env) for p in e.parts]
                t = parts[-1]
                for g in reversed(parts[:-1]):
                    t = Comp(g, t)
                return t
            a = [self.sterm(x, env) for x in e.args]
            return {"id": Id, "!": Bang, "p1": P1, "p2": P2, "pb": PbObj,
                    "pi": PiObj, "pair": PbPair, "pimap": PiMap,
                    "eval": Eval, "curry": Curry}[e.op](*a)
        except TermError as ex:
            raise TypeMismatch(str(ex), e.span) from ex

    def base_for(self, over, span):
        if over is not None:
            if over not in self.sketches:
                raise ScopeError("unknown sketch %r" % over, span)
            return self.sketches[over]
        if self._last_sketch is not None or None in self.sketches:
            return self.sketches[self._last_sketch]
        return cwf.empty_context()

    def context(self, c):
        G = self.base_for(c.over, c.span)
        scope = Scope()
        for b in c.entries:
            tv = self.type(b.type, scope, G)
            try:
                G, _p, v = cwf.extend(G, tv.obj(G), fresh_name(G, b.name))
                if tv.kind == "eq":
                    cwf.reflect(G, v)
            except TermError as ex:
                raise TypeMismatch(str(ex), b.span) from ex
            scope = scope.bind(b.name, v, tv)
        self.contexts[c.name] = (G, scope)
        self._last_ctx = c.name
        return G

    def block(self, blk):
        if blk.ctx is not None:
            if blk.ctx not in self.contexts:
                raise ScopeError("unknown context %r" % blk.ctx, blk.span)
            G, scope = self.contexts[blk.ctx]
            cname = blk.ctx
        elif self._last_ctx is not None:
            G, scope = self.contexts[self._last_ctx]
            cname = self._last_ctx
        else:
            G, scope, cname = self.base_for(None, blk.span), Scope(), None
        for j in blk.items:
            try:
                r = self.judgment(j, scope, G)
            except SurfaceError as ex:
                if ex.span is NOSPAN:
                    ex.span = j.span
                r = Result(j, "unknown" if isinstance(ex, EngineUnknown) else "fail",
                           [ex.diagnostic()])
            except TermError as ex:
                r = Result(j, "fail", [TypeMismatch(str(ex), j.span).diagnostic()])
            r.block, r.context = blk.name, cname
            self.results.append(r)

    def judgment(self, j, scope, G):
        if isinstance(j, Check):
            tv = self.type(j.type, scope, G)
            t = self.check(j.term, tv, scope, G)
            return Result(j, "pass", [Diagnostic("info", j.span, "checked")],
                          value=show(t))
        if isinstance(j, Norm):
            t, _tv = self.infer(j.term, scope, G)
            try:
                n = engine_for(G, self.budget).normalize(t)
            except BudgetExceeded as ex:
                raise EngineUnknown("normalization budget of %d exhausted"
                                    % self.budget, j.span) from ex
            return Result(j, "pass", [Diagnostic("info", j.span, show(n))],
                          value=show(n))
        tv = self.type(j.type, scope, G)
        a = self.check(j.lhs, tv, scope, G)
        b = self.check(j.rhs, tv, scope, G)
        v = decide_equal(a, b, G, self.budget, models=self.models, trace=self.trace)
        steps = [_render_step(s) for s in getattr(v, "trace", ())] if self.trace else None
        if v.kind == "Equal":
            return Result(j, "pass", [Diagnostic("info", j.span, "Equal", steps)],
                          value="Equal", trace=steps)
        if v.kind == "Distinct":
            cm = describe_assignment(v.model, v.assignment)
            return Result(j, "fail", [Diagnostic(
                "error", j.span, "Distinct: %s and %s differ in a finite model"
                % (show(a), show(b)), steps, cm)], value="Distinct")
        return Result(j, "unknown", [Diagnostic(
            "unknown", j.span, "EngineUnknown: " + v.report, steps)],
            value="Unknown", trace=steps)

    # types
    def type(self, t, scope, G):
        if isinstance(t, TUnit):
            return TyVal("unit")
        if isinstance(t, TName):
            if t.name in G.obj_gens:
                return TyVal("base", Gen(t.name))
            raise ScopeError("unknown type %r" % t.name, t.span)
        if isinstance(t, TProd):
            return TyVal("prod", self.type(t.left, scope, G),
                         self.type(t.right, scope, G))
        if isinstance(t, TEq):
            a, atv = self.infer(t.lhs, scope, G)
            b = self.check(t.rhs, atv, scope, G)
            if cod(a) is not cod(b):
                a, b = self._nf(a, G), self._nf(b, G)
            try:
                cwf.eq_ty(a, b)
            except TermError as ex:
                raise TypeMismatch(str(ex), t.span) from ex
            return TyVal("eq", a, b, atv)
        tv = TyVal(t.kind, t.var, self.type(t.dom, scope, G), t.body, scope, self)
        try:
            tv.instantiate(G)
        except TermError as ex:
            raise TypeMismatch(str(ex), t.span) from ex
        return tv

    def _nf(self, t, G):
        try:
            return engine_for(G, self.budget).normalize(t)
        except BudgetExceeded as ex:
            raise EngineUnknown("normalization budget exhausted") from ex

    def _same(self, x, y, G):
        return cwf.same_ty(x, y, G, self.budget)

    # terms
    def infer(self, e, scope, G):
        if isinstance(e, Var):
            hit = scope.get(e.name)
            if hit is not None:
                return hit
            g = G.mor_gens.get(e.name)
            if g is not None and dom(g) is ONE:
                return g, TyVal("base", cod(g))
            raise ScopeError("unbound variable %r" % e.name, e.span)
        if isinstance(e, TT):
            return cwf.unit_tm(), TyVal("unit")
        if isinstance(e, Ann):
            tv = self.type(e.type, scope, G)
            return self.check(e.term, tv, scope, G), tv
        if isinstance(e, Lam):
            raise TypeMismatch("cannot infer the type of a lambda; annotate it",
                               e.span)
        if isinstance(e, Prim):
            raise TypeMismatch("%s needs arguments" % e.name, e.span)
        head, args = _spine(e)
        if isinstance(head, Prim):
            return self.prim(head, args, e, scope, G)
        if isinstance(head, Var) and scope.get(head.name) is None and \
                head.name in G.mor_gens and dom(G.mor_gens[head.name]) is not ONE:
            f = G.mor_gens[head.name]
            if len(args) != 1:
                raise TypeMismatch("arrow %s takes one argument" % head.name, e.span)
            a = self.check(args[0], TyVal("base", dom(f)), scope, G)
            return self._compose(f, a, G, e.span), TyVal("base", cod(f))
        u, tv = self.infer(e.fn, scope, G)
        if tv.kind != "Pi":
            raise TypeMismatch("applying a term that is not a function", e.fn.span)
        a = self.check(e.arg, tv.data[1], scope, G)
        Gs, tau, _ = tv.instantiate(G)
        try:
            ap = cwf.pi_app(Gs, tau, u)
            r = cwf.tm_subst(ap, cwf.mk_subst(Gs, cwf.identity_subst(G), a))
        except TermError as ex:
            raise TypeMismatch(str(ex), e.span) from ex
        return r, tv.at(G, a)

    def _compose(self, f, a, G, span):
        if cod(a) is not dom(f):
            a = self._nf(a, G)
        if cod(a) is not dom(f):
            raise TypeMismatch("%s : %s does not start at %s" % (
                show(a), show(cod(a)), show(dom(f))), span)
        return Comp(f, a)

    def prim(self, head, args, e, scope, G):
        n = head.name
        want = {"pair": 2, "fst": 1, "snd": 1, "refl": 1}[n]
        if len(args) != want:
            raise TypeMismatch("%s takes %d argument%s" % (n, want, "s" * (want > 1)),
                               e.span)
        if n == "pair":
            a, atv = self.infer(args[0], scope, G)
            b, btv = self.infer(args[1], scope, G)
            return cwf.prod_pair(a, b), TyVal("prod", atv, btv)
        if n == "refl":
            a, atv = self.infer(args[0], scope, G)
            return cwf.refl(G, a), TyVal("eq", a, a, atv)
        u, tv = self.infer(args[0], scope, G)
        try:
            if tv.kind == "prod":
                if n == "fst":
                    return cwf.prod_fst(u), tv.data[0]
                return cwf.prod_snd(u), tv.data[1]
            if tv.kind == "Sigma":
                Gs, tau, _ = tv.instantiate(G)
                s = cwf.sigma_pr1(Gs, tau, u)
                if n == "fst":
                    return s, tv.data[1]
                return cwf.sigma_pr2(Gs, tau, u), tv.at(G, s)
        except TermError as ex:
            raise TypeMismatch(str(ex), e.span) from ex
        raise TypeMismatch("%s of a term that is not a pair" % n, args[0].span)

    def check(self, e, tv, scope, G):
        try:
            return self._check(e, tv, scope, G)
        except TermError as ex:
            raise TypeMismatch(str(ex), e.span) from ex

    def _check(self, e, tv, scope, G):
        if isinstance(e, Lam):
            if tv.kind != "Pi":
                raise TypeMismatch("a lambda needs a Pi type", e.span)
            Gs, tau, btv = tv.instantiate(G)
            v = cwf.var_of(Gs)
            t = self.check(e.body, btv, scope.bind(e.var, v, tv.data[1]), Gs)
            if cod(t) is not tau:
                t = self._nf(t, Gs)
            return cwf.pi_lam(Gs, tau, t)
        head, args = _spine(e)
        if isinstance(head, Prim) and head.name == "pair" and len(args) == 2:
            if tv.kind == "prod":
                a = self.check(args[0], tv.data[0], scope, G)
                b = self.check(args[1], tv.data[1], scope, G)
                return cwf.prod_pair(a, b)
            if tv.kind == "Sigma":
                Gs, tau, _ = tv.instantiate(G)
                a = self.check(args[0], tv.data[1], scope, G)
                b = self.check(args[1], tv.at(G, a), scope, G)
                return cwf.sigma_pair(Gs, tau, a, b)
        if isinstance(head, Prim) and head.name == "refl" and len(args) == 1 \
                and tv.kind == "eq":
            s, t = tv.data[0], tv.data[1]
            a = self.check(args[0], tv.data[2], scope, G)
            for x in (s, t):
                v = decide_equal(a, x, G, self.budget, models=[])
                if v.kind == "Unknown":
                    raise EngineUnknown("refl: cannot decide %s = %s" % (
                        show(a), show(x)), e.span)
                if v.kind != "Equal":
                    raise TypeMismatch("refl: %s is not %s" % (show(a), show(x)),
                                       e.span)
            return cwf.refl(G, s, t, self.budget)
        t, got = self.infer(e, scope, G)
        want_o, got_o = tv.obj(G), got.obj(G)
        if not self._same(got_o, want_o, G):
            raise TypeMismatch("%s has type %s, expected %s" % (
                print_term(e), show(got_o), show(want_o)), e.span)
        return t


def _spine(e):
    args = []
    while isinstance(e, App):
        args.append(e.arg)
        e = e.fn
    return e, args[::-1]


def elaborate(f, budget=DEFAULT_BUDGET, trace=False, only=None):
    """Checked judgments of a parsed file, as a list of Results."""
    E = Elaborator(budget, trace)
    E.run(f, only)
    return E.results


def elaborator_for(f, budget=DEFAULT_BUDGET, trace=False, only=None):
    E = Elaborator(budget, trace)
    E.run(f, only)
    return E


__all__ = ["Span", "Diagnostic", "SurfaceError", "ScopeError", "TypeMismatch",
           "EngineUnknown", "SyntaxError_", "SurfaceFile", "parse", "print_file",
           "print_term", "print_type", "elaborate", "elaborator_for",
           "Elaborator", "Result", "lex"]
