"""Concrete syntax for `.hh` specification files.

    kind <name> type.              declare an atomic type
    type <name> <type-expr>.       declare a constant
    <goal> => ... => <atom>.       a program clause (chained => accepted)
    <atom>.                        a fact
    pi <x> : <ty> \\ <body>        explicit universal quantification
    g1 & g2                        conjunction (binds tighter than =>)
    true                           the trivial goal
    % ...                          line comment

Identifiers starting with an uppercase letter (or underscore) are implicitly
pi-quantified at the clause head; their types are inferred by first-order
unification over the clause and an unresolved type is an error.  `%strengthen`
and `%context` lines are collected as directives rather than skipped.
Input is UTF-8 and insensitive to line breaks except inside directives.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    NonRigidAtomError, NotAClause, ParseError, ProgramTypeError, UnknownIdentifier,
)
from .formulas import (
    AND_NAME, IMP_NAME, LOGICAL_NAMES, PI_NAME, TOP, TOP_NAME,
    Program, check_clause, check_goal, conj, imp, pi, pp_formula,
)
from .terms import (
    O, Abs, App, Const, Meta, RESERVED_TYPES, Signature, Term, Ty, TyArr, TyCon,
    Var, infer_type, pp_ty, type_of,
)


# -- tokens ------------------------------------------------------------------------

_PUNCT = {
    "(": "LPAREN", ")": "RPAREN", ".": "DOT", ":": "COLON",
    "\\": "BACKSLASH", "&": "AMP", ",": "COMMA",
}
_KEYWORDS = {"kind", "type", "pi", "true"}


@dataclass(frozen=True)
class Token:
    kind: str   # IDENT, KW, IMP, ARROW, punctuation kinds, DIRECTIVE, EOF
    text: str
    line: int
    col: int


def _ident_start(c: str) -> bool:
    return c.isalpha() or c == "_" or c.isdigit()


def _ident_char(c: str) -> bool:
    return c.isalnum() or c in "_'"


def tokenize(src: str) -> list[Token]:
    toks: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(src)
    while i < n:
        c = src[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c.isspace():
            i += 1
            col += 1
            continue
        if c == "%":
            j = i
            while j < n and src[j] != "\n":
                j += 1
            text = src[i:j]
            if text.startswith("%strengthen") or text.startswith("%context"):
                toks.append(Token("DIRECTIVE", text, line, col))
            i = j
            continue
        if src.startswith("=>", i):
            toks.append(Token("IMP", "=>", line, col))
            i += 2
            col += 2
            continue
        if src.startswith("->", i):
            toks.append(Token("ARROW", "->", line, col))
            i += 2
            col += 2
            continue
        if c in _PUNCT:
            toks.append(Token(_PUNCT[c], c, line, col))
            i += 1
            col += 1
            continue
        if _ident_start(c):
            j = i
            while j < n and _ident_char(src[j]):
                j += 1
            text = src[i:j]
            kind = "KW" if text in _KEYWORDS else "IDENT"
            toks.append(Token(kind, text, line, col))
            col += j - i
            i = j
            continue
        raise ParseError(f"unexpected character {c!r}", line, col)
    toks.append(Token("EOF", "", line, col))
    return toks


# -- parse trees --------------------------------------------------------------------

@dataclass(frozen=True)
class PNode:
    line: int
    col: int


@dataclass(frozen=True)
class PName(PNode):
    name: str


@dataclass(frozen=True)
class PTrue(PNode):
    pass


@dataclass(frozen=True)
class PApp(PNode):
    fn: PNode
    arg: PNode


@dataclass(frozen=True)
class PLam(PNode):
    name: str
    ann: Ty | None
    body: PNode


@dataclass(frozen=True)
class PPi(PNode):
    name: str
    ann: Ty | None
    body: PNode


@dataclass(frozen=True)
class PImp(PNode):
    left: PNode
    right: PNode


@dataclass(frozen=True)
class PAnd(PNode):
    left: PNode
    right: PNode


@dataclass(frozen=True)
class Directive:
    kind: str  # "strengthen" | "context"
    text: str  # raw text after the keyword, without the trailing dot
    line: int
    col: int


@dataclass(frozen=True)
class ParsedFile:
    program: Program
    directives: tuple[Directive, ...]


class _TokenStream:
    def __init__(self, toks: list[Token]):
        self.toks = toks
        self.pos = 0

    def peek(self, ahead: int = 0) -> Token:
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.peek()
        if t.kind != "EOF":
            self.pos += 1
        return t

    def expect(self, kind: str, what: str) -> Token:
        t = self.peek()
        if t.kind != kind:
            raise ParseError(f"expected {what}, found {t.text or 'end of input'!r}",
                             t.line, t.col)
        return self.next()


# -- type expressions ------------------------------------------------------------------

def _parse_tyexpr(ts: _TokenStream, kinds: set[str]) -> Ty:
    left = _parse_tyfactor(ts, kinds)
    if ts.peek().kind == "ARROW":
        ts.next()
        return TyArr(left, _parse_tyexpr(ts, kinds))
    return left


def _parse_tyfactor(ts: _TokenStream, kinds: set[str]) -> Ty:
    t = ts.peek()
    if t.kind == "LPAREN":
        ts.next()
        ty = _parse_tyexpr(ts, kinds)
        ts.expect("RPAREN", "')'")
        return ty
    if t.kind == "IDENT":
        ts.next()
        if t.text == "o":
            return O
        if t.text not in kinds:
            raise ParseError(f"unknown type {t.text!r}", t.line, t.col)
        return TyCon(t.text)
    raise ParseError(f"expected a type, found {t.text!r}", t.line, t.col)


# -- expression grammar ------------------------------------------------------------------

_PRIMARY_STARTS = {"LPAREN", "IDENT"}


def _starts_primary(t: Token) -> bool:
    return t.kind in _PRIMARY_STARTS or (t.kind == "KW" and t.text in ("true", "pi"))


def _parse_expr(ts: _TokenStream, kinds: set[str]) -> PNode:
    return _parse_imp(ts, kinds)


def _parse_imp(ts: _TokenStream, kinds: set[str]) -> PNode:
    left = _parse_and(ts, kinds)
    if ts.peek().kind == "IMP":
        t = ts.next()
        right = _parse_imp(ts, kinds)
        return PImp(t.line, t.col, left, right)
    return left


def _parse_and(ts: _TokenStream, kinds: set[str]) -> PNode:
    left = _parse_app(ts, kinds)
    if ts.peek().kind == "AMP":
        t = ts.next()
        right = _parse_and(ts, kinds)
        return PAnd(t.line, t.col, left, right)
    return left


def _parse_app(ts: _TokenStream, kinds: set[str]) -> PNode:
    node = _parse_primary(ts, kinds)
    while _starts_primary(ts.peek()):
        arg = _parse_primary(ts, kinds)
        node = PApp(node.line, node.col, node, arg)
    return node


def _parse_primary(ts: _TokenStream, kinds: set[str]) -> PNode:
    t = ts.peek()
    if t.kind == "LPAREN":
        ts.next()
        node = _parse_expr(ts, kinds)
        ts.expect("RPAREN", "')'")
        return node
    if t.kind == "KW" and t.text == "true":
        ts.next()
        return PTrue(t.line, t.col)
    if t.kind == "KW" and t.text == "pi":
        ts.next()
        name = ts.expect("IDENT", "a bound name")
        ann = None
        if ts.peek().kind == "COLON":
            ts.next()
            ann = _parse_tyexpr(ts, kinds)
        ts.expect("BACKSLASH", "'\\'")
        body = _parse_imp(ts, kinds)
        return PPi(t.line, t.col, name.text, ann, body)
    if t.kind == "IDENT":
        nxt = ts.peek(1)
        if nxt.kind == "BACKSLASH":
            ts.next()
            ts.next()
            body = _parse_imp(ts, kinds)
            return PLam(t.line, t.col, t.text, None, body)
        if nxt.kind == "COLON":
            ts.next()
            ts.next()
            ann = _parse_tyexpr(ts, kinds)
            ts.expect("BACKSLASH", "'\\'")
            body = _parse_imp(ts, kinds)
            return PLam(t.line, t.col, t.text, ann, body)
        ts.next()
        return PName(t.line, t.col, t.text)
    raise ParseError(f"expected a term, found {t.text or 'end of input'!r}",
                     t.line, t.col)


# -- type inference over parse trees --------------------------------------------------------

@dataclass(frozen=True)
class TyMeta(Ty):
    """A type unknown; only ever lives inside the elaborator."""
    uid: int

    def __repr__(self):
        return f"?t{self.uid}"


class _TyTable:
    def __init__(self):
        self.binding: dict[int, Ty] = {}
        self.counter = 0

    def fresh(self) -> TyMeta:
        self.counter += 1
        return TyMeta(self.counter)

    def resolve(self, ty: Ty) -> Ty:
        while isinstance(ty, TyMeta) and ty.uid in self.binding:
            ty = self.binding[ty.uid]
        return ty

    def resolve_deep(self, ty: Ty) -> Ty:
        ty = self.resolve(ty)
        if isinstance(ty, TyArr):
            return TyArr(self.resolve_deep(ty.dom), self.resolve_deep(ty.cod))
        return ty

    def _occurs(self, uid: int, ty: Ty) -> bool:
        ty = self.resolve(ty)
        if isinstance(ty, TyMeta):
            return ty.uid == uid
        if isinstance(ty, TyArr):
            return self._occurs(uid, ty.dom) or self._occurs(uid, ty.cod)
        return False

    def unify(self, a: Ty, b: Ty, where: PNode) -> None:
        a, b = self.resolve(a), self.resolve(b)
        if a == b:
            return
        if isinstance(a, TyMeta):
            if self._occurs(a.uid, b):
                raise ParseError("circular type constraint", where.line, where.col)
            self.binding[a.uid] = b
            return
        if isinstance(b, TyMeta):
            self.unify(b, a, where)
            return
        if isinstance(a, TyArr) and isinstance(b, TyArr):
            self.unify(a.dom, b.dom, where)
            self.unify(a.cod, b.cod, where)
            return
        raise ParseError(f"type mismatch: {a!r} vs {b!r}", where.line, where.col)


def _is_implicit(name: str) -> bool:
    return name[0].isupper() or name[0] == "_"


# Typed intermediate nodes: (tag, ...) tuples carrying a type.
# tags: const, bound, impl, lam, pi, app, imp, and, true

def _infer(node: PNode, env: list[tuple[str, int, Ty]], sig: Signature,
           impl: dict[str, Ty], table: _TyTable):
    if isinstance(node, PTrue):
        return ("true", O)
    if isinstance(node, PName):
        for name, uid, ty in env:
            if name == node.name:
                return ("bound", ty, name, uid)
        if _is_implicit(node.name):
            if node.name not in impl:
                impl[node.name] = table.fresh()
            return ("impl", impl[node.name], node.name)
        declared = sig.lookup(node.name)
        if declared is None:
            raise UnknownIdentifier(node.name)
        return ("const", declared, node.name)
    if isinstance(node, PApp):
        f = _infer(node.fn, env, sig, impl, table)
        a = _infer(node.arg, env, sig, impl, table)
        res = table.fresh()
        table.unify(f[1], TyArr(a[1], res), node)
        return ("app", res, f, a)
    if isinstance(node, PLam):
        ty = node.ann or table.fresh()
        uid = table.counter = table.counter + 1
        b = _infer(node.body, [(node.name, uid, ty)] + env, sig, impl, table)
        return ("lam", TyArr(ty, b[1]), node.name, uid, ty, b)
    if isinstance(node, PPi):
        ty = node.ann or table.fresh()
        uid = table.counter = table.counter + 1
        b = _infer(node.body, [(node.name, uid, ty)] + env, sig, impl, table)
        table.unify(b[1], O, node)
        return ("pi", O, node.name, uid, ty, b)
    if isinstance(node, PImp):
        l = _infer(node.left, env, sig, impl, table)
        r = _infer(node.right, env, sig, impl, table)
        table.unify(l[1], O, node)
        table.unify(r[1], O, node)
        return ("imp", O, l, r)
    if isinstance(node, PAnd):
        l = _infer(node.left, env, sig, impl, table)
        r = _infer(node.right, env, sig, impl, table)
        table.unify(l[1], O, node)
        table.unify(r[1], O, node)
        return ("and", O, l, r)
    raise AssertionError(f"unhandled parse node {node!r}")


class _MetaCounter:
    def __init__(self):
        self.n = 0

    def fresh(self) -> int:
        self.n += 1
        return self.n


_GLOBAL_QUERY_METAS = _MetaCounter()


def _build(tnode, table: _TyTable, impl_mode: str, where: PNode,
           impl_order: list[str], meta_uids: dict[str, int]) -> Term:
    tag = tnode[0]
    if tag == "true":
        return TOP

    def ground(ty: Ty) -> Ty:
        ty = table.resolve_deep(ty)
        if isinstance(ty, TyMeta) or _has_tymeta(ty):
            raise ParseError("ambiguous type; add an annotation", where.line, where.col)
        return ty

    if tag == "const":
        return Const(tnode[2], ground(tnode[1]))
    if tag == "bound":
        # unique internal name; the binder closes over it and keeps the hint
        return Var(f"{tnode[2]}%{tnode[3]}", ground(tnode[1]))
    if tag == "impl":
        name = tnode[2]
        if name not in impl_order:
            impl_order.append(name)
        ty = ground(tnode[1])
        if impl_mode == "meta":
            if name not in meta_uids:
                meta_uids[name] = _GLOBAL_QUERY_METAS.fresh()
            return Meta(name, ty, meta_uids[name])
        return Var(name, ty)
    if tag == "app":
        return App(_build(tnode[2], table, impl_mode, where, impl_order, meta_uids),
                   _build(tnode[3], table, impl_mode, where, impl_order, meta_uids))
    if tag == "lam":
        _, _, name, uid, ty, b = tnode
        body = _build(b, table, impl_mode, where, impl_order, meta_uids)
        from .terms import close_term
        return Abs(ground(ty), close_term(body, f"{name}%{uid}", ground(ty)), name)
    if tag == "pi":
        _, _, name, uid, ty, b = tnode
        body = _build(b, table, impl_mode, where, impl_order, meta_uids)
        gty = ground(ty)
        from .terms import close_term
        fn = Abs(gty, close_term(body, f"{name}%{uid}", gty), name)
        from .formulas import pi_abs
        return pi_abs(fn)
    if tag == "imp":
        return imp(_build(tnode[2], table, impl_mode, where, impl_order, meta_uids),
                   _build(tnode[3], table, impl_mode, where, impl_order, meta_uids))
    if tag == "and":
        return conj(_build(tnode[2], table, impl_mode, where, impl_order, meta_uids),
                    _build(tnode[3], table, impl_mode, where, impl_order, meta_uids))
    raise AssertionError(tag)


def _has_tymeta(ty: Ty) -> bool:
    if isinstance(ty, TyMeta):
        return True
    if isinstance(ty, TyArr):
        return _has_tymeta(ty.dom) or _has_tymeta(ty.cod)
    return False


def elaborate(node: PNode, sig: Signature, mode: str = "clause") -> Term:
    """Turn a parse tree into a term.

    mode "clause": implicit capitals are pi-quantified at the front, the
    result must be type o and fit the clause grammar.
    mode "goal": capitals become free variables; goal grammar enforced.
    mode "query": capitals become engine metavariables (logic-programming
    reading of a query); goal grammar enforced.
    """
    table = _TyTable()
    impl: dict[str, Ty] = {}
    tnode = _infer(node, [], sig, impl, table)
    table.unify(tnode[1], O, node)
    impl_order: list[str] = []
    term = _build(tnode, table, "meta" if mode == "query" else "var",
                  node, impl_order, {})
    if mode == "clause":
        for name in reversed(impl_order):
            ty = table.resolve_deep(impl[name])
            if _has_tymeta(ty):
                raise ParseError(f"ambiguous type for {name}; add an annotation",
                                 node.line, node.col)
            term = pi(name, ty, term)
        check_clause(term)
    else:
        check_goal(term)
    return term


# -- programs --------------------------------------------------------------------------------

BASE_KINDS = ("olist",)  # reserved for the emitted Abella side; not usable in .hh


def parse_source(src: str) -> ParsedFile:
    """Parse declarations, clauses and directives from `.hh` source text."""
    ts = _TokenStream(tokenize(src))
    sig = Signature()
    kinds: set[str] = set()
    kind_order: list[str] = []
    clauses: list[Term] = []
    directives: list[Directive] = []
    clause_index = 0
    while ts.peek().kind != "EOF":
        t = ts.peek()
        if t.kind == "DIRECTIVE":
            ts.next()
            body_txt = t.text[1:]  # drop '%'
            kind = "strengthen" if body_txt.startswith("strengthen") else "context"
            rest = body_txt[len(kind):].strip()
            if not rest.endswith("."):
                raise ParseError(f"%{kind} directive must end with '.'", t.line, t.col)
            directives.append(Directive(kind, rest[:-1].strip(), t.line, t.col))
            continue
        if t.kind == "KW" and t.text == "kind":
            ts.next()
            name = ts.expect("IDENT", "a type name")
            kw = ts.expect("KW", "'type'")
            if kw.text != "type":
                raise ParseError("expected 'type'", kw.line, kw.col)
            ts.expect("DOT", "'.'")
            if name.text in RESERVED_TYPES or name.text in BASE_KINDS:
                raise ParseError(f"type name {name.text!r} is reserved",
                                 name.line, name.col)
            if name.text in kinds:
                raise ParseError(f"type {name.text!r} declared twice",
                                 name.line, name.col)
            kinds.add(name.text)
            kind_order.append(name.text)
            continue
        if t.kind == "KW" and t.text == "type":
            ts.next()
            name = ts.expect("IDENT", "a constant name")
            ty = _parse_tyexpr(ts, kinds)
            ts.expect("DOT", "'.'")
            if name.text in LOGICAL_NAMES:
                raise ParseError(f"constant name {name.text!r} is reserved",
                                 name.line, name.col)
            try:
                sig = sig.extend_const(name.text, ty)
            except Exception:
                raise ParseError(f"constant {name.text!r} declared twice",
                                 name.line, name.col)
            continue
        node = _parse_expr(ts, kinds)
        ts.expect("DOT", "'.' at end of clause")
        try:
            term = elaborate(node, sig, mode="clause")
        except (UnknownIdentifier,) as e:
            raise ProgramTypeError(clause_index, str(e))
        except ParseError:
            raise
        except (NonRigidAtomError, NotAClause):
            raise
        clauses.append(term)
        clause_index += 1
    program = Program(sig, tuple(clauses), tuple(kind_order))
    return ParsedFile(program, tuple(directives))


def parse_program(src: str) -> Program:
    return parse_source(src).program


def parse_goal(src: str, program: Program, mode: str = "goal") -> Term:
    """Parse a standalone goal against a program's signature."""
    ts = _TokenStream(tokenize(src))
    node = _parse_expr(ts, set(program.kinds))
    ts.expect("EOF", "end of goal")
    return elaborate(node, program.sig, mode=mode)


def parse_clause(src: str, program: Program) -> Term:
    """Parse a standalone clause against a program's signature."""
    ts = _TokenStream(tokenize(src))
    node = _parse_expr(ts, set(program.kinds))
    ts.expect("EOF", "end of clause")
    return elaborate(node, program.sig, mode="clause")


def split_directive_strengthen(d: Directive, program: Program):
    """Parse `%strengthen <name> from <clause> in <goal>.` into parts."""
    toks = tokenize(d.text)
    names = [t for t in toks if t.kind != "EOF"]
    if not names or names[0].kind != "IDENT":
        raise ParseError("expected a context name after %strengthen", d.line, d.col)
    ctx_name = names[0].text
    # locate 'from' ... 'in' keywords at paren depth 0
    depth = 0
    from_i = in_i = None
    for i, t in enumerate(names[1:], start=1):
        if t.kind == "LPAREN":
            depth += 1
        elif t.kind == "RPAREN":
            depth -= 1
        elif t.kind == "IDENT" and depth == 0:
            if t.text == "from" and from_i is None:
                from_i = i
            elif t.text == "in":
                in_i = i
    if from_i is None or in_i is None or in_i <= from_i:
        raise ParseError("%strengthen expects '<ctx> from <clause> in <goal>'",
                         d.line, d.col)
    clause_txt = _untokenize(names[from_i + 1:in_i])
    goal_txt = _untokenize(names[in_i + 1:])
    return ctx_name, parse_clause(clause_txt, program), parse_goal(goal_txt, program)


def split_directive_context(d: Directive, program: Program):
    """Parse `%context <name> <clause>.` into (name, clause)."""
    toks = [t for t in tokenize(d.text) if t.kind != "EOF"]
    if not toks or toks[0].kind != "IDENT":
        raise ParseError("expected a context name after %context", d.line, d.col)
    return toks[0].text, parse_clause(_untokenize(toks[1:]), program)


def _untokenize(toks: list[Token]) -> str:
    return " ".join(t.text for t in toks)


# -- printing ----------------------------------------------------------------------------------

def print_program(program: Program) -> str:
    """Round-trippable `.hh` text for a parsed program."""
    lines = []
    for k in program.kinds:
        lines.append(f"kind {k} type.")
    for name, ty in program.sig.consts.items():
        lines.append(f"type {name} {pp_ty(ty)}.")
    if lines and program.clauses:
        lines.append("")
    for c in program.clauses:
        lines.append(f"{pp_formula(c)}.")
    return "\n".join(lines) + "\n"
