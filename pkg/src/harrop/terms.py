"""Simply-typed lambda-calculus kernel.

Terms use a locally nameless representation: bound variables are de Bruijn
indices (`Bound`), free variables and constants are named.  Binder nodes keep
the surface name only as a printing hint, excluded from equality, so plain
`==` on terms is alpha-equivalence.  Types are checked eagerly, Church style:
every node can report its type locally and ill-typed applications cannot be
constructed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import SignatureError, TypeMismatch, UnknownIdentifier


# -- types ---------------------------------------------------------------------

@dataclass(frozen=True)
class Ty:
    pass


@dataclass(frozen=True)
class TyCon(Ty):
    name: str

    def __repr__(self):
        return self.name


@dataclass(frozen=True)
class TyArr(Ty):
    dom: Ty
    cod: Ty

    def __repr__(self):
        d = f"({self.dom!r})" if isinstance(self.dom, TyArr) else repr(self.dom)
        return f"{d} -> {self.cod!r}"


O = TyCon("o")        # type of object-logic formulas
PROP = TyCon("prop")  # reserved for emitted Abella text
RESERVED_TYPES = frozenset({"o", "prop"})

IMP_NAME = "=>"
AND_NAME = "&"
TOP_NAME = "true"
PI_NAME = "pi"
LOGICAL_NAMES = frozenset({IMP_NAME, AND_NAME, TOP_NAME, PI_NAME})


def arrow(*tys: Ty) -> Ty:
    """Right-associated arrow type from a list of types (last is the result)."""
    if not tys:
        raise ValueError("arrow() needs at least one type")
    out = tys[-1]
    for t in reversed(tys[:-1]):
        out = TyArr(t, out)
    return out


def ty_flatten(ty: Ty) -> tuple[list[Ty], Ty]:
    """Split a type into (argument types, final result type)."""
    args = []
    while isinstance(ty, TyArr):
        args.append(ty.dom)
        ty = ty.cod
    return args, ty


# -- terms ---------------------------------------------------------------------

@dataclass(frozen=True)
class Term:
    pass


@dataclass(frozen=True)
class Const(Term):
    name: str
    ty: Ty


@dataclass(frozen=True)
class Var(Term):
    """A free, named variable."""
    name: str
    ty: Ty


@dataclass(frozen=True)
class Meta(Term):
    """An instantiable variable used by the proof-search engine."""
    name: str
    ty: Ty
    uid: int


@dataclass(frozen=True)
class Bound(Term):
    idx: int
    ty: Ty


@dataclass(frozen=True)
class Abs(Term):
    arg_ty: Ty
    body: Term
    hint: str = field(default="x", compare=False)

    @property
    def ty(self) -> Ty:
        return TyArr(self.arg_ty, type_of(self.body))


@dataclass(frozen=True)
class App(Term):
    fn: Term
    arg: Term

    def __post_init__(self):
        fty = type_of(self.fn)
        if not isinstance(fty, TyArr):
            raise TypeMismatch(f"applying a non-function of type {fty!r}")
        aty = type_of(self.arg)
        if fty.dom != aty:
            raise TypeMismatch(f"argument type {aty!r} does not match domain {fty.dom!r}")

    @property
    def ty(self) -> Ty:
        return type_of(self.fn).cod


def type_of(t: Term) -> Ty:
    """The structural type of a term (no signature consulted)."""
    return t.ty


# -- de Bruijn plumbing ----------------------------------------------------------

def shift(t: Term, d: int, cutoff: int = 0) -> Term:
    if isinstance(t, Bound):
        return Bound(t.idx + d, t.ty) if t.idx >= cutoff else t
    if isinstance(t, Abs):
        return Abs(t.arg_ty, shift(t.body, d, cutoff + 1), t.hint)
    if isinstance(t, App):
        return App(shift(t.fn, d, cutoff), shift(t.arg, d, cutoff))
    return t


def open_term(body: Term, repl: Term, depth: int = 0) -> Term:
    """Replace Bound(depth) with repl, removing one binder level."""
    if isinstance(body, Bound):
        if body.idx == depth:
            return shift(repl, depth)
        if body.idx > depth:
            return Bound(body.idx - 1, body.ty)
        return body
    if isinstance(body, Abs):
        return Abs(body.arg_ty, open_term(body.body, repl, depth + 1), body.hint)
    if isinstance(body, App):
        return App(open_term(body.fn, repl, depth), open_term(body.arg, repl, depth))
    return body


def close_term(t: Term, name: str, ty: Ty, depth: int = 0) -> Term:
    if isinstance(t, Var) and t.name == name:
        if t.ty != ty:
            raise TypeMismatch(f"variable {name} used at type {t.ty!r}, bound at {ty!r}")
        return Bound(depth, ty)
    if isinstance(t, Abs):
        return Abs(t.arg_ty, close_term(t.body, name, ty, depth + 1), t.hint)
    if isinstance(t, App):
        return App(close_term(t.fn, name, ty, depth), close_term(t.arg, name, ty, depth))
    return t


def lam(name: str, ty: Ty, body: Term) -> Term:
    """Abstract the free variable `name : ty` out of body."""
    return Abs(ty, close_term(body, name, ty), name)


def spine(t: Term) -> tuple[Term, list[Term]]:
    """Unwind applications: returns (head, [arg1, ..., argn])."""
    args: list[Term] = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fn
    args.reverse()
    return t, args


def app_spine(head: Term, args: list[Term] | tuple[Term, ...]) -> Term:
    out = head
    for a in args:
        out = App(out, a)
    return out


# -- free variables / occurrence checks ------------------------------------------

def free_vars(t: Term) -> set[str]:
    out: set[str] = set()
    _walk_frees(t, out)
    return out


def _walk_frees(t: Term, out: set[str]) -> None:
    if isinstance(t, Var):
        out.add(t.name)
    elif isinstance(t, Abs):
        _walk_frees(t.body, out)
    elif isinstance(t, App):
        _walk_frees(t.fn, out)
        _walk_frees(t.arg, out)


def free_vars_ordered(t: Term) -> list[Var]:
    """Free Var nodes in first-occurrence order (each name once)."""
    seen: dict[str, Var] = {}

    def go(u: Term) -> None:
        if isinstance(u, Var):
            if u.name not in seen:
                seen[u.name] = u
        elif isinstance(u, Abs):
            go(u.body)
        elif isinstance(u, App):
            go(u.fn)
            go(u.arg)

    go(t)
    return list(seen.values())


def metas_of(t: Term) -> list[Meta]:
    out: dict[int, Meta] = {}

    def go(u: Term) -> None:
        if isinstance(u, Meta):
            out.setdefault(u.uid, u)
        elif isinstance(u, Abs):
            go(u.body)
        elif isinstance(u, App):
            go(u.fn)
            go(u.arg)

    go(t)
    return list(out.values())


def consts_of(t: Term) -> set[str]:
    out: set[str] = set()

    def go(u: Term) -> None:
        if isinstance(u, Const):
            out.add(u.name)
        elif isinstance(u, Abs):
            go(u.body)
        elif isinstance(u, App):
            go(u.fn)
            go(u.arg)

    go(t)
    return out


def _uses_index(t: Term, idx: int) -> bool:
    if isinstance(t, Bound):
        return t.idx == idx
    if isinstance(t, Abs):
        return _uses_index(t.body, idx + 1)
    if isinstance(t, App):
        return _uses_index(t.fn, idx) or _uses_index(t.arg, idx)
    return False


# -- substitution -----------------------------------------------------------------

def substitute(t: Term, name: str, repl: Term) -> Term:
    """Capture-avoiding substitution of repl for the free variable `name`.

    Bound occurrences are untouched by construction (they are indices, not
    names).  Raises TypeMismatch if some occurrence of the variable has a
    type different from repl's.
    """
    rty = type_of(repl)

    def go(u: Term, depth: int) -> Term:
        if isinstance(u, Var) and u.name == name:
            if u.ty != rty:
                raise TypeMismatch(
                    f"substituting term of type {rty!r} for {name} of type {u.ty!r}")
            return shift(repl, depth)
        if isinstance(u, Abs):
            return Abs(u.arg_ty, go(u.body, depth + 1), u.hint)
        if isinstance(u, App):
            return App(go(u.fn, depth), go(u.arg, depth))
        return u

    return go(t, 0)


def subst_metas(t: Term, binding: dict[int, Term]) -> Term:
    """Replace bound metavariables; shifts replacements under binders."""
    def go(u: Term, depth: int) -> Term:
        if isinstance(u, Meta) and u.uid in binding:
            return shift(go(binding[u.uid], 0), depth)
        if isinstance(u, Abs):
            return Abs(u.arg_ty, go(u.body, depth + 1), u.hint)
        if isinstance(u, App):
            fn = go(u.fn, depth)
            arg = go(u.arg, depth)
            return App(fn, arg)
        return u

    return go(t, 0)


# -- normalization ------------------------------------------------------------------

def beta_normalize(t: Term) -> Term:
    """Full beta-normal form, normal (leftmost-outermost) order."""
    if isinstance(t, App):
        fn = beta_normalize(t.fn)
        if isinstance(fn, Abs):
            return beta_normalize(open_term(fn.body, t.arg))
        return App(fn, beta_normalize(t.arg))
    if isinstance(t, Abs):
        return Abs(t.arg_ty, beta_normalize(t.body), t.hint)
    return t


def eta_contract(t: Term) -> Term:
    """Bottom-up eta-contraction; on beta-normal input the result is eta-normal."""
    if isinstance(t, App):
        return App(eta_contract(t.fn), eta_contract(t.arg))
    if isinstance(t, Abs):
        body = eta_contract(t.body)
        if isinstance(body, App) and isinstance(body.arg, Bound) and body.arg.idx == 0 \
                and not _uses_index(body.fn, 0):
            return shift(body.fn, -1)
        return Abs(t.arg_ty, body, t.hint)
    return t


def normalize(t: Term) -> Term:
    """Beta-eta-normal form: full beta first, then eta to a fixed point."""
    return eta_contract(beta_normalize(t))


def alpha_equal(t1: Term, t2: Term) -> bool:
    """Equality up to bound-variable renaming (no beta/eta steps applied)."""
    return t1 == t2


def beta_eta_equal(t1: Term, t2: Term) -> bool:
    """Term equality used everywhere else: normalize, then compare up to alpha."""
    return normalize(t1) == normalize(t2)


# -- signatures ------------------------------------------------------------------------

class Signature:
    """An immutable map from names to types, split into constants and variables."""

    __slots__ = ("consts", "vars")

    def __init__(self, consts: dict[str, Ty] | None = None,
                 vars: dict[str, Ty] | None = None):
        self.consts: dict[str, Ty] = dict(consts or {})
        self.vars: dict[str, Ty] = dict(vars or {})

    def lookup(self, name: str) -> Ty | None:
        ty = self.consts.get(name)
        return ty if ty is not None else self.vars.get(name)

    def __contains__(self, name: str) -> bool:
        return name in self.consts or name in self.vars

    def extend_const(self, name: str, ty: Ty) -> "Signature":
        if name in self:
            raise SignatureError(f"identifier already declared: {name}")
        out = Signature(self.consts, self.vars)
        out.consts[name] = ty
        return out

    def extend_var(self, name: str, ty: Ty) -> "Signature":
        if name in self:
            raise SignatureError(f"identifier already declared: {name}")
        out = Signature(self.consts, self.vars)
        out.vars[name] = ty
        return out

    def __repr__(self):
        cs = ", ".join(f"{n}:{t!r}" for n, t in self.consts.items())
        vs = ", ".join(f"{n}:{t!r}" for n, t in self.vars.items())
        return f"Signature({cs}{'; ' if vs else ''}{vs})"


def _logical_ty_ok(name: str, ty: Ty) -> bool:
    bin_ty = TyArr(O, TyArr(O, O))
    if name in (IMP_NAME, AND_NAME):
        return ty == bin_ty
    if name == TOP_NAME:
        return ty == O
    # pi_t : (t -> o) -> o for each type t
    return (isinstance(ty, TyArr) and isinstance(ty.dom, TyArr)
            and ty.dom.cod == O and ty.cod == O)


def infer_type(sig: Signature, t: Term) -> Ty:
    """Type of t under sig, checking the typing rules throughout.

    Raises UnknownIdentifier for constants/variables absent from sig and
    TypeMismatch when an application's domain disagrees with its argument,
    when a declared type conflicts with a node annotation, or when an index
    disagrees with its binder.
    """
    def go(u: Term, env: list[Ty]) -> Ty:
        if isinstance(u, Meta):
            return u.ty
        if isinstance(u, Const) and u.name in LOGICAL_NAMES:
            if not _logical_ty_ok(u.name, u.ty):
                raise TypeMismatch(f"logical constant {u.name} used at {u.ty!r}")
            return u.ty
        if isinstance(u, (Const, Var)):
            declared = sig.lookup(u.name)
            if declared is None:
                raise UnknownIdentifier(u.name)
            if declared != u.ty:
                raise TypeMismatch(
                    f"{u.name} declared at {declared!r} but used at {u.ty!r}")
            return declared
        if isinstance(u, Bound):
            if u.idx >= len(env):
                raise TypeMismatch(f"dangling bound index {u.idx}")
            if env[u.idx] != u.ty:
                raise TypeMismatch(
                    f"bound variable annotated {u.ty!r} under binder of {env[u.idx]!r}")
            return u.ty
        if isinstance(u, Abs):
            body_ty = go(u.body, [u.arg_ty] + env)
            return TyArr(u.arg_ty, body_ty)
        if isinstance(u, App):
            fty = go(u.fn, env)
            aty = go(u.arg, env)
            if not isinstance(fty, TyArr):
                raise TypeMismatch(f"applying a non-function of type {fty!r}")
            if fty.dom != aty:
                raise TypeMismatch(
                    f"argument type {aty!r} does not match domain {fty.dom!r}")
            return fty.cod
        raise TypeMismatch(f"unrecognized term node {u!r}")

    return go(t, [])


# -- printing ---------------------------------------------------------------------------

def fresh_name(base: str, taken: set[str]) -> str:
    """base, or base with the least numeric suffix absent from taken."""
    if base not in taken:
        return base
    i = 1
    while f"{base}{i}" in taken:
        i += 1
    return f"{base}{i}"


def pp_ty(ty: Ty) -> str:
    if isinstance(ty, TyCon):
        return ty.name
    assert isinstance(ty, TyArr)
    dom = pp_ty(ty.dom)
    if isinstance(ty.dom, TyArr):
        dom = f"({dom})"
    return f"{dom} -> {pp_ty(ty.cod)}"


def pp_term(t: Term) -> str:
    """Plain lambda-term printer (`x\\ body` abstractions, juxtaposition)."""
    frees = free_vars(t) | consts_of(t)

    def go(u: Term, env: list[str], atomic: bool) -> str:
        if isinstance(u, (Const, Var)):
            return u.name
        if isinstance(u, Meta):
            return f"?{u.name}"
        if isinstance(u, Bound):
            return env[u.idx] if u.idx < len(env) else f"#{u.idx}"
        if isinstance(u, Abs):
            name = fresh_name(u.hint, frees | set(env))
            s = f"{name}\\ {go(u.body, [name] + env, False)}"
            return f"({s})" if atomic else s
        head, args = spine(u)
        parts = [go(head, env, True)] + [go(a, env, True) for a in args]
        s = " ".join(parts)
        return f"({s})" if atomic else s

    return go(t, [], False)
