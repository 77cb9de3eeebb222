"""Goal formulas and program clauses over the term kernel.

Formulas are ordinary terms of type `o` built with the logical constants
`true`, `&`, `=>` and the `pi` quantifier family, so alpha-equality, beta-eta
normalization and substitution all come from the kernel for free.  This
module supplies the grammar views:

    G ::= true | Ar | G & G | D => G | pi x. G
    D ::= G => Ar | pi x. D          (facts are bare rigid atoms)

plus clause normalization to the shape `pi xs. (G1 & ... & Gn) => A` that the
context and dependency collectors pattern-match on, the head-predicate and
body accessors, and the Program container.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import NoHead, NonRigidAtomError, NotAClause
from .terms import (
    AND_NAME, IMP_NAME, LOGICAL_NAMES, PI_NAME, TOP_NAME,
    O, Abs, App, Bound, Const, Meta, Signature, Term, Ty, TyArr, Var,
    app_spine, arrow, fresh_name, free_vars, lam, normalize, open_term,
    pp_ty, spine, ty_flatten, type_of,
)

BIN_TY = arrow(O, O, O)
TOP = Const(TOP_NAME, O)


def imp(antecedent: Term, consequent: Term) -> Term:
    return App(App(Const(IMP_NAME, BIN_TY), antecedent), consequent)


def conj(left: Term, right: Term) -> Term:
    return App(App(Const(AND_NAME, BIN_TY), left), right)


def pi(name: str, ty: Ty, body: Term) -> Term:
    """pi x:ty. body, with body given in named form."""
    return App(Const(PI_NAME, TyArr(TyArr(ty, O), O)), lam(name, ty, body))


def pi_abs(fn: Term) -> Term:
    """pi applied to an existing abstraction of type ty -> o."""
    fty = type_of(fn)
    if not (isinstance(fty, TyArr) and fty.cod == O):
        raise NotAClause(f"pi body must have type t -> o, got {fty!r}")
    return App(Const(PI_NAME, TyArr(fty, O)), fn)


# -- views -----------------------------------------------------------------------

@dataclass(frozen=True)
class GTop:
    pass


@dataclass(frozen=True)
class GAtom:
    pred: str
    args: tuple[Term, ...]
    term: Term


@dataclass(frozen=True)
class GAnd:
    left: Term
    right: Term


@dataclass(frozen=True)
class GImp:
    antecedent: Term
    consequent: Term


@dataclass(frozen=True)
class GPi:
    ty: Ty
    fn: Term  # the abstraction of type ty -> o


GView = GTop | GAtom | GAnd | GImp | GPi


def formula_view(t: Term) -> GView:
    """Classify a type-o term by its top connective.

    Atoms with a non-constant head (variable, metavariable, or bound index)
    raise NonRigidAtomError; `formula_view` never applies reduction, so pass
    normalized terms.
    """
    head, args = spine(t)
    if isinstance(head, Const):
        if head.name == TOP_NAME and not args:
            return GTop()
        if head.name == AND_NAME and len(args) == 2:
            return GAnd(args[0], args[1])
        if head.name == IMP_NAME and len(args) == 2:
            return GImp(args[0], args[1])
        if head.name == PI_NAME and len(args) == 1:
            fn = args[0]
            fty = type_of(fn)
            assert isinstance(fty, TyArr)
            return GPi(fty.dom, fn)
        if head.name in LOGICAL_NAMES:
            raise NonRigidAtomError(f"partially applied logical constant {head.name}")
        return GAtom(head.name, tuple(args), t)
    raise NonRigidAtomError(f"formula head is not a predicate constant: {head!r}")


def open_pi(g: GPi, name_taken: set[str], hint: str | None = None) -> tuple[Var, Term]:
    """Open a pi body with a fresh named variable; returns (var, opened body)."""
    base = hint or (g.fn.hint if isinstance(g.fn, Abs) else "x")
    name = fresh_name(base, name_taken)
    v = Var(name, g.ty)
    if isinstance(g.fn, Abs):
        return v, open_term(g.fn.body, v)
    return v, App(g.fn, v)


def is_atom(t: Term) -> bool:
    try:
        return isinstance(formula_view(t), GAtom)
    except NonRigidAtomError:
        return False


# -- grammar validation ------------------------------------------------------------

def check_goal(t: Term) -> None:
    """Check membership in the goal grammar G; raises NonRigidAtomError/NotAClause."""
    v = formula_view(t)
    if isinstance(v, GTop):
        return
    if isinstance(v, GAtom):
        return
    if isinstance(v, GAnd):
        check_goal(v.left)
        check_goal(v.right)
        return
    if isinstance(v, GImp):
        check_clause(v.antecedent)
        check_goal(v.consequent)
        return
    assert isinstance(v, GPi)
    _, body = open_pi(v, free_vars(t))
    check_goal(body)


def check_clause(t: Term) -> None:
    """Check membership in the clause grammar D (facts allowed as bare atoms)."""
    v = formula_view(t)
    if isinstance(v, GAtom):
        return
    if isinstance(v, GImp):
        check_goal(v.antecedent)
        check_clause(v.consequent)  # chained implications are accepted
        return
    if isinstance(v, GPi):
        _, body = open_pi(v, free_vars(t))
        check_clause(body)
        return
    raise NotAClause(f"not a program clause: head position holds {type(v).__name__}")


# -- heads and bodies -----------------------------------------------------------------

def head_atom(t: Term, taken: set[str] | None = None) -> Term:
    """The rigid atom a clause or goal reduces to; raises NoHead on true/&."""
    taken = set(taken) if taken is not None else free_vars(t)
    v = formula_view(t)
    if isinstance(v, GAtom):
        return v.term
    if isinstance(v, GImp):
        return head_atom(v.consequent, taken)
    if isinstance(v, GPi):
        var, body = open_pi(v, taken)
        taken.add(var.name)
        return head_atom(body, taken)
    if isinstance(v, GTop):
        raise NoHead("true has no rigid head")
    raise NoHead("conjunction has no single head")


def head_pred(t: Term) -> str:
    """The head predicate: leftmost constant of the head atom."""
    atom = head_atom(t)
    head, _ = spine(atom)
    assert isinstance(head, Const)
    return head.name


def body(g: Term) -> list[Term]:
    """The clause antecedents exposed while goal-reducing g to its atomic head.

    L(true) = L(A) = L(G1 & G2) = [];  L(D => G) = [D] + L(G);
    L(pi x. G) = L(G).  Order follows the reduction; duplicates are kept once.
    """
    out: list[Term] = []
    taken = free_vars(g)

    def go(t: Term) -> None:
        v = formula_view(t)
        if isinstance(v, GImp):
            if v.antecedent not in out:
                out.append(v.antecedent)
            go(v.consequent)
        elif isinstance(v, GPi):
            var, opened = open_pi(v, taken)
            taken.add(var.name)
            go(opened)

    go(g)
    return out


# -- normalized clause shape ------------------------------------------------------------

@dataclass(frozen=True)
class NormalClause:
    """A clause reshaped as pi binders, a flat antecedent list, and an atomic head."""
    binders: tuple[tuple[str, Ty], ...]
    antecedents: tuple[Term, ...]
    head: Term  # rigid atom; binder variables occur free

    @property
    def head_pred(self) -> str:
        h, _ = spine(self.head)
        assert isinstance(h, Const)
        return h.name


def _flatten_and(g: Term) -> list[Term]:
    v = formula_view(g)
    if isinstance(v, GAnd):
        return _flatten_and(v.left) + _flatten_and(v.right)
    return [g]


def normalize_clause(d: Term) -> NormalClause:
    """Hoist binders, flatten chained implications and top-level conjunctions.

    Both `G1 => G2 => A` and `(G1 & G2) => A` normalize to antecedents
    [G1, G2] with head A; interleaved pi binders are hoisted to the front.
    """
    taken = free_vars(d)
    binders: list[tuple[str, Ty]] = []
    antecedents: list[Term] = []
    t = d
    while True:
        v = formula_view(t)
        if isinstance(v, GPi):
            var, t = open_pi(v, taken)
            taken.add(var.name)
            binders.append((var.name, var.ty))
        elif isinstance(v, GImp):
            antecedents.extend(_flatten_and(v.antecedent))
            t = v.consequent
        elif isinstance(v, GAtom):
            return NormalClause(tuple(binders), tuple(antecedents), t)
        else:
            raise NotAClause("clause head position is not an atom")


def renest_clause(nc: NormalClause) -> Term:
    """Rebuild pi xs. (G1 & ... & Gn) => A (right-nested conjunction)."""
    t = nc.head
    if nc.antecedents:
        g = nc.antecedents[-1]
        for a in reversed(nc.antecedents[:-1]):
            g = conj(a, g)
        t = imp(g, t)
    for name, ty in reversed(nc.binders):
        t = pi(name, ty, t)
    return t


# -- canonical keys for clause sets -------------------------------------------------------

def canonical_key(t: Term) -> Term:
    """Identity of formulas in sets: beta-eta normal form with free variables
    renamed positionally.  Binder hints are already ignored by equality."""
    n = normalize(t)
    renaming: dict[str, str] = {}
    for v in _frees_in_order(n):
        renaming.setdefault(v.name, f"_{len(renaming)}")

    def go(u: Term) -> Term:
        if isinstance(u, Var):
            return Var(renaming[u.name], u.ty)
        if isinstance(u, Abs):
            return Abs(u.arg_ty, go(u.body), "")
        if isinstance(u, App):
            return App(go(u.fn), go(u.arg))
        return u

    return go(n)


def _frees_in_order(t: Term) -> list[Var]:
    out: list[Var] = []
    seen: set[str] = set()

    def go(u: Term) -> None:
        if isinstance(u, Var):
            if u.name not in seen:
                seen.add(u.name)
                out.append(u)
        elif isinstance(u, Abs):
            go(u.body)
        elif isinstance(u, App):
            go(u.fn)
            go(u.arg)

    go(t)
    return out


class FormulaSet:
    """An insertion-ordered set of formulas modulo alpha-equivalence of
    beta-eta normal forms.  Stores the first-seen display form."""

    __slots__ = ("_keys", "_display")

    def __init__(self, items=()):
        self._keys: set[Term] = set()
        self._display: list[Term] = []
        for t in items:
            self.add(t)

    def add(self, t: Term) -> bool:
        k = canonical_key(t)
        if k in self._keys:
            return False
        self._keys.add(k)
        self._display.append(t)
        return True

    def __contains__(self, t: Term) -> bool:
        return canonical_key(t) in self._keys

    def __iter__(self):
        return iter(self._display)

    def __len__(self):
        return len(self._display)

    def issubset(self, other: "FormulaSet") -> bool:
        return self._keys <= other._keys

    def __repr__(self):
        return f"FormulaSet({[pp_formula(t) for t in self._display]})"


# -- programs ----------------------------------------------------------------------------

def is_pred_ty(ty: Ty) -> bool:
    _, result = ty_flatten(ty)
    return result == O


@dataclass(frozen=True)
class Program:
    """A signature plus clause list; the static context of all judgments."""
    sig: Signature
    clauses: tuple[Term, ...]
    kinds: tuple[str, ...] = ()

    @property
    def predicates(self) -> list[str]:
        """Predicate constants occurring in the clauses, first-occurrence order."""
        out: list[str] = []
        seen: set[str] = set()

        def go(t: Term) -> None:
            if isinstance(t, Const):
                if t.name not in LOGICAL_NAMES and t.name not in seen and is_pred_ty(t.ty):
                    seen.add(t.name)
                    out.append(t.name)
            elif isinstance(t, Abs):
                go(t.body)
            elif isinstance(t, App):
                go(t.fn)
                go(t.arg)

        for c in self.clauses:
            go(c)
        return out


# -- formula printing -----------------------------------------------------------------------

def _needs_parens_in_arg(t: Term) -> bool:
    return isinstance(t, (App, Abs))


def pp_formula(t: Term, annotate_pi: bool = True) -> str:
    """Concrete `.hh` syntax: `=>` right-associative, `&` binding tighter,
    `pi x : ty \\ body`, `true`, application by juxtaposition."""
    from .terms import consts_of
    frees = free_vars(t) | consts_of(t)

    # precedence levels: 0 = imp, 1 = and, 2 = application, 3 = atomic
    def go(u: Term, env: list[str], level: int) -> str:
        if isinstance(u, (Const, Var)):
            return u.name
        if isinstance(u, Meta):
            return f"?{u.name}"
        if isinstance(u, Bound):
            return env[u.idx] if u.idx < len(env) else f"#{u.idx}"
        if isinstance(u, Abs):
            name = fresh_name(u.hint, frees | set(env))
            s = f"{name}\\ {go(u.body, [name] + env, 0)}"
            # binders extend maximally right: parenthesize unless rightmost
            return f"({s})" if level >= 1 else s
        head, args = spine(u)
        if isinstance(head, Const) and head.name == IMP_NAME and len(args) == 2:
            s = f"{go(args[0], env, 1)} => {go(args[1], env, 0)}"
            return f"({s})" if level >= 1 else s
        if isinstance(head, Const) and head.name == AND_NAME and len(args) == 2:
            s = f"{go(args[0], env, 2)} & {go(args[1], env, 1)}"
            return f"({s})" if level >= 2 else s
        if isinstance(head, Const) and head.name == PI_NAME and len(args) == 1 \
                and isinstance(args[0], Abs):
            fn = args[0]
            name = fresh_name(fn.hint, frees | set(env))
            ann = f" : {pp_ty(fn.arg_ty)}" if annotate_pi else ""
            s = f"pi {name}{ann} \\ {go(fn.body, [name] + env, 0)}"
            return f"({s})" if level >= 1 else s
        if not args:
            return go(head, env, 3)
        parts = [go(head, env, 3)] + [go(a, env, 3) for a in args]
        s = " ".join(parts)
        return f"({s})" if level >= 3 else s

    return go(t, [], 0)
