"""Bounded-depth proof search for hereditary Harrop sequents.

Search alternates goal reduction (trueR, andR, impR, piR) with backchaining:
once the goal is atomic, a clause is selected from the dynamic context
(most-recent first) or the static context (program order) and focused on
(impL, piL, init).  piL instantiation is delayed through metavariables and
discharged by higher-order pattern unification on beta-eta normal forms;
problems outside the pattern fragment make the search answer Unknown rather
than guess.

Depth counts one unit per focus and per impL; goal-reduction steps are free.
Refuted is reported only when the whole space below the bound was exhausted
without hitting the bound or an unsolvable-by-pattern problem, so both Proved
and Refuted are monotone in the depth bound.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from .errors import IllFormedSequent, NonRigidAtomError, NotAClause
from .formulas import (
    GAnd, GAtom, GImp, GPi, GTop, check_clause, check_goal, formula_view,
    pp_formula,
)
from .terms import (
    O, Abs, App, Bound, Const, Meta, Signature, Term, Ty, TyArr,
    Var, app_spine, infer_type, metas_of, normalize, open_term, shift, spine,
    subst_metas, ty_flatten, type_of,
)

TOP_R = "topR"
AND_R = "andR"
IMP_R = "impR"
PI_R = "piR"
IMP_L = "impL"
PI_L = "piL"
INIT = "init"
FOCUS = "focus"


# -- sequents -----------------------------------------------------------------

@dataclass(frozen=True)
class Sequent:
    sig: Signature
    static_ctx: tuple[Term, ...]
    dynamic_ctx: tuple[Term, ...]
    goal: Term


@dataclass(frozen=True)
class FocusedSequent:
    sig: Signature
    static_ctx: tuple[Term, ...]
    dynamic_ctx: tuple[Term, ...]
    focus: Term
    goal: Term  # atomic


# -- outcomes -------------------------------------------------------------------

@dataclass(frozen=True)
class TraceNode:
    rule: str
    goal: Term
    focus: Term | None = None
    witness: Term | None = None
    premises: tuple["TraceNode", ...] = ()

    def rules_preorder(self) -> list[str]:
        out = [self.rule]
        for p in self.premises:
            out.extend(p.rules_preorder())
        return out


@dataclass(frozen=True)
class Proved:
    trace: TraceNode


@dataclass(frozen=True)
class Refuted:
    pass


@dataclass(frozen=True)
class Unknown:
    reason: str = ""


SearchOutcome = Proved | Refuted | Unknown


# -- search state ------------------------------------------------------------------

class _State:
    __slots__ = ("counter", "meta_stamp", "eigen_stamp", "incomplete")

    def __init__(self):
        self.counter = 0
        self.meta_stamp: dict[int, int] = {}
        self.eigen_stamp: dict[str, int] = {}
        self.incomplete = False

    def fresh_eigen(self, ty: Ty, hint: str = "x") -> Const:
        self.counter += 1
        name = f"{hint}#{self.counter}"
        self.eigen_stamp[name] = self.counter
        return Const(name, ty)

    def fresh_meta(self, ty: Ty, hint: str = "X") -> Meta:
        # negative uids: never collide with parser-created query metavariables
        self.counter += 1
        uid = -self.counter
        self.meta_stamp[uid] = self.counter
        return Meta(f"{hint}{self.counter}", ty, uid)

    def stamp_of_const(self, name: str) -> int:
        return self.eigen_stamp.get(name, 0)  # program constants are oldest

    def lower_meta(self, uid: int, stamp: int) -> None:
        cur = self.meta_stamp.get(uid, 0)
        if stamp < cur:
            self.meta_stamp[uid] = stamp


Subst = dict[int, Term]


def _resolve(t: Term, subst: Subst) -> Term:
    while True:
        pending = [m for m in metas_of(t) if m.uid in subst]
        if not pending:
            return t
        t = subst_metas(t, subst)


def _nf(t: Term, subst: Subst) -> Term:
    return normalize(_resolve(t, subst))


# -- pattern unification --------------------------------------------------------------

def _open_with(t: Term, c: Const) -> Term:
    if isinstance(t, Abs):
        return open_term(t.body, c)
    return normalize(App(t, c))


def _occurs(uid: int, t: Term, rigid: bool = True) -> str | None:
    """Returns 'rigid' or 'flex' if meta uid occurs in t, else None."""
    head, args = spine(t)
    found = None
    if isinstance(head, Meta):
        if head.uid == uid:
            return "rigid" if rigid else "flex"
        for a in args:
            r = _occurs(uid, a, rigid=False)
            if r == "rigid":
                r = "flex"
            if r and found != "rigid":
                found = r
        return found
    if isinstance(t, Abs):
        return _occurs(uid, t.body, rigid)
    for a in args:
        r = _occurs(uid, a, rigid)
        if r == "rigid":
            return "rigid"
        if r:
            found = r
    return found


def _close_const(t: Term, name: str, ty: Ty, depth: int = 0) -> Term:
    if isinstance(t, Const) and t.name == name:
        return Bound(depth, ty)
    if isinstance(t, Abs):
        return Abs(t.arg_ty, _close_const(t.body, name, ty, depth + 1), t.hint)
    if isinstance(t, App):
        return App(_close_const(t.fn, name, ty, depth),
                   _close_const(t.arg, name, ty, depth))
    return t


def _try_bind(m: Meta, args: list[Term], t: Term, subst: Subst,
              state: _State) -> tuple[str, Subst]:
    """Attempt m args := t as a pattern problem."""
    names = []
    for a in args:
        if not (isinstance(a, Const) and a.name in state.eigen_stamp):
            return "unknown", subst
        if a.name in names:
            return "unknown", subst
        names.append(a.name)

    occ = _occurs(m.uid, t)
    if occ == "rigid":
        return "fail", subst
    if occ == "flex":
        return "unknown", subst

    stamp = state.meta_stamp.get(m.uid, 0)
    t_metas = metas_of(t)
    for c in _all_consts(t):
        cstamp = state.stamp_of_const(c)
        if cstamp > stamp and c not in names:
            # a constant introduced after this metavariable cannot appear in
            # its instantiation unless abstracted away
            return ("unknown" if t_metas else "fail"), subst
    for n in t_metas:
        state.lower_meta(n.uid, stamp)

    sol = t
    for a in reversed(args):
        assert isinstance(a, Const)
        sol = Abs(a.ty, _close_const(sol, a.name, a.ty), a.name.split("#")[0])
    return "ok", {**subst, m.uid: sol}


def _all_consts(t: Term) -> set[str]:
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


def unify(a: Term, b: Term, subst: Subst, state: _State) -> tuple[str, Subst]:
    """Unify beta-eta-normal terms; returns ('ok'|'fail'|'unknown', subst)."""
    eqs = [(a, b)]
    while eqs:
        x, y = eqs.pop()
        x, y = _nf(x, subst), _nf(y, subst)
        if x == y:
            continue
        # bind a bare metavariable directly (also keeps binder hints intact);
        # unknown outcomes fall through to the general cases below
        if isinstance(x, Meta) or isinstance(y, Meta):
            m, t = (x, y) if isinstance(x, Meta) else (y, x)
            st, subst2 = _try_bind(m, [], t, subst, state)
            if st == "ok":
                subst = subst2
                continue
            if st == "fail":
                return st, subst
        if isinstance(x, Abs) or isinstance(y, Abs):
            dom = x.arg_ty if isinstance(x, Abs) else y.arg_ty
            c = state.fresh_eigen(dom, "v")
            eqs.append((_open_with(x, c), _open_with(y, c)))
            continue
        hx, ax = spine(x)
        hy, ay = spine(y)
        flex_x = isinstance(hx, Meta)
        flex_y = isinstance(hy, Meta)
        if flex_x and flex_y and hx.uid == hy.uid:
            if ax == ay:
                continue
            return "unknown", subst
        if flex_x or flex_y:
            if flex_x:
                st, subst2 = _try_bind(hx, ax, y, subst, state)
            else:
                st = "unknown"
            if st == "unknown" and flex_y:
                st, subst2 = _try_bind(hy, ay, x, subst, state)
            if st == "ok":
                subst = subst2
                continue
            return st, subst
        # rigid-rigid
        if hx != hy or len(ax) != len(ay):
            return "fail", subst
        eqs.extend(zip(ax, ay))
    return "ok", subst


# -- the prover ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _Env:
    sig: Signature
    static: tuple[Term, ...]
    dyn: tuple[Term, ...]


def _node(rule: str, goal: Term, focus: Term | None = None,
          witness: Term | None = None,
          premises: tuple[TraceNode, ...] = ()) -> TraceNode:
    return TraceNode(rule, goal, focus, witness, premises)


def _prove(env: _Env, goal: Term, depth: int, subst: Subst,
           state: _State) -> Iterator[tuple[Subst, TraceNode]]:
    g = _nf(goal, subst)
    try:
        v = formula_view(g)
    except NonRigidAtomError:
        state.incomplete = True  # flexible goal head: outside the fragment
        return
    if isinstance(v, GTop):
        yield subst, _node(TOP_R, g)
        return
    if isinstance(v, GAnd):
        for s1, tr1 in _prove(env, v.left, depth, subst, state):
            for s2, tr2 in _prove(env, v.right, depth, s1, state):
                yield s2, _node(AND_R, g, premises=(tr1, tr2))
        return
    if isinstance(v, GImp):
        inner = _Env(env.sig, env.static, env.dyn + (v.antecedent,))
        for s1, tr1 in _prove(inner, v.consequent, depth, subst, state):
            yield s1, _node(IMP_R, g, premises=(tr1,))
        return
    if isinstance(v, GPi):
        hint = v.fn.hint if isinstance(v.fn, Abs) else "x"
        c = state.fresh_eigen(v.ty, hint)
        body = App(v.fn, c)
        for s1, tr1 in _prove(env, body, depth, subst, state):
            yield s1, _node(PI_R, g, witness=c, premises=(tr1,))
        return
    # atomic: switch to backchaining
    if depth < 1:
        state.incomplete = True
        return
    for d in tuple(reversed(env.dyn)) + env.static:
        for s1, tr1 in _focus(env, d, g, depth - 1, subst, state):
            yield s1, _node(FOCUS, g, focus=_nf(d, subst), premises=(tr1,))


def _focus(env: _Env, focus: Term, goal_atom: Term, depth: int, subst: Subst,
           state: _State) -> Iterator[tuple[Subst, TraceNode]]:
    f = _nf(focus, subst)
    try:
        v = formula_view(f)
    except NonRigidAtomError:
        state.incomplete = True
        return
    if isinstance(v, GAtom):
        st, s1 = unify(f, goal_atom, subst, state)
        if st == "ok":
            yield s1, _node(INIT, goal_atom, focus=f)
        elif st == "unknown":
            state.incomplete = True
        return
    if isinstance(v, GImp):
        if depth < 1:
            state.incomplete = True
            return
        for s1, tr_head in _focus(env, v.consequent, goal_atom, depth - 1, subst, state):
            for s2, tr_goal in _prove(env, v.antecedent, depth - 1, s1, state):
                yield s2, _node(IMP_L, goal_atom, focus=f,
                                premises=(tr_head, tr_goal))
        return
    if isinstance(v, GPi):
        hint = v.fn.hint if isinstance(v.fn, Abs) else "T"
        m = state.fresh_meta(v.ty, hint.upper() if hint else "T")
        inner = App(v.fn, m)
        for s1, tr in _focus(env, inner, goal_atom, depth, subst, state):
            yield s1, _node(PI_L, goal_atom, focus=f, witness=m, premises=(tr,))
        return
    # true / conjunction in focus position: not a clause, no derivation
    return


# -- entry points ----------------------------------------------------------------------------

def _validate(seq: Sequent) -> None:
    try:
        if infer_type(seq.sig, seq.goal) != O:
            raise IllFormedSequent("goal is not a formula")
        check_goal(seq.goal)
        for d in seq.static_ctx + seq.dynamic_ctx:
            if infer_type(seq.sig, d) != O:
                raise IllFormedSequent("context clause is not a formula")
            check_clause(d)
    except IllFormedSequent:
        raise
    except Exception as e:
        raise IllFormedSequent(str(e)) from e


def solve(seq: Sequent, depth: int) -> SearchOutcome:
    """Bounded search for the sequent; Proved outcomes carry a replayable trace."""
    if depth < 1:
        raise IllFormedSequent("depth must be at least 1")
    _validate(seq)
    state = _State()
    env = _Env(seq.sig, seq.static_ctx, seq.dynamic_ctx)
    for subst, trace in _prove(env, seq.goal, depth, {}, state):
        resolved = _finalize(trace, subst, seq.sig, state)
        if resolved is not None:
            return Proved(resolved)
        state.incomplete = True
    return Unknown("bound or non-pattern problem hit") if state.incomplete else Refuted()


def solve_focused(fseq: FocusedSequent, depth: int) -> SearchOutcome:
    """Backchaining-mode search with an explicit focus."""
    if depth < 0:
        raise IllFormedSequent("depth must be non-negative")
    try:
        if infer_type(fseq.sig, fseq.goal) != O:
            raise IllFormedSequent("goal is not a formula")
        if not isinstance(formula_view(fseq.goal), GAtom):
            raise IllFormedSequent("focused goal must be atomic")
        check_clause(fseq.focus)
    except IllFormedSequent:
        raise
    except Exception as e:
        raise IllFormedSequent(str(e)) from e
    state = _State()
    env = _Env(fseq.sig, fseq.static_ctx, fseq.dynamic_ctx)
    for subst, trace in _focus(env, fseq.focus, fseq.goal, depth, {}, state):
        resolved = _finalize(trace, subst, fseq.sig, state)
        if resolved is not None:
            return Proved(resolved)
        state.incomplete = True
    return Unknown("bound or non-pattern problem hit") if state.incomplete else Refuted()


def check_weakening(seq: Sequent, extra: Term, depth: int) -> bool:
    """True iff the sequent stays provable after adding `extra` to the
    dynamic context; callers arrange that seq itself is Proved at depth."""
    widened = Sequent(seq.sig, seq.static_ctx, seq.dynamic_ctx + (extra,), seq.goal)
    return isinstance(solve(widened, depth), Proved)


# -- trace finalization -------------------------------------------------------------------------

def _synthesize(ty: Ty, sig: Signature, fuel: int = 3) -> Term | None:
    """A closed term of the given type from signature constants, if easy."""
    if fuel <= 0:
        return None
    for name, cty in sig.consts.items():
        if cty == ty:
            return Const(name, cty)
    if isinstance(ty, TyArr):
        body = _synthesize(ty.cod, sig, fuel - 1)
        if body is not None:
            return Abs(ty.dom, shift(body, 1), "w")
        return None
    for name, cty in sig.consts.items():
        args, res = ty_flatten(cty)
        if res == ty and args:
            built = []
            for a in args:
                sub = _synthesize(a, sig, fuel - 1)
                if sub is None:
                    break
                built.append(sub)
            else:
                return app_spine(Const(name, cty), built)
    return None


def _finalize(trace: TraceNode, subst: Subst, sig: Signature,
              state: _State) -> TraceNode | None:
    """Apply the final substitution to the trace; synthesize terms for any
    metavariable the proof never constrained.  None if that is impossible."""
    leftovers: dict[int, Term] = {}

    def collect(node: TraceNode) -> bool:
        for t in (node.goal, node.focus, node.witness):
            if t is None:
                continue
            for m in metas_of(_resolve(t, subst)):
                if m.uid not in leftovers:
                    g = _synthesize(m.ty, sig)
                    if g is None:
                        return False
                    leftovers[m.uid] = g
        return all(collect(p) for p in node.premises)

    if not collect(trace):
        return None
    full = {**subst, **leftovers}

    def rebuild(node: TraceNode) -> TraceNode:
        return TraceNode(
            node.rule,
            _nf(node.goal, full),
            _nf(node.focus, full) if node.focus is not None else None,
            _nf(node.witness, full) if node.witness is not None else None,
            tuple(rebuild(p) for p in node.premises),
        )

    return rebuild(trace)


# -- trace replay ----------------------------------------------------------------------------

def replay_trace(seq: Sequent, trace: TraceNode) -> tuple[bool, str]:
    """Check every node against its inference-rule schema."""

    def fail(msg: str) -> tuple[bool, str]:
        return False, msg

    def at_goal(node: TraceNode, sig: Signature, dyn: tuple[Term, ...],
                goal: Term) -> tuple[bool, str]:
        if node.goal != normalize(goal):
            return fail(f"{node.rule}: goal mismatch")
        v = formula_view(node.goal)
        if node.rule == TOP_R:
            return (True, "") if isinstance(v, GTop) else fail("topR on non-true")
        if node.rule == AND_R:
            if not isinstance(v, GAnd) or len(node.premises) != 2:
                return fail("andR shape")
            ok, msg = at_goal(node.premises[0], sig, dyn, v.left)
            if not ok:
                return fail(msg)
            return at_goal(node.premises[1], sig, dyn, v.right)
        if node.rule == IMP_R:
            if not isinstance(v, GImp) or len(node.premises) != 1:
                return fail("impR shape")
            return at_goal(node.premises[0], sig, dyn + (v.antecedent,), v.consequent)
        if node.rule == PI_R:
            if not isinstance(v, GPi) or len(node.premises) != 1:
                return fail("piR shape")
            c = node.witness
            if not isinstance(c, Const):
                return fail("piR witness must be a constant")
            if c.name in sig:
                return fail("piR constant not fresh")
            sig2 = sig.extend_const(c.name, c.ty)
            return at_goal(node.premises[0], sig2, dyn, App(v.fn, c))
        if node.rule == FOCUS:
            if not isinstance(v, GAtom) or len(node.premises) != 1:
                return fail("focus shape")
            if node.focus is None or not any(
                    node.focus == normalize(d) for d in dyn + seq.static_ctx):
                return fail("focused clause not in context")
            return at_focus(node.premises[0], sig, dyn, node.focus, node.goal)
        return fail(f"unexpected rule {node.rule} in goal position")

    def at_focus(node: TraceNode, sig: Signature, dyn: tuple[Term, ...],
                 focus: Term, goal: Term) -> tuple[bool, str]:
        if node.focus != normalize(focus):
            return fail(f"{node.rule}: focus mismatch")
        if node.goal != normalize(goal):
            return fail(f"{node.rule}: goal mismatch")
        v = formula_view(node.focus)
        if node.rule == INIT:
            return (True, "") if node.focus == node.goal else fail("init: focus != goal")
        if node.rule == IMP_L:
            if not isinstance(v, GImp) or len(node.premises) != 2:
                return fail("impL shape")
            ok, msg = at_focus(node.premises[0], sig, dyn, v.consequent, goal)
            if not ok:
                return fail(msg)
            return at_goal(node.premises[1], sig, dyn, v.antecedent)
        if node.rule == PI_L:
            if not isinstance(v, GPi) or len(node.premises) != 1:
                return fail("piL shape")
            w = node.witness
            if w is None:
                return fail("piL without witness")
            try:
                if infer_type(sig, w) != v.ty:
                    return fail("piL witness type mismatch")
            except Exception as e:
                return fail(f"piL witness ill-typed: {e}")
            return at_focus(node.premises[0], sig, dyn, App(v.fn, w), goal)
        return fail(f"unexpected rule {node.rule} in focus position")

    try:
        return at_goal(trace, seq.sig, seq.dynamic_ctx, seq.goal)
    except Exception as e:  # malformed trace nodes
        return False, f"replay error: {e}"


# -- trace printing ----------------------------------------------------------------------------

def render_trace(trace: TraceNode) -> str:
    """Indented, one rule per line; stable across runs for fixed inputs."""
    lines: list[str] = []

    def go(node: TraceNode, depth: int) -> None:
        pad = "  " * depth
        if node.rule in (FOCUS, IMP_L, PI_L, INIT):
            s = f"{pad}{node.rule} [{pp_formula(node.focus)}] |- {pp_formula(node.goal)}"
        else:
            s = f"{pad}{node.rule} |- {pp_formula(node.goal)}"
        if node.witness is not None:
            s += f"  <{pp_formula(node.witness)}>"
        lines.append(s)
        for p in node.premises:
            go(p, depth + 1)

    go(trace, 0)
    return "\n".join(lines) + "\n"
