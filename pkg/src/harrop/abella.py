"""Generation of Abella `.thm` developments for strengthening lemmas.

For a validated plan this module emits, in dependency order: fixed-point
context definitions, context-membership lemmas, the subcontext lemmas the
main proof applies, the (mutually inductive when needed) strengthening
theorem with its tactic script, a `Split` when there are several conjuncts,
the user-context subcontext lemma, and the user-facing theorem.

Hypothesis labels in the generated scripts come from a counter that mirrors
Abella's numbering: a hypothesis number is never reused within a subgoal
lineage, `case` on a backchaining step adds one hypothesis per antecedent,
and each `apply` adds one.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import NotASubcontext, PlanMismatch, UnorderedArtifact
from .formulas import (
    AND_NAME, IMP_NAME, LOGICAL_NAMES, PI_NAME, TOP_NAME,
    FormulaSet, Program, formula_view, head_pred, normalize_clause, pp_formula,
)
from .terms import (
    Abs, App, Bound, Const, Meta, Term, TyArr, Var, consts_of, free_vars,
    free_vars_ordered, fresh_name, pp_ty, spine, ty_flatten,
)
from .analysis import ContextMap, Validated, _antecedent_head


# -- artifact items -----------------------------------------------------------------

TacticScript = tuple[str, ...]


@dataclass(frozen=True)
class SpecRef:
    name: str


@dataclass(frozen=True)
class Define:
    name: str
    ty: str
    clauses: tuple[tuple[str, str | None], ...]  # (head, optional body)


@dataclass(frozen=True)
class Theorem:
    name: str
    formula: str
    proof: TacticScript

    def __post_init__(self):
        if not self.proof:
            raise PlanMismatch(f"theorem {self.name} has an empty proof script")


@dataclass(frozen=True)
class Split:
    source: str
    names: tuple[str, ...]


AbellaItem = SpecRef | Define | Theorem | Split


@dataclass(frozen=True)
class AbellaArtifact:
    items: tuple[AbellaItem, ...]
    spec_name: str


# -- plans ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StrengtheningPlan:
    goal: Term
    strengthen_from: Term
    deps: tuple[str, ...]                       # a1 .. an, goal's predicate first
    contexts: dict[str, tuple[Term, ...]]       # per-predicate dynamic context
    user_ctx_name: str
    user_ctx: tuple[Term, ...]

    def __post_init__(self):
        if not self.deps:
            raise PlanMismatch("a plan needs at least one predicate")
        for a in self.deps:
            if a not in self.contexts:
                raise PlanMismatch(f"no context cell for predicate {a}")


def make_plan(program: Program, verdict: Validated, f: Term, g: Term,
              user_ctx_name: str, user_ctx: tuple[Term, ...]) -> StrengtheningPlan:
    contexts = {a: tuple(verdict.contexts[a]) for a in verdict.deps}
    return StrengtheningPlan(g, f, verdict.deps, contexts, user_ctx_name, user_ctx)


# -- object-formula rendering ----------------------------------------------------------

def obj(t: Term, rename: dict[str, str] | None = None,
        reserved: set[str] | None = None) -> str:
    """Abella object-logic syntax for a formula/term: `=>` and `pi x\\ ...`,
    application by juxtaposition; free variables go through `rename`.
    Binder names are lowercased and kept clear of constants, free variables
    and `reserved` names."""
    rename = rename or {}
    avoid = {rename.get(n, n) for n in free_vars(t)}
    avoid |= consts_of(t)
    avoid |= reserved or set()

    def binder(hint: str, env: list[str]) -> str:
        base = hint or "x"
        base = base[0].lower() + base[1:]
        return fresh_name(base, avoid | set(env))

    def go(u: Term, env: list[str], level: int) -> str:
        if isinstance(u, Const):
            return u.name
        if isinstance(u, Var):
            return rename.get(u.name, u.name)
        if isinstance(u, Meta):
            return u.name
        if isinstance(u, Bound):
            return env[u.idx] if u.idx < len(env) else f"#{u.idx}"
        if isinstance(u, Abs):
            name = binder(u.hint, env)
            s = f"{name}\\ {go(u.body, [name] + env, 0)}"
            return f"({s})" if level >= 1 else s
        head, args = spine(u)
        if isinstance(head, Const) and head.name == IMP_NAME and len(args) == 2:
            s = f"{go(args[0], env, 1)} => {go(args[1], env, 0)}"
            return f"({s})" if level >= 1 else s
        if isinstance(head, Const) and head.name == AND_NAME and len(args) == 2:
            # object conjunction is rare in emitted text; keep it grouped
            return f"({go(args[0], env, 1)} , {go(args[1], env, 1)})"
        if isinstance(head, Const) and head.name == PI_NAME and len(args) == 1 \
                and isinstance(args[0], Abs):
            fn = args[0]
            name = binder(fn.hint, env)
            s = f"pi {name}\\ {go(fn.body, [name] + env, 0)}"
            return f"({s})" if level >= 1 else s
        if not args:
            return go(head, env, 2)
        parts = [go(head, env, 2)] + [go(a, env, 2) for a in args]
        s = " ".join(parts)
        return f"({s})" if level >= 2 else s

    return go(t, [], 0)


def obj_atomic(t: Term, rename: dict[str, str] | None = None,
               reserved: set[str] | None = None) -> str:
    """Like obj() but parenthesized unless a bare name or application."""
    s = obj(t, rename, reserved)
    head, args = spine(t)
    connective = (isinstance(head, Const) and args
                  and head.name in (IMP_NAME, AND_NAME, PI_NAME))
    if connective or isinstance(t, Abs):
        return s if s.startswith("(") and s.endswith(")") else f"({s})"
    return s


def _capitalized_renaming(t: Term, reserved: set[str]) -> dict[str, str]:
    """Map each free variable to a capitalized, collision-free display name."""
    out: dict[str, str] = {}
    taken = set(reserved)
    for v in free_vars_ordered(t):
        base = v.name[0].upper() + v.name[1:] if v.name else "X"
        name = fresh_name(base, taken)
        taken.add(name)
        out[v.name] = name
    return out


# -- item generators ---------------------------------------------------------------------

def ctx_name(pred: str) -> str:
    return f"ctx_{pred}"


def ctx_member_name(pred: str) -> str:
    return f"ctx_member_{pred}"


def subctx_name(a: str, b: str) -> str:
    return f"subctx_{a}_{b}"


def gen_ctx_definition(pred: str, formulas: tuple[Term, ...],
                       name: str | None = None) -> Define:
    """Fixed-point definition admitting nil and each context formula as a cons."""
    name = name or ctx_name(pred)
    clauses: list[tuple[str, str | None]] = [(f"{name} nil", None)]
    for f in formulas:
        rename = _capitalized_renaming(f, {"L"})
        head = f"{name} ({obj_atomic(f, rename, reserved={'L'})} :: L)"
        clauses.append((head, f"{name} L"))
    return Define(name, "olist -> prop", tuple(clauses))


def gen_ctx_member_lemma(pred: str, formulas: tuple[Term, ...],
                         name: str | None = None,
                         ctx: str | None = None) -> Theorem:
    """Any member of a context-shaped list is one of finitely many formulas;
    with no formulas, membership is contradictory."""
    name = name or ctx_member_name(pred)
    ctx = ctx or ctx_name(pred)
    if not formulas:
        concl = "false"
    else:
        disjuncts = []
        for f in formulas:
            rename = _capitalized_renaming(f, {"E", "L"})
            eq = f"E = {obj_atomic(f, rename, reserved={'E', 'L'})}"
            if rename:
                bound = " ".join(rename[v.name] for v in free_vars_ordered(f))
                disjuncts.append(f"(exists {bound}, {eq})")
            else:
                disjuncts.append(eq)
        concl = " \\/ ".join(disjuncts)
    formula = f"forall E L, {ctx} L -> member E L -> {concl}"
    script: list[str] = ["induction on 1", "intros", "case H1", "case H2"]
    for _ in formulas:
        script += ["case H2", "search", "apply IH to H3 H4", "search"]
    return Theorem(name, formula, tuple(script))


def gen_subctx_lemma(a: str, b: str, ctx_map: ContextMap | dict,
                     name: str | None = None,
                     lhs_ctx: str | None = None,
                     lhs_formulas: tuple[Term, ...] | None = None) -> Theorem:
    """forall L, ctx_a L -> ctx_b L, valid when C(a) is a subset of C(b)."""
    if lhs_formulas is None:
        fa = ctx_map[a]
        lhs_formulas = tuple(fa)
    fb = ctx_map[b]
    target = fb if isinstance(fb, FormulaSet) else FormulaSet(fb)
    for f in lhs_formulas:
        if f not in target:
            raise NotASubcontext(
                f"context of {a} contains {pp_formula(f)}, absent from {b}'s")
    name = name or subctx_name(a, b)
    lhs_ctx = lhs_ctx or ctx_name(a)
    formula = f"forall L, {lhs_ctx} L -> {ctx_name(b)} L"
    script: list[str] = ["induction on 1", "intros", "case H1", "search"]
    for _ in lhs_formulas:
        script += ["apply IH to H2", "search"]
    return Theorem(name, formula, tuple(script))


def stren_theorem_name(plan: StrengtheningPlan) -> str:
    gpred = head_pred(plan.goal)
    fpred = head_pred(plan.strengthen_from)
    return f"stren_{gpred}_from_{fpred}"


def _ih_name(plan: StrengtheningPlan, pred: str) -> str:
    idx = plan.deps.index(pred)
    return "IH" if idx == 0 else f"IH{idx}"


def _conjunct_formula(plan: StrengtheningPlan, program: Program, pred: str) -> str:
    ty = program.sig.lookup(pred)
    arg_tys, _ = ty_flatten(ty)
    xs = [f"X{i}" for i in range(1, len(arg_tys) + 1)]
    atom = " ".join([pred] + xs)
    f_txt = obj_atomic(plan.strengthen_from, reserved={"L", *xs})
    binders = " ".join(["L"] + xs)
    return (f"forall {binders}, {ctx_name(pred)} L -> "
            f"{{L, {f_txt} |- {atom}}} -> {{L |- {atom}}}")


def gen_strengthening_conjunction(plan: StrengtheningPlan,
                                  program: Program) -> Theorem:
    """The mutually-inductive strengthening theorem: one conjunct per
    predicate in the dependency closure, goal's predicate first."""
    conjuncts = [_conjunct_formula(plan, program, a) for a in plan.deps]
    if len(conjuncts) == 1:
        formula = conjuncts[0]
    else:
        formula = " /\\\n  ".join(f"({c})" for c in conjuncts)
    script, _ = gen_stren_proof(plan, program)
    return Theorem(stren_theorem_name(plan), formula, script)


def gen_stren_proof(plan: StrengtheningPlan,
                    program: Program) -> tuple[TacticScript, list[tuple[str, str]]]:
    """The proof script for the mutually-inductive strengthening theorem.

    Also returns the (a, b) subcontext pairs the script applies, in first-use
    order, so the caller can emit exactly the needed subcontext lemmas.
    """
    n = len(plan.deps)
    script: list[str] = ["induction on " + " ".join(["2"] * n)]
    if n >= 2:
        script.append("split")
    pairs: list[tuple[str, str]] = []

    def note_pair(a: str, b: str) -> None:
        if (a, b) not in pairs:
            pairs.append((a, b))

    static_normal = [normalize_clause(c) for c in program.clauses]
    for a_i in plan.deps:
        script += ["intros", "case H2"]
        # backchaining on a static clause whose head predicate is a_i
        for nc in static_normal:
            if nc.head_pred != a_i:
                continue
            m = len(nc.antecedents)
            c = 2 + m  # antecedent hypotheses are H3 .. H(2+m)
            for j, g in enumerate(nc.antecedents, start=1):
                hp = _antecedent_head(g)
                if hp is None:
                    continue  # a `true` antecedent needs no strengthening step
                if hp not in plan.contexts:
                    raise PlanMismatch(f"no analysis cell for predicate {hp}")
                note_pair(a_i, hp)
                script.append(f"apply {subctx_name(a_i, hp)} to H1")
                c += 1
                script.append(f"apply {_ih_name(plan, hp)} to H{c} H{2 + j}")
                c += 1
            script.append("search")
        # backchaining on the dynamic context (F or a defined context formula)
        script += ["case H4", "case H3"]
        script.append(f"apply {ctx_member_name(a_i)} to H1 H5")
        forms = plan.contexts[a_i]
        p = len(forms)
        if p > 1:
            script.append("case H6")
        for d in forms:
            script.append("case H3")
            nc = normalize_clause(d)
            if nc.head_pred != a_i:
                continue  # heads that cannot match close the subgoal outright
            m = len(nc.antecedents)
            c = 6 + m  # antecedent hypotheses are H7 .. H(6+m)
            for k, g in enumerate(nc.antecedents, start=1):
                hp = _antecedent_head(g)
                if hp is None:
                    continue
                if hp not in plan.contexts:
                    raise PlanMismatch(f"no analysis cell for predicate {hp}")
                note_pair(a_i, hp)
                script.append(f"apply {subctx_name(a_i, hp)} to H1")
                c += 1
                script.append(f"apply {_ih_name(plan, hp)} to H{c} H{6 + k}")
                c += 1
            script.append("search")
    return tuple(script), pairs


def gen_user_theorem_proof(plan: StrengtheningPlan) -> TacticScript:
    """Proof of the user-entered strengthening theorem via the user-context
    subcontext lemma and the relevant strengthening conjunct."""
    hpg = plan.deps[0]
    part = stren_theorem_name(plan)
    if len(plan.deps) > 1:
        part = f"{part}_1"
    return (
        "intros",
        f"apply {plan.user_ctx_name}_subctx_{ctx_name(hpg)} to H1",
        f"apply {part} to H3 H2",
        "search",
    )


def gen_user_theorem(plan: StrengtheningPlan) -> Theorem:
    hpg = plan.deps[0]
    goal_vars = [v.name for v in free_vars_ordered(plan.goal)]
    binders = " ".join(["L"] + goal_vars)
    f_txt = obj_atomic(plan.strengthen_from, reserved={"L", *goal_vars})
    g_txt = obj(plan.goal, reserved={"L"})
    formula = (f"forall {binders}, {plan.user_ctx_name} L -> "
               f"{{L, {f_txt} |- {g_txt}}} -> {{L |- {g_txt}}}")
    name = f"{stren_theorem_name(plan)}_user"
    return Theorem(name, formula, gen_user_theorem_proof(plan))


def build_development(program: Program, plan: StrengtheningPlan,
                      spec_name: str) -> AbellaArtifact:
    """Assemble the complete `.thm` development for a validated plan."""
    items: list[AbellaItem] = [SpecRef(spec_name)]
    items.append(gen_ctx_definition(plan.user_ctx_name, plan.user_ctx,
                                    name=plan.user_ctx_name))
    for a in plan.deps:
        items.append(gen_ctx_definition(a, plan.contexts[a]))
    for a in plan.deps:
        items.append(gen_ctx_member_lemma(a, plan.contexts[a]))
    script, pairs = gen_stren_proof(plan, program)
    ctx_map = {a: FormulaSet(plan.contexts[a]) for a in plan.deps}
    for a, b in pairs:
        items.append(gen_subctx_lemma(a, b, ctx_map))
    stren = gen_strengthening_conjunction(plan, program)
    items.append(stren)
    if len(plan.deps) >= 2:
        names = tuple(f"{stren.name}_{i}" for i in range(1, len(plan.deps) + 1))
        items.append(Split(stren.name, names))
    hpg = plan.deps[0]
    user_sub = gen_subctx_lemma(
        plan.user_ctx_name, hpg, ctx_map,
        name=f"{plan.user_ctx_name}_subctx_{ctx_name(hpg)}",
        lhs_ctx=plan.user_ctx_name,
        lhs_formulas=plan.user_ctx)
    items.append(user_sub)
    items.append(gen_user_theorem(plan))
    return AbellaArtifact(tuple(items), spec_name)


# -- rendering ---------------------------------------------------------------------------

def render(artifact: AbellaArtifact) -> str:
    """Abella concrete syntax; definition-before-use is checked first."""
    _check_ordering(artifact)
    if not artifact.items:
        return ""
    chunks: list[str] = []
    for item in artifact.items:
        if isinstance(item, SpecRef):
            chunks.append(f'Specification "{item.name}".')
        elif isinstance(item, Define):
            lines = [f"Define {item.name} : {item.ty} by"]
            rendered = []
            for head, body_txt in item.clauses:
                rendered.append(f"  {head}" if body_txt is None
                                else f"  {head} := {body_txt}")
            lines.append(";\n".join(rendered) + ".")
            chunks.append("\n".join(lines))
        elif isinstance(item, Theorem):
            lines = [f"Theorem {item.name} : {item.formula}."]
            lines += [f"{t}." for t in item.proof]
            chunks.append("\n".join(lines))
        elif isinstance(item, Split):
            chunks.append(f"Split {item.source} as {', '.join(item.names)}.")
    return "\n\n".join(chunks) + "\n"


_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


def _check_ordering(artifact: AbellaArtifact) -> None:
    names: set[str] = set()
    for item in artifact.items:
        if isinstance(item, (Define, Theorem)):
            names.add(item.name)
        elif isinstance(item, Split):
            names.update(item.names)
    defined: set[str] = set()
    for item in artifact.items:
        if isinstance(item, SpecRef):
            continue
        if isinstance(item, Define):
            text = " ".join(h + " " + (b or "") for h, b in item.clauses)
            own = {item.name}
        elif isinstance(item, Theorem):
            text = item.formula + " " + " ".join(item.proof)
            own = {item.name}
        else:
            text = item.source
            own = set(item.names)
        for tok in _NAME_RE.findall(text):
            if tok in names and tok not in defined and tok not in own:
                raise UnorderedArtifact(f"{tok} referenced before its definition")
        defined.update(own)


# -- companion specification files ------------------------------------------------------------

def echo_sig(program: Program, name: str) -> str:
    lines = [f"sig {name}."]
    for k in program.kinds:
        lines.append(f"kind {k} type.")
    for cname, ty in program.sig.consts.items():
        lines.append(f"type {cname} {pp_ty(ty)}.")
    return "\n".join(lines) + "\n"


def echo_mod(program: Program, name: str) -> str:
    lines = [f"module {name}."]
    for clause in program.clauses:
        nc = normalize_clause(clause)
        reserved: set[str] = set(program.sig.consts)
        rename: dict[str, str] = {}
        for bname, _ in nc.binders:
            cap = bname[0].upper() + bname[1:] if bname else "X"
            rename[bname] = fresh_name(cap, reserved | set(rename.values()))
        head_txt = obj(nc.head, rename)
        if nc.antecedents:
            body_txt = ", ".join(obj_atomic(g, rename) for g in nc.antecedents)
            lines.append(f"{head_txt} :- {body_txt}.")
        else:
            lines.append(f"{head_txt}.")
    return "\n".join(lines) + "\n"


# -- a parser for the emitted subset -------------------------------------------------------------

@dataclass(frozen=True)
class ThmSkeleton:
    kind: str                 # "specification" | "define" | "theorem" | "split"
    name: str
    clause_count: int = 0
    tactics: tuple[str, ...] = ()
    formula: str = ""


def parse_thm(text: str) -> list[ThmSkeleton]:
    """Structural parser for the emitted Abella subset; raises ValueError on
    text outside it.  Used to check that rendered output re-parses."""
    items: list[ThmSkeleton] = []
    statements = _split_statements(text)
    i = 0
    while i < len(statements):
        s = statements[i]
        if s.startswith("Specification"):
            m = re.match(r'Specification\s+"([^"]+)"$', s)
            if not m:
                raise ValueError(f"bad Specification statement: {s!r}")
            items.append(ThmSkeleton("specification", m.group(1)))
            i += 1
        elif s.startswith("Define"):
            m = re.match(r"Define\s+([A-Za-z0-9_]+)\s*:\s*(.*?)\s+by\s+(.*)$",
                         s, re.DOTALL)
            if not m:
                raise ValueError(f"bad Define statement: {s!r}")
            clauses = _split_top(m.group(3), ";")
            items.append(ThmSkeleton("define", m.group(1), clause_count=len(clauses)))
            i += 1
        elif s.startswith("Theorem"):
            m = re.match(r"Theorem\s+([A-Za-z0-9_]+)\s*:\s*(.*)$", s, re.DOTALL)
            if not m:
                raise ValueError(f"bad Theorem statement: {s!r}")
            name, formula = m.group(1), m.group(2)
            tactics = []
            i += 1
            while i < len(statements) and _is_tactic(statements[i]):
                tactics.append(statements[i])
                i += 1
            if not tactics:
                raise ValueError(f"theorem {name} has no proof")
            items.append(ThmSkeleton("theorem", name, tactics=tuple(tactics),
                                     formula=formula))
        elif s.startswith("Split"):
            m = re.match(r"Split\s+([A-Za-z0-9_]+)\s+as\s+(.*)$", s)
            if not m:
                raise ValueError(f"bad Split statement: {s!r}")
            items.append(ThmSkeleton("split", m.group(1)))
            i += 1
        else:
            raise ValueError(f"unrecognized statement: {s!r}")
    return items


_TACTIC_HEADS = ("induction", "intros", "case", "apply", "search", "split")


def _is_tactic(s: str) -> bool:
    return s.split(" ", 1)[0] in _TACTIC_HEADS


def _split_statements(text: str) -> list[str]:
    """Split on '.' at brace/paren depth zero; normalizes whitespace."""
    out: list[str] = []
    depth = 0
    cur: list[str] = []
    in_str = False
    for ch in text:
        if in_str:
            cur.append(ch)
            if ch == '"':
                in_str = False
            continue
        if ch == '"':
            in_str = True
            cur.append(ch)
            continue
        if ch in "({[":
            depth += 1
        elif ch in ")}]":
            depth -= 1
        if ch == "." and depth == 0:
            stmt = " ".join("".join(cur).split())
            if stmt:
                out.append(stmt)
            cur = []
        else:
            cur.append(ch)
    tail = " ".join("".join(cur).split())
    if tail:
        raise ValueError(f"trailing text without '.': {tail!r}")
    return out


def _split_top(text: str, sep: str) -> list[str]:
    out: list[str] = []
    depth = 0
    cur: list[str] = []
    for ch in text:
        if ch in "({[":
            depth += 1
        elif ch in ")}]":
            depth -= 1
        if ch == sep and depth == 0:
            out.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    if "".join(cur).strip():
        out.append("".join(cur).strip())
    return out
