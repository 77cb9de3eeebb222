"""Dynamic-context and predicate-dependency fixpoint analyses.

Two constraint collectors feed two least-fixpoint solvers:

  * context constraints: processing each clause `pi xs. (G1 & ... & Gn) => A`
    (and, recursively, every clause reachable through antecedent bodies)
    yields `C(hp(Gi)) >= C(hp(A)) u L(Gi)`; the solution C(a) over-approximates
    the formulas that can sit in the dynamic context while proving an a-headed
    goal.
  * dependency constraints: for every predicate a and every clause with head
    predicate a among the program clauses and C(a), the provability of a
    depends on the head predicates of the clause's antecedents; solutions are
    seeded with `a in S(a)`.

The strengthening check then asks whether the head predicate of the formula
to discard can be reached from the goal's head predicate.  The analysis is
deliberately conservative: formulas from different conjunctive branches are
pooled, so some dependencies are overestimated.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import NoHead, NonRigidAtomError, UndefinedPredicate
from .formulas import (
    FormulaSet, GTop, NormalClause, Program, body, canonical_key, formula_view,
    head_pred, is_pred_ty, normalize_clause, pp_formula,
)
from .terms import Term, free_vars_ordered


@dataclass(frozen=True)
class ContextConstraint:
    """One equation C(target) = C(target) u C(p1) u ... u {formulas}."""
    target: str
    includes_context_of: tuple[str, ...]
    includes_formulas: tuple[Term, ...]

    def __repr__(self):
        srcs = " u ".join(f"C({p})" for p in self.includes_context_of)
        fs = ", ".join(pp_formula(f) for f in self.includes_formulas)
        return f"C({self.target}) >= {srcs}" + (f" u {{{fs}}}" if fs else "")


@dataclass(frozen=True)
class DependencyConstraint:
    """One equation S(target) = S(target) u S(p1) u ... u S(pn)."""
    target: str
    includes_deps_of: tuple[str, ...]

    def __repr__(self):
        srcs = " u ".join(f"S({p})" for p in self.includes_deps_of)
        return f"S({self.target}) >= {srcs}"


ContextMap = dict[str, FormulaSet]
DependencyMap = dict[str, list[str]]


def _antecedent_head(g: Term) -> str | None:
    """Head predicate of an antecedent goal, or None for true / ambiguous
    conjunctions / non-rigid heads (defensively skipped by both collectors)."""
    try:
        return head_pred(g)
    except (NoHead, NonRigidAtomError):
        return None


def collect_context_constraints(
        program: Program, extra_clauses: tuple[Term, ...] = ()) -> list[ContextConstraint]:
    """Worklist pass over the clauses and every clause nested in antecedent
    bodies; each distinct clause (modulo alpha-equivalence of normal forms)
    is processed once."""
    out: list[ContextConstraint] = []
    worklist: list[Term] = list(program.clauses) + list(extra_clauses)
    seen: set[Term] = set()
    while worklist:
        d = worklist.pop(0)
        key = canonical_key(d)
        if key in seen:
            continue
        seen.add(key)
        try:
            nc = normalize_clause(d)
        except Exception:
            continue  # defensively skip malformed context formulas
        head = nc.head_pred
        for g in nc.antecedents:
            hp = _antecedent_head(g)
            formulas = tuple(body(g))
            if hp is not None:
                out.append(ContextConstraint(hp, (head,), formulas))
            worklist.extend(formulas)
    return out


def solve_context_fixpoint(
        constraints: list[ContextConstraint], preds: list[str],
        seeds: dict[str, list[Term]] | None = None) -> ContextMap:
    """Least map closed under the constraints (above the seeds, when given)."""
    ctx: ContextMap = {}

    def cell(name: str) -> FormulaSet:
        if name not in ctx:
            ctx[name] = FormulaSet()
        return ctx[name]

    for p in preds:
        cell(p)
    for c in constraints:
        cell(c.target)
        for p in c.includes_context_of:
            cell(p)
    if seeds:
        for p, formulas in seeds.items():
            target = cell(p)
            for f in formulas:
                target.add(f)
    changed = True
    while changed:
        changed = False
        for c in constraints:
            target = ctx[c.target]
            for f in c.includes_formulas:
                if target.add(f):
                    changed = True
            for p in c.includes_context_of:
                for f in list(ctx[p]):
                    if target.add(f):
                        changed = True
    return ctx


def collect_dependency_constraints(
        program: Program, ctx: ContextMap,
        extra_static: tuple[Term, ...] = ()) -> list[DependencyConstraint]:
    """For every predicate a and clause D in the static context or C(a) with
    head predicate a, S(a) grows by the dependencies of D's antecedent heads."""
    out: list[DependencyConstraint] = []
    static = list(program.clauses) + list(extra_static)
    preds = _pred_universe(program, ctx)
    for a in preds:
        candidates = list(static) + list(ctx.get(a, ()))
        seen: set[Term] = set()
        for d in candidates:
            key = canonical_key(d)
            if key in seen:
                continue
            seen.add(key)
            try:
                nc = normalize_clause(d)
            except Exception:
                continue
            if nc.head_pred != a:
                continue
            heads = tuple(h for g in nc.antecedents
                          if (h := _antecedent_head(g)) is not None)
            if heads:
                out.append(DependencyConstraint(a, heads))
    return out


def solve_dependency_fixpoint(
        constraints: list[DependencyConstraint], preds: list[str]) -> DependencyMap:
    """Least map with a in S(a) closed under the constraints."""
    deps: dict[str, list[str]] = {}

    def cell(name: str) -> list[str]:
        if name not in deps:
            deps[name] = [name]  # a predicate depends on itself
        return deps[name]

    for p in preds:
        cell(p)
    for c in constraints:
        cell(c.target)
        for p in c.includes_deps_of:
            cell(p)
    changed = True
    while changed:
        changed = False
        for c in constraints:
            target = cell(c.target)
            for p in c.includes_deps_of:
                for q in list(deps[p]):
                    if q not in target:
                        target.append(q)
                        changed = True
    return deps


def _pred_universe(program: Program, ctx: ContextMap) -> list[str]:
    out = list(program.predicates)
    seen = set(out)
    for p in ctx:
        if p not in seen:
            seen.add(p)
            out.append(p)
    return out


# -- the strengthening verdict ------------------------------------------------------

@dataclass(frozen=True)
class Validated:
    deps: tuple[str, ...]       # dependency order, goal's predicate first
    contexts: "ContextMap" = field(repr=False)
    dependencies: "DependencyMap" = field(repr=False)


@dataclass(frozen=True)
class Blocked:
    pred: str  # head predicate of the formula that may be depended on
    contexts: "ContextMap" = field(repr=False)
    dependencies: "DependencyMap" = field(repr=False)


Verdict = Validated | Blocked


def analyze_program(program: Program,
                    extra_static: tuple[Term, ...] = (),
                    seeds: list[Term] | None = None
                    ) -> tuple[ContextMap, DependencyMap]:
    """Run both collectors and fixpoints.  `extra_static` joins the clause
    worklist; `seeds` are poured into every predicate's dynamic context."""
    constraints = collect_context_constraints(program, tuple(extra_static))
    preds = program.predicates
    seed_map = None
    if seeds:
        universe = list(preds)
        for c in constraints:
            if c.target not in universe:
                universe.append(c.target)
        seed_map = {p: list(seeds) for p in universe}
    ctx = solve_context_fixpoint(constraints, preds, seed_map)
    dcs = collect_dependency_constraints(program, ctx, tuple(extra_static))
    deps = solve_dependency_fixpoint(dcs, _pred_universe(program, ctx))
    return ctx, deps


def check_strengthenable(program: Program, f: Term, g: Term,
                         extra_ctx: tuple[Term, ...] = ()) -> Verdict:
    """The strengthen-tactic preprocessing and dependency check.

    The user-context formulas and the goal's antecedent bodies join the
    static context for the context calculation and seed every predicate's
    dynamic context; strengthening G from F is blocked when hp(F) lands in
    S(hp(G)).
    """
    hp_g = _declared_head(program, g)
    hp_f = head_pred(f)
    seeds = list(extra_ctx) + body(g)
    ctx, deps = analyze_program(program, tuple(seeds), seeds)
    reachable = deps.get(hp_g, [hp_g])
    if hp_f in reachable:
        return Blocked(hp_f, ctx, deps)
    order = (hp_g,) + tuple(sorted(p for p in reachable if p != hp_g))
    return Validated(order, ctx, deps)


def _declared_head(program: Program, g: Term) -> str:
    hp = head_pred(g)
    ty = program.sig.lookup(hp)
    if ty is None or not is_pred_ty(ty):
        raise UndefinedPredicate(hp)
    return hp


# -- report serialization --------------------------------------------------------------

def analysis_report(ctx: ContextMap, deps: DependencyMap,
                    verdict: Verdict | None = None) -> dict:
    """JSON-ready document: per-predicate contexts and dependencies plus the
    verdict fields used by the command-line reports."""
    doc: dict = {
        "contexts": {p: [pp_formula(t) for t in fs] for p, fs in ctx.items()},
        "dependencies": {p: list(names) for p, names in deps.items()},
        "verdict": None,
        "blocked_on": None,
    }
    if isinstance(verdict, Validated):
        doc["verdict"] = "validated"
    elif isinstance(verdict, Blocked):
        doc["verdict"] = "blocked"
        doc["blocked_on"] = verdict.pred
    return doc


def render_report(doc: dict) -> str:
    lines = []
    lines.append("contexts:")
    for p, fs in doc["contexts"].items():
        if fs:
            lines.append(f"  C({p}) = {{{', '.join(fs)}}}")
        else:
            lines.append(f"  C({p}) = {{}}")
    lines.append("dependencies:")
    for p, names in doc["dependencies"].items():
        lines.append(f"  S({p}) = {{{', '.join(names)}}}")
    if doc.get("verdict"):
        lines.append(f"verdict: {doc['verdict']}")
        if doc.get("blocked_on"):
            lines.append(f"blocked_on: {doc['blocked_on']}")
    return "\n".join(lines) + "\n"
