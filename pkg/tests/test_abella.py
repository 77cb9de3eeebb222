import pytest

from harrop.abella import (
    AbellaArtifact, Define, Split, SpecRef, StrengtheningPlan, Theorem,
    build_development, echo_mod, echo_sig, gen_ctx_definition,
    gen_ctx_member_lemma, gen_stren_proof, gen_strengthening_conjunction,
    gen_subctx_lemma, gen_user_theorem, gen_user_theorem_proof, make_plan,
    parse_thm, render,
)
from harrop.analysis import Validated, check_strengthenable
from harrop.errors import NotASubcontext, PlanMismatch, UnorderedArtifact
from harrop.formulas import FormulaSet, body, imp, normalize_clause
from harrop.parser import parse_clause, parse_goal, parse_program
from harrop.terms import Const, O

from conftest import GOLDEN, corpus_text


def _prop(name):
    return Const(name, O)


S, R, P = _prop("s"), _prop("r"), _prop("p")
SR, RP = imp(S, R), imp(R, P)


def _plan_for(src_name, f_text, g_text, user_name="uctx", user=()):
    prog = parse_program(corpus_text(src_name))
    f = parse_clause(f_text, prog)
    g = parse_goal(g_text, prog)
    v = check_strengthenable(prog, f, g, tuple(user))
    assert isinstance(v, Validated)
    return prog, make_plan(prog, v, f, g, user_name, tuple(user))


# -- context definitions -----------------------------------------------------------

def test_ctx_definition_two_formulas():
    d = gen_ctx_definition("p", (SR, RP))
    assert d.name == "ctx_p"
    assert d.ty == "olist -> prop"
    assert len(d.clauses) == 3
    assert d.clauses[0] == ("ctx_p nil", None)
    assert d.clauses[1] == ("ctx_p ((s => r) :: L)", "ctx_p L")
    assert d.clauses[2] == ("ctx_p ((r => p) :: L)", "ctx_p L")


def test_ctx_definition_empty():
    d = gen_ctx_definition("append", ())
    assert d.clauses == (("ctx_append nil", None),)


def test_ctx_definition_closes_over_variables(typeof_program):
    nc = normalize_clause(typeof_program.clauses[1])
    (formula,) = body(nc.antecedents[0])  # typeof x T1, frees x and T1
    d = gen_ctx_definition("typeof", (formula,))
    assert len(d.clauses) == 2
    head, bdy = d.clauses[1]
    assert head == "ctx_typeof (typeof X T1 :: L)"
    assert bdy == "ctx_typeof L"


# -- membership lemmas --------------------------------------------------------------

def test_member_lemma_two_formulas():
    t = gen_ctx_member_lemma("p", (SR, RP))
    assert t.name == "ctx_member_p"
    assert "E = (s => r) \\/ E = (r => p)" in t.formula
    # 4 + 4n tactic invocations (figure preamble plus two per-formula blocks)
    assert len(t.proof) == 4 + 4 * 2
    assert t.proof[:4] == ("induction on 1", "intros", "case H1", "case H2")
    assert t.proof[4:8] == ("case H2", "search", "apply IH to H3 H4", "search")


def test_member_lemma_empty_concludes_false():
    t = gen_ctx_member_lemma("append", ())
    assert t.formula.endswith("-> false")
    assert t.proof == ("induction on 1", "intros", "case H1", "case H2")


def test_member_lemma_single_atom_no_exists():
    t = gen_ctx_member_lemma("q", (Const("a", O),))
    assert t.formula.endswith("-> E = a")
    assert "exists" not in t.formula


def test_member_lemma_quantifies_formula_variables(typeof_program):
    nc = normalize_clause(typeof_program.clauses[1])
    (formula,) = body(nc.antecedents[0])
    t = gen_ctx_member_lemma("typeof", (formula,))
    assert "(exists X T1, E = typeof X T1)" in t.formula


# -- subcontext lemmas ----------------------------------------------------------------

def test_subctx_empty_context():
    ctx = {"a": FormulaSet(), "b": FormulaSet()}
    t = gen_subctx_lemma("a", "b", ctx)
    assert t.formula == "forall L, ctx_a L -> ctx_b L"
    assert t.proof == ("induction on 1", "intros", "case H1", "search")


def test_subctx_reflexive_two_formulas():
    ctx = {"p": FormulaSet([SR, RP])}
    t = gen_subctx_lemma("p", "p", ctx)
    # 4 + 2n tactic invocations
    assert len(t.proof) == 4 + 2 * 2
    assert t.proof[4:] == ("apply IH to H2", "search", "apply IH to H2", "search")


def test_subctx_precondition_violated():
    ctx = {"a": FormulaSet([SR]), "b": FormulaSet()}
    with pytest.raises(NotASubcontext):
        gen_subctx_lemma("a", "b", ctx)


# -- the strengthening conjunction ------------------------------------------------------

def test_single_predicate_plan_has_no_split():
    prog, plan = _plan_for("list_minus.hh", "append nil L L", "list_minus X L1 L2")
    t = gen_strengthening_conjunction(plan, prog)
    assert "/\\" not in t.formula
    assert "split" not in t.proof
    assert t.proof[0] == "induction on 2"


def test_two_predicate_plan_conjunction():
    prog, plan = _plan_for("guarded.hh", "f", "g", user_name="gctx")
    assert plan.deps == ("g", "a")
    t = gen_strengthening_conjunction(plan, prog)
    assert t.formula.count("forall") == 2
    assert t.formula.count("/\\") == 1
    script, _ = gen_stren_proof(plan, prog)
    assert script[0] == "induction on 2 2"
    assert script[1] == "split"


def test_conjunct_quantifies_goal_arguments():
    prog, plan = _plan_for("list_minus.hh", "append nil L L", "list_minus X L1 L2")
    t = gen_strengthening_conjunction(plan, prog)
    # context list plus the three argument variables of list_minus
    assert t.formula.startswith("forall L X1 X2 X3,")
    assert "{L, (pi l\\ append nil l l) |- list_minus X1 X2 X3}" in t.formula


def test_stren_proof_static_loop_counts():
    prog, plan = _plan_for("list_minus.hh", "append nil L L", "list_minus X L1 L2")
    script, pairs = gen_stren_proof(plan, prog)
    # two list_minus clauses: the fact contributes only a search, the
    # recursive clause two applies and a search
    applies = [s for s in script if s.startswith("apply subctx")
               or s.startswith("apply IH")]
    assert len(applies) == 2
    assert script.count("search") == 2
    assert pairs == [("list_minus", "list_minus")]


def test_stren_proof_dynamic_head_mismatch_only_cases():
    # in the guarded program, C(a) = {b} and b's head differs from a:
    # that branch contributes a single `case H3` and no applies
    prog, plan = _plan_for("guarded.hh", "f", "g", user_name="gctx")
    script, _ = gen_stren_proof(plan, prog)
    a_block = script[script.index("split") + 1:]
    assert "apply ctx_member_a to H1 H5" in a_block
    tail = a_block[a_block.index("apply ctx_member_a to H1 H5") + 1:]
    assert tail == ("case H3",)  # p == 1, head mismatch: no case H6, no applies


def test_stren_proof_missing_cell_is_plan_mismatch():
    prog, plan = _plan_for("guarded.hh", "f", "g", user_name="gctx")
    broken = StrengtheningPlan(plan.goal, plan.strengthen_from, ("g",),
                               {"g": plan.contexts["g"]}, "gctx", ())
    with pytest.raises(PlanMismatch):
        gen_stren_proof(broken, prog)


def test_user_theorem_proof_shape():
    prog, plan = _plan_for("list_minus.hh", "append nil L L", "list_minus X L1 L2")
    script = gen_user_theorem_proof(plan)
    assert script == (
        "intros",
        "apply uctx_subctx_ctx_list_minus to H1",
        "apply stren_list_minus_from_append to H3 H2",
        "search",
    )


def test_user_theorem_uses_first_split_part_when_mutual():
    prog, plan = _plan_for("guarded.hh", "f", "g", user_name="gctx")
    script = gen_user_theorem_proof(plan)
    assert script[2] == "apply stren_g_from_f_1 to H3 H2"


# -- rendering ----------------------------------------------------------------------------

def test_render_define_shape():
    art = AbellaArtifact((gen_ctx_definition("p", (SR,)),), "x")
    text = render(art)
    assert text.startswith("Define ctx_p : olist -> prop by")
    assert ";" in text
    assert text.rstrip().endswith(".")


def test_render_empty_artifact():
    assert render(AbellaArtifact((), "x")) == ""


def test_render_checks_ordering():
    thm = Theorem("uses_ctx_p", "forall L, ctx_p L -> ctx_p L", ("search",))
    art = AbellaArtifact((thm, gen_ctx_definition("p", ())), "x")
    with pytest.raises(UnorderedArtifact):
        render(art)


def test_rendered_developments_reparse():
    for name in ("list_minus.thm", "guarded.thm", "branching_stren.thm",
                 "typeof_append.thm"):
        items = parse_thm((GOLDEN / name).read_text())
        kinds = [i.kind for i in items]
        assert kinds[0] == "specification"
        assert "theorem" in kinds


def test_development_matches_golden_bytes():
    for hh, thm in (("list_minus.hh", "list_minus.thm"),
                    ("guarded.hh", "guarded.thm"),
                    ("branching_stren.hh", "branching_stren.thm"),
                    ("typeof_append.hh", "typeof_append.thm")):
        prog_src = corpus_text(hh)
        from harrop.parser import parse_source, split_directive_strengthen
        parsed = parse_source(prog_src)
        (d,) = [d for d in parsed.directives if d.kind == "strengthen"]
        name, f, g = split_directive_strengthen(d, parsed.program)
        v = check_strengthenable(parsed.program, f, g)
        plan = make_plan(parsed.program, v, f, g, name, ())
        art = build_development(parsed.program, plan, hh.removesuffix(".hh"))
        assert render(art) == (GOLDEN / thm).read_text(), thm


def test_development_is_deterministic():
    prog, plan = _plan_for("guarded.hh", "f", "g", user_name="gctx")
    a1 = render(build_development(prog, plan, "guarded"))
    a2 = render(build_development(prog, plan, "guarded"))
    assert a1 == a2


def test_no_forward_references_outside_dependency_closure():
    prog, plan = _plan_for("guarded.hh", "f", "g", user_name="gctx")
    art = build_development(prog, plan, "guarded")
    render(art)  # raises UnorderedArtifact on any forward reference
    text = render(art)
    for pred in ("f", "b"):  # predicates outside S(g) get no context definition
        assert f"ctx_{pred} " not in text


# -- companion files -------------------------------------------------------------------------

def test_echo_sig_and_mod(list_minus_program):
    sig_text = echo_sig(list_minus_program, "list_minus")
    assert sig_text.startswith("sig list_minus.")
    assert "type list_minus nat -> list -> list -> o." in sig_text
    mod_text = echo_mod(list_minus_program, "list_minus")
    assert mod_text.startswith("module list_minus.")
    assert "list_minus X (cons X L) L." in mod_text
    assert "append (cons X L1) L2 (cons X L3) :- append L1 L2 L3." in mod_text


def test_echo_mod_keeps_inner_pi(typeof_program):
    mod_text = echo_mod(typeof_program, "typeof")
    assert ":- (pi x\\ typeof x T1 => typeof (M x) T2)." in mod_text
