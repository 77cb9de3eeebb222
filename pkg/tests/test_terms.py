import random

import pytest
from hypothesis import given, settings, strategies as st

from harrop.errors import SignatureError, TypeMismatch, UnknownIdentifier
from harrop.terms import (
    Abs, App, Bound, Const, O, Signature, TyArr, TyCon, Var, alpha_equal,
    arrow, beta_eta_equal, free_vars, infer_type, lam, normalize, pp_term,
    substitute,
)

from genutil import (
    NApp, NLam, NVar, base_signature, debruijn, innermost_beta, random_closed_term,
)

NAT = TyCon("nat")
BOOL = TyCon("bool")
TY = TyCon("ty")
TM = TyCon("tm")


def test_arrow_right_associative():
    assert arrow(NAT, NAT, BOOL) == TyArr(NAT, TyArr(NAT, BOOL))


def test_infer_identity_function():
    sig = Signature()
    t = lam("x", NAT, Var("x", NAT))
    assert infer_type(sig, t) == TyArr(NAT, NAT)


def test_infer_application():
    sig = Signature().extend_const("f", TyArr(NAT, BOOL)).extend_const("a", NAT)
    t = App(Const("f", TyArr(NAT, BOOL)), Const("a", NAT))
    assert infer_type(sig, t) == BOOL


def test_infer_encoded_abstraction():
    # abs b (x\ x) : tm under abs : ty -> (tm -> tm) -> tm, b : ty,
    # following the three typing rules by hand: the inner lambda has type
    # tm -> tm, so the application chain lands at tm.
    abs_ty = arrow(TY, TyArr(TM, TM), TM)
    sig = Signature().extend_const("abs", abs_ty).extend_const("b", TY)
    t = App(App(Const("abs", abs_ty), Const("b", TY)),
            lam("x", TM, Var("x", TM)))
    assert infer_type(sig, t) == TM


def test_infer_unknown_identifier():
    with pytest.raises(UnknownIdentifier):
        infer_type(Signature(), Const("mystery", NAT))


def test_infer_domain_mismatch():
    f = Const("f", TyArr(NAT, BOOL))
    # construction is checked eagerly, Church-style
    with pytest.raises(TypeMismatch):
        App(f, Const("b", BOOL))


def test_signature_rejects_duplicates():
    sig = Signature().extend_const("c", NAT)
    with pytest.raises(SignatureError):
        sig.extend_const("c", BOOL)
    with pytest.raises(SignatureError):
        sig.extend_var("c", NAT)


# -- substitution -------------------------------------------------------------

def test_substitute_ignores_bound_occurrences():
    # (x\ x)[a/x] leaves the term unchanged
    t = lam("x", NAT, Var("x", NAT))
    assert substitute(t, "x", Const("a", NAT)) == t


def test_substitute_avoids_capture():
    # (y\ x)[y/x] must rename the binder: the result applied to anything
    # still returns the free y
    t = lam("y", NAT, Var("x", NAT))
    out = substitute(t, "x", Var("y", NAT))
    assert isinstance(out, Abs)
    assert out.body == Var("y", NAT)  # the free y, not the binder
    assert "y" in free_vars(out)
    # printing renames the binder hint away from the free variable
    assert pp_term(out) == "y1\\ y"


def test_substitute_direct_replacement():
    assert substitute(Var("x", NAT), "x", Const("a", NAT)) == Const("a", NAT)


def test_substitute_type_mismatch():
    with pytest.raises(TypeMismatch):
        substitute(Var("x", NAT), "x", Const("b", BOOL))


def test_substitute_identity_up_to_alpha():
    rng = random.Random(7)
    sig = base_signature()
    for _ in range(100):
        t = random_closed_term(rng, sig, 12)
        body = lam("z", TyCon("i"), App(Const("f0", TyArr(TyCon("i"), TyCon("i"))),
                                        Var("w", TyCon("i"))))
        assert alpha_equal(substitute(body, "w", Var("w", TyCon("i"))), body)
        assert alpha_equal(substitute(t, "nosuch", Const("c0", TyCon("i"))), t)


# -- normalization ------------------------------------------------------------

def test_beta_step():
    t = App(lam("x", NAT, Var("x", NAT)), Const("a", NAT))
    assert normalize(t) == Const("a", NAT)


def test_eta_contraction():
    f = Const("f", TyArr(NAT, BOOL))
    t = Abs(NAT, App(f, Bound(0, NAT)), "x")  # x\ f x with x not free in f
    assert normalize(t) == f


def test_already_normal():
    a = Const("a", NAT)
    assert normalize(a) == a


def test_eta_after_beta_cascade():
    # x\ ((y\ y) (f x)) reduces to f by beta then eta
    f = Const("f", TyArr(NAT, NAT))
    inner = App(lam("y", NAT, Var("y", NAT)), App(f, Var("x", NAT)))
    t = lam("x", NAT, inner)
    assert normalize(t) == f


# -- alpha equivalence ----------------------------------------------------------

def test_alpha_identity_functions():
    t1 = lam("x", NAT, Var("x", NAT))
    t2 = lam("y", NAT, Var("y", NAT))
    assert alpha_equal(t1, t2)


def test_alpha_distinguishes_binders():
    # x\ y\ x vs y\ x\ x: a de Bruijn conversion oracle on a separate named
    # AST distinguishes index 1 from index 0
    named1 = NLam("x", NLam("y", NVar("x")))
    named2 = NLam("y", NLam("x", NVar("x")))
    assert debruijn(named1) != debruijn(named2)
    t1 = lam("x", NAT, lam("y", NAT, Var("x", NAT)))
    t2 = lam("y", NAT, lam("x", NAT, Var("x", NAT)))
    assert debruijn(named1) == ("lam", ("lam", 1))
    assert t1.body.body == Bound(1, NAT)
    assert not alpha_equal(t1, t2)


def test_alpha_reflexive_on_atoms():
    a = Const("a", NAT)
    assert alpha_equal(a, a)


def test_alpha_equivalence_relation():
    rng = random.Random(21)
    sig = base_signature()
    for _ in range(60):
        t = random_closed_term(rng, sig, 10)
        u = _rename_hints(t, rng)
        v = _rename_hints(t, rng)
        assert alpha_equal(t, t)
        assert alpha_equal(t, u) == alpha_equal(u, t)
        if alpha_equal(t, u) and alpha_equal(u, v):
            assert alpha_equal(t, v)


def _rename_hints(t, rng):
    if isinstance(t, Abs):
        return Abs(t.arg_ty, _rename_hints(t.body, rng), f"v{rng.randrange(5)}")
    if isinstance(t, App):
        return App(_rename_hints(t.fn, rng), _rename_hints(t.arg, rng))
    return t


# -- kernel-wide properties ----------------------------------------------------

def test_subject_reduction_small():
    rng = random.Random(3)
    sig = base_signature()
    for _ in range(150):
        t = random_closed_term(rng, sig, 14)
        assert infer_type(sig, t) == infer_type(sig, normalize(t))


def test_confluence_of_strategies_small():
    rng = random.Random(5)
    sig = base_signature()
    for _ in range(150):
        t = random_closed_term(rng, sig, 14)
        assert alpha_equal(normalize(t), normalize(innermost_beta(t)))


def test_free_vars_closed():
    assert free_vars(lam("x", NAT, Var("x", NAT))) == set()


def test_free_vars_under_binder():
    f = Var("f", TyArr(NAT, TyArr(NAT, BOOL)))
    t = lam("x", NAT, App(App(f, Var("x", NAT)), Var("y", NAT)))
    assert free_vars(t) == {"f", "y"}


def test_free_vars_single():
    assert free_vars(Var("x", NAT)) == {"x"}


@given(st.integers(min_value=0, max_value=10_000))
def test_beta_eta_equal_is_reflexive_for_random_seeds(seed):
    rng = random.Random(seed)
    t = random_closed_term(rng, base_signature(), 8)
    assert beta_eta_equal(t, t)
