import random

import pytest
from hypothesis import given, settings, strategies as st

from gen import gen_c, gen_hopi, gen_pi
from procwb.terms import (
    C_NIL, C_OMEGA, H_NIL, PI_NIL, ArityMismatch, CPar, COut, HAbs, HApp,
    HIn, HOut, HPar, HRes, HVar, NotAnAbstraction, PIn, POut, PPar, PRes,
    Subst, alpha_eq, apply_abstraction, const, free_names, normalize, nvar,
    struct_congruent, substitute,
)

a, b, c, d, e = (const(x) for x in "abcde")
x, y, z = (nvar(v) for v in "xyz")


# ---------------------------------------------------------------------------
# free names


def test_free_names_restriction_binds_constant():
    t = PRes(c, POut(c, a, PI_NIL))
    fc, fv, fp = free_names(t)
    assert fc == {a} and not fv and not fp


def test_free_names_input_binds_process_variable():
    t = HIn(a, "X", HVar("X"))
    fc, fv, fp = free_names(t)
    assert fc == {a} and not fv and not fp


def test_free_names_application():
    t = HApp(HVar("X"), (d,))
    fc, fv, fp = free_names(t)
    assert fc == {d} and not fv and fp == {"X"}


# ---------------------------------------------------------------------------
# substitution


def test_substitute_no_binders():
    t = POut(x, y, PI_NIL)
    got = substitute(t, Subst({x: a, y: b}))
    assert got == POut(a, b, PI_NIL)


def test_substitute_bound_occurrence_shielded():
    t = PIn(a, x, POut(x, b, PI_NIL))
    got = substitute(t, Subst({x: c}))
    assert alpha_eq(got, t)


def test_substitute_process_variable():
    abs_ = HAbs((y,), HOut(y, H_NIL, H_NIL))
    got = substitute(HVar("X"), Subst(procs={"X": abs_}))
    assert got == abs_


def test_substitute_capture_avoided():
    # (new b) x!b ... substituting b for x must not be captured
    t = PRes(b, POut(x, b, PI_NIL))
    got = substitute(t, Subst({x: b}))
    assert got.name != b
    assert got.body.subj == b  # the substituted free b survives
    assert got.body.obj == got.name


def test_substitute_compositional():
    rng = random.Random(7)
    for _ in range(50):
        t = gen_pi(rng, 6)
        t_open = substitute(t, Subst({a: x, b: y}))  # punch two variables in
        seq = substitute(substitute(t_open, Subst({x: a})), Subst({y: b}))
        sim = substitute(t_open, Subst({x: a, y: b}))
        assert alpha_eq(seq, sim)


def test_substitute_arity_error_under_app():
    t = HApp(HVar("X"), (d,))
    with pytest.raises(ArityMismatch):
        substitute(t, Subst(procs={"X": HAbs((x, y), H_NIL)}))


# ---------------------------------------------------------------------------
# application law


def numeral_zero():
    return HAbs((x, y), HOut(y, H_NIL, H_NIL))


def test_apply_abstraction_zero_numeral():
    got = apply_abstraction(numeral_zero(), (a, b))
    assert got == HOut(b, H_NIL, H_NIL)


def test_apply_abstraction_arity_mismatch():
    with pytest.raises(ArityMismatch):
        apply_abstraction(HAbs((x,), H_NIL), (a, b))


def test_apply_abstraction_not_an_abstraction():
    with pytest.raises(NotAnAbstraction):
        apply_abstraction(H_NIL, (a,))


def test_apply_abstraction_successor_shape():
    # <x,y> x!(<x,y> y!0.0).0 applied to s,z
    inner = numeral_zero()
    one = HAbs((x, y), HOut(x, inner, H_NIL))
    s_, z_ = const("s"), const("z")
    got = apply_abstraction(one, (s_, z_))
    assert alpha_eq(got, HOut(s_, inner, H_NIL))


# ---------------------------------------------------------------------------
# normalization and structural congruence


def test_normalize_par_unit():
    p = POut(a, b, PI_NIL)
    assert normalize(PPar(PI_NIL, p)) == normalize(p)


def test_normalize_omega_idempotent():
    assert normalize(CPar(C_OMEGA, C_OMEGA)) == normalize(C_OMEGA)


def test_normalize_scope_extrusion():
    p = PIn(c, x, PI_NIL)
    q = POut(a, b, PI_NIL)
    t = PRes(c, PPar(p, q))
    n = normalize(t)
    # q moved out of the restriction
    assert struct_congruent(t, PPar(PRes(c, p), q))
    assert isinstance(n, PPar)


def test_struct_congruent_associativity():
    p, q, r = COut(a, (1,)), COut(b, (2,)), C_OMEGA
    assert struct_congruent(CPar(CPar(p, q), r), CPar(p, CPar(q, r)))


def test_struct_congruent_distinct_outputs():
    assert not struct_congruent(COut(a, (1,)), COut(a, (2,)))


def test_struct_congruent_application_law():
    lhs = HApp(numeral_zero(), (a, b))
    rhs = HOut(b, H_NIL, H_NIL)
    assert struct_congruent(lhs, rhs)


def test_useless_restriction_dropped():
    assert normalize(PRes(c, PI_NIL)) == PI_NIL
    assert normalize(PRes(c, POut(a, b, PI_NIL))) == normalize(POut(a, b, PI_NIL))


def test_restriction_commutation():
    body = PPar(POut(c, d, PI_NIL), PIn(d, x, POut(c, x, PI_NIL)))
    t1 = PRes(c, PRes(d, body))
    t2 = PRes(d, PRes(c, body))
    assert struct_congruent(t1, t2)


# ---------------------------------------------------------------------------
# property suites


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(2, 8))
def test_normalize_idempotent_random(seed, size):
    rng = random.Random(seed)
    t = rng.choice([
        lambda: gen_pi(rng, size),
        lambda: gen_hopi(rng, size),
        lambda: gen_c(rng, max(1, size // 2)),
    ])()
    n = normalize(t)
    assert normalize(n) == n


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(2, 8))
def test_alpha_renaming_invariance(seed, size):
    rng = random.Random(seed)
    t = PRes(c, gen_pi(rng, size, scope=[a, b, c]))
    fresh = const("zz")
    renamed = PRes(fresh, substitute(t.body, Subst({c: fresh})))
    assert normalize(t) == normalize(renamed)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(2, 8))
def test_congruence_is_equivalence(seed, size):
    rng = random.Random(seed)
    t = gen_pi(rng, size)
    u = gen_pi(rng, size)
    assert struct_congruent(t, t)
    assert struct_congruent(t, u) == struct_congruent(u, t)
    # transitivity through a congruent shuffle
    flipped = PPar(PI_NIL, t)
    assert struct_congruent(t, flipped)
    if struct_congruent(t, u):
        assert struct_congruent(flipped, u)


def test_normalize_sorts_components_deterministically():
    p1 = PPar(POut(b, a, PI_NIL), POut(a, b, PI_NIL))
    p2 = PPar(POut(a, b, PI_NIL), POut(b, a, PI_NIL))
    assert normalize(p1) == normalize(p2)
