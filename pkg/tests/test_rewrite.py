import random

import pytest
from hypothesis import given, strategies as st

from pdaproc.bisim import stateless_bisimilar
from pdaproc.core import Action, Prop
from pdaproc.gen import TermShape, axiom_pair, empty_spec, random_subst, random_term
from pdaproc.rewrite import (
    AXIOM_IDS,
    Hnf,
    HnfEngine,
    axiom_instances,
    axioms_for,
    check_axiom,
    decide_bisim_rf,
    depth,
    hnf,
    hnf_derivation,
    is_reduced,
    reduce_hnf,
)
from pdaproc.semantics import engine_for

from conftest import closed, term

SHAPE = TermShape(depth=3, vars=("P", "Q"))


def test_hnf_of_constants():
    ctx = closed(("P",))
    T, F = ctx.true(), ctx.false()
    assert hnf(ctx, term("0", ctx)) == Hnf((), T, F)
    assert hnf(ctx, term("1", ctx)) == Hnf((), T, T)


def test_hnf_of_blocked_sequencing():
    ctx = closed(("P",))
    h = hnf(ctx, term("(a.1 + 1);b.1", ctx))
    assert h.summands == ((ctx.true(), Action("a"), term("b.1", ctx)),)
    assert h.psi.is_true and h.chi.is_false
    assert stateless_bisimilar(ctx, term("(a.1 + 1);b.1", ctx), h.to_expr())


def test_reduction_drops_dead_summands():
    ctx = closed(("P",))
    P = Prop.var(("P",), "P")
    h = Hnf(((~P, Action("c"), term("1", ctx)), (P, Action("a"), term("1", ctx))), P, ctx.false())
    r = reduce_hnf(ctx, h)
    assert [a.label for _, a, _ in r.summands] == ["a"]
    h2 = Hnf(((P, Action("b"), term("[!P]^^ 1", ctx)),), ctx.true(), ctx.false())
    assert reduce_hnf(ctx, h2).summands == ()
    assert reduce_hnf(ctx, r) == r


def test_depth_examples():
    ctx = closed(())
    assert depth(ctx, term("0", ctx)) == 0
    assert depth(ctx, term("1", ctx)) == 0
    assert depth(ctx, term("a.b.1 + c.1", ctx)) == 2


def test_rewrite_axioms_examples():
    ctx = closed(("P",))
    x = term("a.1", ctx)
    a9 = axiom_instances("A9")
    assert a9.instantiate({"x": x}) == (term("1;a.1", ctx), x)
    si3 = axiom_instances("SI3")
    assert si3.instantiate({"a": Action("b"), "x": x, "x_vars": ("P",)}) == (term("b.([false]^^ a.1)", ctx), term("0", ctx))
    r = axiom_instances("R")
    lhs, rhs = r.instantiate({"a": Action("b"), "sigma": ~Prop.var(("P",), "P"), "x": x})
    assert r.applicable({"a": Action("b"), "sigma": ~Prop.var(("P",), "P"), "x": x}, engine_for(ctx))
    assert stateless_bisimilar(ctx, lhs, rhs)


def test_axiom_catalogue():
    assert "A4" in axioms_for("seq") and "A4" not in axioms_for("seqc")
    assert set(axioms_for("seqc")) == set(AXIOM_IDS) - {"A4"}
    with pytest.raises(KeyError):
        axiom_instances("A4", "seqc")
    with pytest.raises(KeyError):
        axiom_instances("SI1", "seq")
    assert axiom_instances("A4", "seqc", allow_unsound=True).id == "A4"


def test_unsound_distributivity_is_detected():
    report = check_axiom("A4", "seqc", n=100, allow_unsound=True)
    assert report.failures


@pytest.mark.parametrize("ax", ["A9", "A12", "C8", "SI6", "R"])
def test_conditional_axioms_pass(ax):
    report = check_axiom(ax, "seqc", n=60, seed=1)
    assert report.sound and report.checked == 60


@given(st.integers(0, 10**6))
def test_hnf_is_bisimilar_and_replays(seed):
    rng = random.Random(seed)
    ctx = empty_spec(SHAPE)
    e = random_term(rng, SHAPE)
    d = hnf_derivation(ctx, e)
    assert HnfEngine(ctx).replay(d, e)
    assert stateless_bisimilar(ctx, e, d.result.to_expr())


@given(st.integers(0, 10**6))
def test_reduced_hnf_properties(seed):
    rng = random.Random(seed)
    ctx = empty_spec(SHAPE)
    e = random_term(rng, SHAPE)
    h = hnf(ctx, e)
    if not h.psi.satisfiable:
        return
    r = reduce_hnf(ctx, h)
    assert is_reduced(ctx, r)
    assert stateless_bisimilar(ctx, e, r.to_expr())
    d = depth(ctx, e)
    assert all(depth(ctx, p) < d for _, _, p in r.summands)


@given(st.integers(0, 10**6))
def test_rf_decider_matches_oracle(seed):
    rng = random.Random(seed)
    ctx = empty_spec(SHAPE)
    if seed % 3 == 0:
        p, q = axiom_pair(rng, SHAPE)
    else:
        p, q = random_term(rng, SHAPE), random_term(rng, SHAPE)
    v = decide_bisim_rf(ctx, p, q)
    assert v.equal == stateless_bisimilar(ctx, p, q).bisimilar
    if not v.equal:
        assert v.distinction.format(ctx.vars)


def test_rf_examples():
    ctx = closed(())
    p = term("(a.1 + 1);b.1", ctx)
    assert decide_bisim_rf(ctx, p, p)
    v = decide_bisim_rf(ctx, p, term("a.1;b.1 + 1;b.1", ctx))
    assert not v.equal
    assert v.distinction.kind == "step" and v.distinction.side == "right"
    assert v.distinction.action == Action("b")


def test_rf_rejects_identifiers(counter_spec):
    from pdaproc.core import Ident

    with pytest.raises(ValueError):
        decide_bisim_rf(counter_spec, Ident("X"), Ident("X"))


def test_random_substitutions_respect_sorts():
    rng = random.Random(3)
    s = random_subst(rng, {"x": "term", "a": "action", "phi": "prop", "v": "vars"}, SHAPE)
    assert isinstance(s["a"], Action) and isinstance(s["phi"], Prop) and s["v"] == SHAPE.vars
