import itertools

from hypothesis import given, strategies as st

from pdaproc.core import (
    ACCEPT,
    DEADLOCK,
    Action,
    Choice,
    Guard,
    Ident,
    Prefix,
    Prop,
    Seqc,
    Signal,
    Valuation,
    big_choice,
    format_prop,
    free_idents,
    prop_eval,
    seq_word,
    v_true,
)
from pdaproc.parser import parse_spec

VARS = ("P", "Q", "R")


def test_free_idents():
    assert free_idents(DEADLOCK) == set()
    assert free_idents(Prefix(Action("a"), Seqc(Ident("Y"), Ident("X")))) == {"X", "Y"}
    p = Prop.var(("P", "Q"), "P")
    q = Prop.var(("P", "Q"), "Q")
    assert free_idents(Choice(Guard(p, Ident("X")), Signal(q, ACCEPT))) == {"X"}


def test_prop_eval_examples():
    vs = ("P", "Q")
    P, Q = Prop.var(vs, "P"), Prop.var(vs, "Q")
    for row in range(4):
        v = Valuation(vs, row)
        assert prop_eval(Prop.true(vs), v)
        assert not prop_eval(P & ~P, v)
    assert prop_eval(P | Q, Valuation.from_dict(vs, {"P": False, "Q": True}))


def test_big_choice_and_seq_word():
    p, q, r = Prefix(Action("a"), ACCEPT), Prefix(Action("b"), ACCEPT), Prefix(Action("c"), ACCEPT)
    assert big_choice([]) == DEADLOCK
    assert big_choice([p]) == p
    assert big_choice([p, q, r]) == Choice(Choice(p, q), r)
    assert seq_word([]) == ACCEPT
    assert seq_word(["X"]) == Ident("X")
    assert seq_word(["X", "Y", "Z"]) == Seqc(Seqc(Ident("X"), Ident("Y")), Ident("Z"))


rows = st.integers(0, (1 << 8) - 1)


@given(rows, rows)
def test_prop_connectives_match_rowwise_oracle(a, b):
    p, q = Prop(VARS, a), Prop(VARS, b)
    for r, vals in enumerate(itertools.product([False, True], repeat=3)):
        env = {x: bool(r >> i & 1) for i, x in enumerate(VARS)}
        v = Valuation.from_dict(VARS, env)
        assert (p & q).eval(v) == (p.eval(v) and q.eval(v))
        assert (p | q).eval(v) == (p.eval(v) or q.eval(v))
        assert (~p).eval(v) == (not p.eval(v))
    assert p.implies(q) == all(q.holds(r) for r in p.rows())


@given(rows)
def test_printed_prop_parses_back(bits):
    p = Prop(VARS, bits)
    s = parse_spec(f"spec t {{ vars P, Q, R; init S; S = [{format_prop(p)}] -> 1 }}")
    assert s["S"].cond == p


def test_v_true_satisfies_every_variable():
    v = v_true(VARS)
    assert all(v[x] for x in VARS)
