import random

import pytest

from pdaproc import corpus
from pdaproc.convert import (
    TransparencyError,
    onestate_pda_to_spec,
    pda_to_signal_spec,
    signal_spec_to_pda,
    spec_to_pda,
    spec_to_pda_detailed,
)
from pdaproc.core import Action
from pdaproc.gen import TermShape, random_spec
from pdaproc.normal import separation_holds
from pdaproc.parser import parse_pda
from pdaproc.pda import Transition

from conftest import equivalent, spec

EMPTY_FINAL = parse_pda("pda e {\n states s;\n init s;\n final s;\n data;\n alphabet;\n}")
EMPTY = parse_pda("pda e {\n states s;\n init s;\n final;\n data;\n alphabet;\n}")
ONE = spec("spec s { init X; X = 1 }")


def test_onestate_counter(counter_pda):
    s = onestate_pda_to_spec(counter_pda)
    expected = spec("spec c { init X; X = 1 + a.(X_1;X) X_1 = 1 + a.(X_1;X_1) + b.1 }")
    assert s.equations == expected.equations
    assert equivalent(s, counter_pda, 10)


def test_onestate_stack():
    pda = corpus.load("stack.pda")
    s = onestate_pda_to_spec(pda)
    expected = spec("""spec st { init X;
        X = 1 + push_0.(X_0;X) + push_1.(X_1;X)
        X_0 = 1 + pop_0.1 + push_0.(X_0;X_0) + push_1.(X_1;X_0)
        X_1 = 1 + pop_1.1 + push_0.(X_0;X_1) + push_1.(X_1;X_1) }""")
    assert s.equations == expected.equations
    assert equivalent(s, pda, 10)


def test_onestate_transitionless():
    assert onestate_pda_to_spec(EMPTY_FINAL).equations == ONE.equations
    assert str(onestate_pda_to_spec(EMPTY)["X"]) == "0"


def test_onestate_rejects_two_states(fig7_pda):
    with pytest.raises(ValueError):
        onestate_pda_to_spec(fig7_pda)


def test_two_state_construction_on_fig9():
    r = spec_to_pda_detailed(corpus.load("fig9.pspec"))
    a, b, c = Action("a"), Action("b"), Action("c")
    assert r.pda.states == ("n", "t") and r.pda.init == "n" and r.pda.finals == {"t"}
    assert set(r.pda.transitions) == {
        Transition("n", a, None, ("X", "Y"), "n"),
        Transition("n", a, "X", ("X", "Y"), "n"),
        Transition("n", b, None, (), "t"),
        Transition("n", b, "X", (), "t"),
        Transition("t", c, "Y", (), "t"),
    }
    assert r.sep == {"X"}
    assert separation_holds(r.spec, r.sep, roots=[r.spec.init], depth=12)
    assert equivalent(corpus.load("fig9.pspec"), r.pda, 12)


def test_two_state_construction_on_counter(counter_spec, counter_pda):
    pda = spec_to_pda(counter_spec)
    assert len(pda.states) <= 2
    assert equivalent(pda, counter_pda, 12)


def test_two_state_trivial():
    pda = spec_to_pda(ONE)
    assert pda.init in pda.finals and not pda.transitions


def test_two_state_needs_plain_sequencing(cointoss):
    with pytest.raises(ValueError):
        spec_to_pda(cointoss)
    with pytest.raises(ValueError):
        spec_to_pda(corpus.load("difference_seq.pspec"))


def test_signal_spec_of_fig7(fig7_pda):
    s = pda_to_signal_spec(fig7_pda)
    # the initial equation: a pushes onto the empty stack in state up, c switches to down
    assert str(s["X"]) == "a.([state_up]^^ X_1;X_eps) + c.([state_down]^^ X_eps)"
    # the datum: loops in up, a step down, and termination in down
    body = str(s["X_1"])
    for part in ["[state_up] -> a.([state_up]^^ X_1;X_1)", "[state_up] -> b.([state_up]^^ 1)",
                 "[state_up] -> c.([state_down]^^ X_1)", "[state_down] -> b.([state_down]^^ 1)",
                 "[state_down] -> 1"]:
        assert part in body
    assert equivalent(s, fig7_pda, 12, ls="derived")


def test_signal_spec_trivial():
    assert pda_to_signal_spec(EMPTY_FINAL)["X"] == ONE["X"]


def test_signal_spec_of_counter(counter_pda):
    s = pda_to_signal_spec(counter_pda)
    assert equivalent(s, counter_pda, 12, ls="derived")
    assert equivalent(signal_spec_to_pda(s), counter_pda, 12)


def test_signal_spec_to_pda_cointoss(cointoss):
    pda = signal_spec_to_pda(cointoss)
    assert equivalent(cointoss, pda, 12, ls="derived")


def test_signal_spec_to_pda_trivial():
    pda = signal_spec_to_pda(ONE)
    assert pda.init in pda.finals and not pda.transitions


def test_transparent_top_is_reported():
    # Y has a b-summand syntactically, but it is disabled wherever Y is consistent
    s = spec("spec s { vars P; init X; X = a.(Y;Z) Y = [P]^^ (1 + [!P] -> b.1) Z = c.1 }")
    with pytest.raises(TransparencyError):
        signal_spec_to_pda(s)


def test_dead_top_is_not_transparent():
    s = spec("spec s { vars P; init X; X = a.(Y;Z) Y = [P] -> 1 + [!P] -> b.1 Z = c.1 + [P]^^ 1 }")
    assert equivalent(s, signal_spec_to_pda(s), 10, ls="derived")


@pytest.mark.parametrize("seed", range(8))
def test_round_trips(seed):
    rng = random.Random(f"convert/{seed}")
    s = random_spec(rng, TermShape(depth=2, vars=(), mode="seqc"), n_idents=rng.randint(1, 3))
    p1 = spec_to_pda(s)
    s2 = pda_to_signal_spec(p1)
    p3 = signal_spec_to_pda(s2)
    assert equivalent(s, p1, 8)
    assert equivalent(s, s2, 8, rs="derived")
    assert equivalent(s, p3, 8)


def test_guardedness_is_required():
    with pytest.raises(ValueError):
        spec_to_pda(corpus.load("unguarded_seqc.pspec"))
