import random

from hypothesis import given, strategies as st

from pdaproc import corpus
from pdaproc.core import Action
from pdaproc.parser import parse_pda
from pdaproc.pda import Config, branching_degree, pda_accepts, pda_steps
from pdaproc.semantics import Bounds, explore

a, b, c = Action("a"), Action("b"), Action("c")
EMPTY = parse_pda("pda e {\n states s;\n init s;\n final s;\n data;\n alphabet;\n}")


def test_counter_steps(counter_pda):
    assert pda_steps(counter_pda, Config("up")) == {(a, Config("up", ("1",)))}
    assert pda_steps(counter_pda, Config("up", ("1", "1"))) == {
        (a, Config("up", ("1", "1", "1"))), (b, Config("up", ("1",)))}
    assert pda_steps(EMPTY, Config("s", ())) == set()


def test_counter_chain(counter_pda):
    lts = explore(counter_pda, Bounds(4))
    assert lts.n_states == 5 and lts.accepting == set(range(5))
    assert [lts.keys[i] for i in range(5)] == [Config("up", ("1",) * n) for n in range(5)]


def test_fig7_ladder(fig7_pda):
    lts = explore(fig7_pda, Bounds(3))
    rungs = [(lts.keys[s], lts.keys[t]) for s, x, t in lts.transitions if x == c]
    assert all(u.state == "up" and d.state == "down" and u.stack == d.stack for u, d in rungs)
    assert len(rungs) == 3
    assert {lts.keys[i].state for i in lts.accepting} == {"down"}


def test_transitionless_pda():
    lts = explore(EMPTY, Bounds(4))
    assert lts.n_states == 1 and lts.accepting == {0}


def test_branching_degree(counter_pda, fig7_pda):
    assert branching_degree(counter_pda) == 2
    assert branching_degree(EMPTY) == 0
    assert branching_degree(fig7_pda) == 3


def _random_config(rng, pda):
    return Config(rng.choice(pda.states), tuple(rng.choice(pda.data) for _ in range(rng.randint(0, 5))))


@given(st.integers(0, 10**6))
def test_degree_bound_and_acceptance_by_state(seed):
    rng = random.Random(seed)
    pda = corpus.load(rng.choice(["counter.pda", "fig7.pda", "stack.pda"]))
    cfg = _random_config(rng, pda)
    assert len(pda_steps(pda, cfg)) <= branching_degree(pda)
    other = Config(cfg.state, tuple(reversed(cfg.stack)) + (pda.data[0],))
    assert pda_accepts(pda, cfg) == pda_accepts(pda, other) == (cfg.state in pda.finals)


def test_explored_degrees_respect_bound(fig7_pda):
    lts = explore(fig7_pda, Bounds(10))
    deg = [0] * lts.n_states
    for s, _, _ in lts.transitions:
        deg[s] += 1
    assert max(deg) <= branching_degree(fig7_pda)
