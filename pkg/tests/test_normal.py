import random

import pytest

from pdaproc import corpus
from pdaproc.core import free_idents
from pdaproc.gen import TermShape, random_spec
from pdaproc.normal import (
    classify,
    is_acceptance_irredundant,
    is_aignf,
    is_gnf,
    is_separated,
    separate,
    separation_holds,
    to_aignf,
    to_gnf,
)

from conftest import equivalent, spec

NONSEP = corpus.load("nonseparation.pspec")
WORKED_SEP = spec("spec s { init X; X = 1 + a.(Y;X) Y = b.1 + a.(Z;Y) Z = b.1 + a.(Z;Z) }")


def hereditary_oracle(s, nonaccepting):
    """Greatest fixpoint computed by removing offenders one at a time."""
    h = set(nonaccepting)
    changed = True
    while changed:
        changed = False
        for x in sorted(h):
            if not free_idents(s[x]) <= h:
                h.discard(x)
                changed = True
    return h


def test_classify_nonseparation():
    cls = classify(NONSEP)
    assert cls.accepting == {"X"} and cls.nonaccepting == {"Y"}
    assert cls.hereditary == {"Y"} == hereditary_oracle(NONSEP, cls.nonaccepting)


def test_classify_separate_example():
    cls = classify(WORKED_SEP)
    assert cls.accepting == {"X"} and cls.nonaccepting == {"Y", "Z"}
    assert cls.hereditary == hereditary_oracle(WORKED_SEP, cls.nonaccepting) == {"Y", "Z"}


def test_classify_trivial():
    cls = classify(spec("spec s { init X; X = 1 }"))
    assert cls.accepting == {"X"} and not cls.hereditary


def test_classify_against_oracle_on_random_specs():
    rng = random.Random("classify")
    for _ in range(100):
        s = random_spec(rng, TermShape(vars=(), mode="seqc"), n_idents=4)
        cls = classify(s)
        assert cls.hereditary == hereditary_oracle(s, cls.nonaccepting)


def test_word_predicates():
    cls = classify(WORKED_SEP)
    assert is_acceptance_irredundant((), cls)
    assert is_separated(("Z", "Y", "X"), cls, frozenset({"Y"}))
    assert not is_separated(("Y", "Y", "X"), cls, frozenset({"Y"}))
    ncls = classify(NONSEP)
    # Y is hereditarily non-accepting, so YYX is irredundant but not separated by {Y}
    assert is_acceptance_irredundant(("Y", "Y", "X"), ncls)
    assert not is_separated(("Y", "Y", "X"), ncls, frozenset({"Y"}))
    assert not is_acceptance_irredundant(("X", "Y"), ncls)


def test_gnf(counter_spec):
    assert to_gnf(counter_spec).equations == counter_spec.equations
    one = spec("spec s { init X; X = 1 }")
    assert to_gnf(one).equations == one.equations
    nested = spec("spec s { init X; X = a.((b.1 + 1);(c.1)) }")
    g = to_gnf(nested)
    assert is_gnf(g) and len(g.equations) > 1
    assert equivalent(nested, g, 10)


def test_aignf(counter_spec):
    assert is_aignf(counter_spec)
    assert to_aignf(counter_spec).equations == counter_spec.equations
    out = to_aignf(NONSEP)
    assert is_aignf(out) and equivalent(NONSEP, out, 10)
    one = spec("spec s { init X; X = 1 }")
    assert to_aignf(one).equations == one.equations


def test_aignf_strips_redundant_acceptance():
    s = spec("spec s { init X; X = a.(Y;Z) Y = 1 + a.Y Z = b.1 }")
    out = to_aignf(s)
    assert is_aignf(out)
    assert equivalent(s, out, 10)


def test_separate_reproduces_worked_example():
    out, sep = separate(NONSEP)
    assert sep == {"Y"}
    renamed = {x.replace("Y#dag", "Z"): str(e).replace("Y#dag", "Z") for x, e in out.equations.items()}
    assert renamed == {x: str(e) for x, e in WORKED_SEP.equations.items()}
    assert separation_holds(out, sep)
    assert equivalent(NONSEP, out, 10)


def test_separate_without_nonaccepting(counter_spec):
    out, sep = separate(counter_spec)
    assert sep == frozenset() and out.equations == counter_spec.equations


@pytest.mark.parametrize("seed", range(12))
def test_separate_random(seed):
    rng = random.Random(f"sep/{seed}")
    s = to_aignf(random_spec(rng, TermShape(vars=(), mode="seqc"), n_idents=rng.randint(1, 3)))
    out, sep = separate(s)
    assert separation_holds(out, sep, roots=[s.init])
    assert equivalent(s, out, 8)
