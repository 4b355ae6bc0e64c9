import pytest
from hypothesis import settings

from pdaproc import corpus
from pdaproc.bisim import bounded_compare
from pdaproc.parser import parse_expr, parse_spec

settings.register_profile("repo", deadline=None, max_examples=60)
settings.load_profile("repo")


@pytest.fixture
def counter_spec():
    return corpus.load("counter.pspec")


@pytest.fixture
def counter_pda():
    return corpus.load("counter.pda")


@pytest.fixture
def fig7_pda():
    return corpus.load("fig7.pda")


@pytest.fixture
def cointoss():
    return corpus.load("cointoss.pspec")


def spec(text: str):
    return parse_spec(text)


def closed(vars=("P", "Q"), mode="seqc"):
    """A context spec for closed terms."""
    v = ", ".join(vars)
    header = f"mode {mode};" + (f" vars {v};" if vars else "")
    return parse_spec(f"spec ctx {{ {header} init S; S = 1 }}")


def term(text: str, ctx):
    return parse_expr(text, ctx.vars, ctx.mode)


def equivalent(left, right, k, ls="plain", rs="plain"):
    v, _, _ = bounded_compare(left, right, k, left_semantics=ls, right_semantics=rs)
    assert v.k == k, f"exploration budget cut the comparison at depth {v.k}"
    return v.equivalent


# One line per acceptance criterion, printed at the end of the session.
CRITERIA: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for n in sorted(CRITERIA):
            terminalreporter.write_line(CRITERIA[n])
