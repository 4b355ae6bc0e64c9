"""Reproduction targets: each renders one worked example as deterministic text.

The rendered text is compared byte for byte against golden files bundled
with the package; ``pdaproc repro ID --regen`` rewrites a golden file.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path
from typing import Callable

from . import corpus
from .bisim import bounded_compare, branching_profile, partition_refine
from .convert import onestate_pda_to_spec, pda_to_signal_spec, signal_spec_to_pda, spec_to_pda
from .core import ACCEPT, DEADLOCK, Action, Choice, Prefix, SeqLegacy, Spec
from .normal import separate, separation_holds
from .parser import format_pda, format_spec, print_lts
from .pda import Config, branching_degree
from .semantics import Bounds, check_guarded, explore


def _verdict(name: str, left, right, k: int, ls: str = "plain", rs: str = "plain") -> str:
    v, _, _ = bounded_compare(left, right, k, left_semantics=ls, right_semantics=rs)
    return f"{name}: {'equivalent' if v.equivalent else 'distinguished'} at k={v.k}"


def _fig1() -> str:
    pda = corpus.load("counter.pda")
    lts = explore(pda, Bounds(4))
    return "\n".join([
        format_pda(pda).rstrip(),
        f"transitions: {len(pda.transitions)}",
        f"branching degree: {branching_degree(pda)}",
        "graph to depth 4:",
        print_lts(lts, "text").rstrip(),
    ])


def _fig2() -> str:
    pda = corpus.load("counter.pda")
    spec = corpus.load("counter.pspec")
    lts = explore(pda, Bounds(5))
    return "\n".join([
        "counter graph to depth 5:",
        print_lts(lts, "text").rstrip(),
        f"max out-degree: {branching_profile(lts).max}",
        _verdict("spec vs PDA", spec, pda, 12),
    ])


def _unfold(n: int) -> Spec:
    """The n-th approximation of X = 1 + X · a.1, starting from 0."""
    e = DEADLOCK
    for _ in range(n):
        e = Choice(ACCEPT, SeqLegacy(e, Prefix(Action("a"), ACCEPT)))
    return Spec({"X": e}, "X", mode="seq", alphabet=("a",), name="approx")


def _fig3_4() -> str:
    lines = []
    for name in ("unguarded.pspec", "unguarded_seqc.pspec"):
        g = check_guarded(corpus.load(name))
        lines.append(f"{name}: {'guarded' if g.ok else 'rejected, cycle [' + ' '.join(g.cycle) + ']'}")
    lines.append("approximations of X = 1 + X · a.1 (n unfoldings from 0):")
    for n in range(1, 7):
        lts = explore(_unfold(n), Bounds(n + 2))
        _, block = partition_refine(lts)
        targets = [t for s, _, t in lts.transitions if s == lts.root]
        lines.append(f"  n={n}: root out-degree {len(targets)}, "
                     f"pairwise non-bisimilar targets {len({block[t] for t in targets})}")
    return "\n".join(lines)


def _fig7() -> str:
    pda = corpus.load("fig7.pda")
    return "\n".join([
        format_pda(pda).rstrip(),
        f"transitions: {len(pda.transitions)}",
        f"branching degree: {branching_degree(pda)}",
        "signal specification:",
        format_spec(pda_to_signal_spec(pda)).rstrip(),
    ])


def _fig8() -> str:
    pda = corpus.load("fig7.pda")
    lts = explore(pda, Bounds(3))
    return "\n".join([
        "ladder to depth 3:",
        print_lts(lts, "text").rstrip(),
        _verdict("signal spec (derived) vs PDA", pda_to_signal_spec(pda), pda, 12, ls="derived"),
    ])


def _fig9() -> str:
    return format_pda(spec_to_pda(corpus.load("fig9.pspec"))).rstrip()


def _counter_spec() -> str:
    pda = corpus.load("counter.pda")
    spec = corpus.load("counter.pspec")
    return "\n".join([
        format_spec(spec).rstrip(),
        _verdict("spec vs counter PDA", spec, pda, 12),
        "one-state construction from the PDA:",
        format_spec(onestate_pda_to_spec(pda)).rstrip(),
        _verdict("construction vs PDA", onestate_pda_to_spec(pda), pda, 12),
    ])


def _stack() -> str:
    pda = corpus.load("stack.pda")
    spec = onestate_pda_to_spec(pda)
    return "\n".join([
        format_pda(pda).rstrip(),
        format_spec(spec).rstrip(),
        _verdict("construction vs PDA", spec, pda, 10),
    ])


def _cointoss() -> str:
    spec = corpus.load("cointoss.pspec")
    lts = explore(spec, Bounds(12), semantics="derived")
    q, block = partition_refine(lts)
    pda = signal_spec_to_pda(spec)
    return "\n".join([
        format_spec(spec).rstrip(),
        "derived graph:",
        print_lts(lts, "text").rstrip(),
        f"blocks: {block}",
        "minimized:",
        print_lts(q, "text").rstrip(),
        "PDA:",
        format_pda(pda).rstrip(),
        _verdict("spec (derived) vs PDA", spec, pda, 12, ls="derived"),
    ])


def _separate_example() -> str:
    spec = corpus.load("nonseparation.pspec")
    out, sep = separate(spec)
    return "\n".join([
        format_spec(spec).rstrip(),
        "separated:",
        format_spec(out).rstrip(),
        f"P_sep = {{{', '.join(sorted(sep))}}}",
        f"separation holds along explored transitions: {separation_holds(out, sep)}",
        _verdict("separated vs original", out, spec, 10),
    ])


def _b_run(lts, s: int) -> int:
    succ = lts.successors()
    n = 0
    while True:
        nxt = [t for a, t in succ[s] if a.label == "b"]
        if not nxt:
            return n
        s, n = nxt[0], n + 1


def _nospec_evidence() -> str:
    pda = corpus.load("fig7.pda")
    lts = explore(pda, Bounds(16))
    idx = {k: i for i, k in enumerate(lts.keys)}
    lines = ["consecutive b-steps from (up, 1^n) and from its c-successor (down, 1^n):"]
    for n in range(1, 7):
        up = idx[Config("up", ("1",) * n)]
        down = idx[Config("down", ("1",) * n)]
        lines.append(f"  n={n}: up {_b_run(lts, up)} (accepting {up in lts.accepting}), "
                     f"down {_b_run(lts, down)} (accepting {down in lts.accepting})")
    lines.append(_verdict("signal spec (derived) vs PDA", pda_to_signal_spec(pda), pda, 12, ls="derived"))
    return "\n".join(lines)


def _unbounded_branching() -> str:
    seq = corpus.load("difference_seq.pspec")
    lts = explore(seq, Bounds(7))
    succ = lts.successors()
    s = lts.root
    lines = ["seq mode, out-degree along the a-spine:"]
    for n in range(7):
        lines.append(f"  depth {n}: {lts.labels[s]}  out-degree {len(succ[s])}")
        s = max((t for a, t in succ[s] if a.label == "a"), key=lambda t: lts.depth[t])
    lines.append(_verdict("seqc mode vs counter PDA", corpus.load("difference.pspec"),
                          corpus.load("counter.pda"), 12))
    return "\n".join(lines)


TARGETS: dict[str, Callable[[], str]] = {
    "fig1": _fig1,
    "fig2": _fig2,
    "fig3/4": _fig3_4,
    "fig7": _fig7,
    "fig8": _fig8,
    "fig9": _fig9,
    "counter-spec": _counter_spec,
    "stack": _stack,
    "cointoss": _cointoss,
    "separate-example": _separate_example,
    "nospec-evidence": _nospec_evidence,
    "unbounded-branching": _unbounded_branching,
}


def render(target: str) -> str:
    """Render a target; raises KeyError for unknown ids."""
    return TARGETS[target]() + "\n"


def golden_name(target: str) -> str:
    return target.replace("/", "-") + ".txt"


def golden_path(target: str) -> Path:
    return Path(str(resources.files("pdaproc") / "data" / "golden" / golden_name(target)))


def golden(target: str) -> str:
    return golden_path(target).read_text()
