"""Bisimulation checking on explored graphs and on terms with valuations."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .core import Action, ProcExpr, Prop, Spec, Valuation
from .semantics import COMPLETE, Engine, Lts, engine_for


# --------------------------------------------------------------------------
# Partition refinement


def _refine(n: int, initial: list, signature) -> list[int]:
    block = _renumber(initial)
    while True:
        new = _renumber([(block[i], signature(i, block)) for i in range(n)])
        if max(new, default=-1) == max(block, default=-1):
            return new
        block = new


def _renumber(keys: list) -> list[int]:
    ids: dict = {}
    return [ids.setdefault(k, len(ids)) for k in keys]


def partition_refine(lts: Lts) -> tuple[Lts, list[int]]:
    """Minimize a fully explored graph modulo strong bisimilarity.

    Returns:
        The quotient graph and the block index of every state.

    Raises:
        ValueError: if the graph has frontier states.
    """
    if lts.frontier:
        raise ValueError("cannot minimize a truncated graph (frontier is nonempty)")
    succ = lts.successors()
    block = _refine(
        lts.n_states,
        [i in lts.accepting for i in range(lts.n_states)],
        lambda i, b: frozenset((a, b[t]) for a, t in succ[i]),
    )
    # number blocks in order of first occurrence from the root side
    order: dict[int, int] = {}
    for i in [lts.root] + list(range(lts.n_states)):
        order.setdefault(block[i], len(order))
    block = [order[b] for b in block]
    nb = len(order)
    reps = [0] * nb
    for i in reversed(range(lts.n_states)):
        reps[block[i]] = i
    trans = sorted({(block[s], a, block[t]) for s, a, t in lts.transitions}, key=lambda x: (x[0], x[1].label, x[2]))
    quotient = Lts(
        labels=[lts.labels[reps[b]] for b in range(nb)],
        keys=[lts.keys[reps[b]] for b in range(nb)],
        root=block[lts.root],
        transitions=trans,
        accepting=frozenset(block[i] for i in lts.accepting),
        frontier=frozenset(),
        exact_depth=COMPLETE,
        depth=[],
    )
    return quotient, block


# --------------------------------------------------------------------------
# Bounded bisimilarity with witnesses


@dataclass(frozen=True)
class AcceptMismatch:
    left: int
    right: int


@dataclass(frozen=True)
class FrontierMismatch:
    left: int
    right: int


@dataclass(frozen=True)
class Move:
    """One side moves; every answer of the other side is refuted below.

    Attributes:
        side: ``left`` or ``right``: which graph makes the move.
        left: Current state in the left graph.
        right: Current state in the right graph.
        action: The action of the move.
        target: State reached by the move.
        answers: Each answering state with the witness refuting it.
    """

    side: str
    left: int
    right: int
    action: Action
    target: int
    answers: tuple[tuple[int, "Witness"], ...]


Witness = Union[AcceptMismatch, FrontierMismatch, Move]


@dataclass(frozen=True)
class KBisimVerdict:
    equivalent: bool
    k: int
    witness: Witness | None = None

    def __bool__(self) -> bool:
        return self.equivalent


def k_bisimilar(lts1: Lts, lts2: Lts, k: int) -> KBisimVerdict:
    """Decide whether the roots are related by the k-th approximant.

    Frontier states are only related to frontier states with the same
    acceptance once at least one step is considered.

    Raises:
        ValueError: if either graph was not explored deeply enough for ``k``.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    need = min(lts1.exact_depth, lts2.exact_depth)
    if k > need:
        raise ValueError(f"graphs are exact only up to depth {need}, cannot decide k={k}")
    n1 = lts1.n_states
    n = n1 + lts2.n_states
    succ = [list(x) for x in lts1.successors()] + [
        [(a, t + n1) for a, t in x] for x in lts2.successors()
    ]
    acc = [i in lts1.accepting for i in range(n1)] + [i in lts2.accepting for i in range(lts2.n_states)]
    front = [i in lts1.frontier for i in range(n1)] + [i in lts2.frontier for i in range(lts2.n_states)]
    levels = [_renumber(acc)]
    r1, r2 = lts1.root, lts2.root + n1
    for _ in range(k):
        prev = levels[-1]
        if prev[r1] != prev[r2]:
            break
        sig = [
            ("F", acc[i]) if front[i] else (acc[i], frozenset((a, prev[t]) for a, t in succ[i]))
            for i in range(n)
        ]
        levels.append(_renumber(sig))
    top = levels[-1]
    if top[r1] == top[r2]:
        return KBisimVerdict(True, k)

    def refute(s: int, t: int, j: int) -> Witness:
        # s in left graph, t in right graph (both as union indices)
        if acc[s] != acc[t]:
            return AcceptMismatch(s, t - n1)
        if front[s] != front[t]:
            return FrontierMismatch(s, t - n1)
        prev = levels[j - 1]
        for side, x, y in (("left", s, t), ("right", t, s)):
            for a, x2 in succ[x]:
                answers = [y2 for b, y2 in succ[y] if b == a]
                if all(prev[y2] != prev[x2] for y2 in answers):
                    if side == "left":
                        subs = tuple((y2 - n1, refute(x2, y2, j - 1)) for y2 in answers)
                        return Move(side, s, t - n1, a, x2, subs)
                    subs = tuple((y2, refute(y2, x2, j - 1)) for y2 in answers)
                    return Move(side, s, t - n1, a, x2 - n1, subs)
        raise AssertionError("states differ at this level but no refutation found")

    j = len(levels) - 1
    while j > 0 and levels[j - 1][r1] != levels[j - 1][r2]:
        j -= 1
    return KBisimVerdict(False, k, refute(r1, r2, j))


def replay(w: Witness, lts1: Lts, lts2: Lts, left: int | None = None, right: int | None = None) -> bool:
    """Check that a witness really separates the two states it mentions."""
    left = lts1.root if left is None else left
    right = lts2.root if right is None else right
    if (w.left, w.right) != (left, right):
        return False
    if isinstance(w, AcceptMismatch):
        return (left in lts1.accepting) != (right in lts2.accepting)
    if isinstance(w, FrontierMismatch):
        return (left in lts1.frontier) != (right in lts2.frontier)
    if left in lts1.frontier or right in lts2.frontier:
        return False
    mover, other = (lts1, lts2) if w.side == "left" else (lts2, lts1)
    x, y = (left, right) if w.side == "left" else (right, left)
    if (x, w.action, w.target) not in set(mover.transitions):
        return False
    answers = sorted(t for s, a, t in other.transitions if s == y and a == w.action)
    if sorted(a for a, _ in w.answers) != answers:
        return False
    for ans, sub in w.answers:
        l2, r2 = (w.target, ans) if w.side == "left" else (ans, w.target)
        if not replay(sub, lts1, lts2, l2, r2):
            return False
    return True


def witness_depth(w: Witness) -> int:
    if isinstance(w, Move):
        return 1 + max((witness_depth(s) for _, s in w.answers), default=0)
    return 0


def format_witness(w: Witness, lts1: Lts, lts2: Lts, indent: int = 0) -> str:
    pad = "  " * indent
    pair = f"{lts1.labels[w.left]}  vs  {lts2.labels[w.right]}"
    if isinstance(w, AcceptMismatch):
        who = "left" if w.left in lts1.accepting else "right"
        return f"{pad}acceptance differs ({who} accepts): {pair}"
    if isinstance(w, FrontierMismatch):
        return f"{pad}exploration cut on one side only: {pair}"
    mover = lts1 if w.side == "left" else lts2
    other = lts2 if w.side == "left" else lts1
    lines = [f"{pad}{w.side} moves {w.action} to {mover.labels[w.target]}  ({pair})"]
    if not w.answers:
        lines.append(f"{pad}  no {w.action}-answer on the {'right' if w.side == 'left' else 'left'}")
    for ans, sub in w.answers:
        lines.append(f"{pad}  answer {other.labels[ans]}:")
        lines.append(format_witness(sub, lts1, lts2, indent + 2))
    return "\n".join(lines)


# --------------------------------------------------------------------------
# Stateless bisimilarity


@dataclass(frozen=True)
class StatelessVerdict:
    bisimilar: bool
    reason: str = ""
    valuation: Valuation | None = None

    def __bool__(self) -> bool:
        return self.bisimilar


def term_closure(eng: Engine, roots: list[ProcExpr], limit: int = 20000) -> list[ProcExpr]:
    """All terms reachable from ``roots`` under some valuation."""
    seen = dict.fromkeys(roots)
    todo = list(seen)
    while todo:
        p = todo.pop()
        for (_, q) in eng.step_props(p):
            if q not in seen:
                seen[q] = None
                todo.append(q)
                if len(seen) > limit:
                    raise ValueError("term space too large; is the term recursion-free?")
    return list(seen)


def stateless_classes(eng: Engine, terms: list[ProcExpr]) -> dict[ProcExpr, int]:
    """Greatest stateless bisimulation on a closed set of terms, as blocks."""
    idx = {t: i for i, t in enumerate(terms)}
    cons = [eng.cons_prop(t) for t in terms]
    acc = [eng.acc_prop(t) & c for t, c in zip(terms, cons)]
    steps = [[(a, idx[q], s & c) for (a, q), s in eng.step_props(t).items()] for t, c in zip(terms, cons)]

    def sig(i: int, b: list[int]):
        agg: dict[tuple[Action, int], Prop] = {}
        for a, j, s in steps[i]:
            key = (a, b[j])
            agg[key] = agg[key] | s if key in agg else s
        return frozenset((k, p.bits) for k, p in agg.items() if p.satisfiable)

    block = _refine(len(terms), [(cons[i].bits, acc[i].bits) for i in range(len(terms))], sig)
    return {t: block[i] for i, t in enumerate(terms)}


def _low_row(bits: int) -> int:
    return (bits & -bits).bit_length() - 1


def stateless_bisimilar(spec: Spec, p: ProcExpr, q: ProcExpr, engine: Engine | None = None) -> StatelessVerdict:
    """Decide stateless bisimilarity of two terms with finite term graphs.

    Consistency and acceptance must agree under every valuation, and steps
    must be matched per source valuation with related targets.
    """
    eng = engine or engine_for(spec)
    terms = term_closure(eng, [p, q])
    blocks = stateless_classes(eng, terms)
    if blocks[p] == blocks[q]:
        return StatelessVerdict(True)
    cp, cq = eng.cons_prop(p), eng.cons_prop(q)
    vals = spec.valuations()
    if cp != cq:
        v = vals[_low_row(cp.bits ^ cq.bits)]
        return StatelessVerdict(False, "consistency differs", v)
    ap, aq = eng.acc_prop(p) & cp, eng.acc_prop(q) & cq
    if ap != aq:
        v = vals[_low_row(ap.bits ^ aq.bits)]
        return StatelessVerdict(False, "acceptance differs", v)
    for x, y, side in ((p, q, "left"), (q, p, "right")):
        cx = eng.cons_prop(x)
        for (a, x2), s in eng.step_props(x).items():
            s = s & cx
            covered = eng.F
            for (b, y2), s2 in eng.step_props(y).items():
                if b == a and blocks[y2] == blocks[x2]:
                    covered = covered | s2
            miss = s & ~covered
            if miss.satisfiable:
                v = vals[next(miss.rows())]
                return StatelessVerdict(False, f"{side} step {a} to {x2} has no matching answer", v)
    return StatelessVerdict(False, "targets of matching steps are not related")


# --------------------------------------------------------------------------
# Branching


@dataclass(frozen=True)
class BranchingProfile:
    degrees: dict[int, int]
    max: int
    lower_bounds: frozenset[int]


def branching_profile(lts: Lts) -> BranchingProfile:
    """Out-degree per state; degrees of frontier states are lower bounds."""
    deg = {i: 0 for i in range(lts.n_states)}
    for s, _, _ in lts.transitions:
        deg[s] += 1
    return BranchingProfile(deg, max(deg.values(), default=0), lts.frontier)


# --------------------------------------------------------------------------
# Convenience


def bounded_compare(left, right, k: int, max_states: int = 50000, left_semantics: str = "plain",
                    right_semantics: str = "plain") -> tuple[KBisimVerdict, Lts, Lts]:
    """Explore two specs or PDAs to radius ``k`` and compare their roots.

    When the state budget cuts either graph before radius ``k``, the
    comparison is made at the exact depth instead; ``verdict.k`` records it.

    Returns:
        The verdict and both explored graphs (for printing witnesses).
    """
    from .semantics import Bounds, explore

    b = Bounds(k, max_states)
    l1 = explore(left, b, semantics=left_semantics)
    l2 = explore(right, b, semantics=right_semantics)
    kk = min(k, l1.exact_depth, l2.exact_depth)
    return k_bisimilar(l1, l2, kk), l1, l2


def witness_to_dict(w: Witness) -> dict:
    """A JSON-ready form of a witness; state indices refer to the explored graphs."""
    if isinstance(w, AcceptMismatch):
        return {"kind": "accept", "left": w.left, "right": w.right}
    if isinstance(w, FrontierMismatch):
        return {"kind": "frontier", "left": w.left, "right": w.right}
    return {
        "kind": "move", "side": w.side, "left": w.left, "right": w.right, "action": w.action.label,
        "target": w.target, "answers": [[a, witness_to_dict(s)] for a, s in w.answers],
    }


def witness_from_dict(d: dict) -> Witness:
    """Inverse of :func:`witness_to_dict`.

    Raises:
        ValueError: on malformed input.
    """
    try:
        kind = d["kind"]
        if kind == "accept":
            return AcceptMismatch(int(d["left"]), int(d["right"]))
        if kind == "frontier":
            return FrontierMismatch(int(d["left"]), int(d["right"]))
        if kind == "move":
            answers = tuple((int(a), witness_from_dict(s)) for a, s in d["answers"])
            return Move(d["side"], int(d["left"]), int(d["right"]), Action(d["action"]), int(d["target"]), answers)
    except (KeyError, TypeError) as e:
        raise ValueError(f"malformed witness: {e}") from e
    raise ValueError(f"unknown witness kind {kind!r}")
