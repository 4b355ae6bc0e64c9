"""Operational semantics and bounded exploration.

Three transition relations live here: the plain one for terms without
conditions, the valuation-indexed one with consistency, and the derived one
that quantifies over all consistent valuations. The valuation relation is
computed symbolically: for every candidate step we compute the proposition
describing the source valuations at which it is enabled.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Literal, Union

from .core import (
    Accept,
    Action,
    Choice,
    Deadlock,
    Guard,
    Ident,
    Na,
    Prefix,
    ProcExpr,
    Prop,
    SeqLegacy,
    Seqc,
    Signal,
    Spec,
    Valuation,
    v_true,
)
from .pda import Config, Pda, pda_accepts, pda_steps

Effect = Callable[[Action, Valuation], Valuation]
StepKey = tuple[Action, ProcExpr]
SemanticsKind = Literal["plain", "derived"]


def reset_effect(a: Action, v: Valuation) -> Valuation:
    """The reset effect: every action leads to the all-true valuation."""
    return v_true(v.vars)


class UnguardedError(ValueError):
    def __init__(self, cycle: tuple[str, ...]):
        self.cycle = cycle
        super().__init__(f"unguarded recursion through {' -> '.join(cycle + cycle[:1])}")


class InconsistentError(ValueError):
    """Raised when a query needs a consistent state and there is none."""


@dataclass(frozen=True)
class Guardedness:
    """Result of :func:`check_guarded`; ``cycle`` is empty iff guarded."""

    cycle: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.cycle

    def __bool__(self) -> bool:
        return self.ok


def unguarded_idents(e: ProcExpr) -> set[str]:
    """Identifiers occurring in ``e`` outside the scope of any prefix."""
    if isinstance(e, Ident):
        return {e.name}
    if isinstance(e, (Choice, Seqc, SeqLegacy)):
        return unguarded_idents(e.left) | unguarded_idents(e.right)
    if isinstance(e, (Na, Guard, Signal)):
        return unguarded_idents(e.body)
    return set()


def check_guarded(spec: Spec) -> Guardedness:
    """Find a cycle of unguarded identifier occurrences, if there is one."""
    graph = {x: sorted(unguarded_idents(b)) for x, b in spec.equations.items()}
    color: dict[str, int] = {}
    path: list[str] = []

    def dfs(x: str) -> tuple[str, ...] | None:
        color[x] = 1
        path.append(x)
        for y in graph[x]:
            if color.get(y) == 1:
                return tuple(path[path.index(y):])
            if y not in color:
                found = dfs(y)
                if found:
                    return found
        path.pop()
        color[x] = 2
        return None

    for x in spec.equations:
        if x not in color:
            found = dfs(x)
            if found:
                return Guardedness(found)
    return Guardedness()


def require_guarded(spec: Spec) -> None:
    g = check_guarded(spec)
    if not g.ok:
        raise UnguardedError(g.cycle)


def seq_target(p: ProcExpr, q: ProcExpr, op) -> ProcExpr:
    """Target of a left step in a sequencing; ``1;q`` is represented as ``q``."""
    return q if isinstance(p, Accept) else op(p, q)


class Engine:
    """Memoized semantics for one specification.

    Args:
        spec: A guarded specification.
        effect: Valuation transformer applied on every step.

    Raises:
        UnguardedError: if ``spec`` is not guarded.
    """

    def __init__(self, spec: Spec, effect: Effect = reset_effect):
        require_guarded(spec)
        self.spec = spec
        self.effect = effect
        self.T = Prop.true(spec.vars)
        self.F = Prop.false(spec.vars)
        self._vtrue_row = (1 << len(spec.vars)) - 1
        self._plain_steps: dict[ProcExpr, frozenset[StepKey]] = {}
        self._plain_acc: dict[ProcExpr, bool] = {}
        self._cons: dict[ProcExpr, Prop] = {}
        self._acc: dict[ProcExpr, Prop] = {}
        self._steps: dict[ProcExpr, dict[StepKey, Prop]] = {}

    # -- plain -------------------------------------------------------------
    def accepts_plain(self, e: ProcExpr) -> bool:
        r = self._plain_acc.get(e)
        if r is None:
            r = self._accepts_plain(e)
            self._plain_acc[e] = r
        return r

    def _accepts_plain(self, e: ProcExpr) -> bool:
        if isinstance(e, Accept):
            return True
        if isinstance(e, (Deadlock, Prefix, Na)):
            return False
        if isinstance(e, Choice):
            return self.accepts_plain(e.left) or self.accepts_plain(e.right)
        if isinstance(e, (Seqc, SeqLegacy)):
            return self.accepts_plain(e.left) and self.accepts_plain(e.right)
        if isinstance(e, Ident):
            return self.accepts_plain(self.spec[e.name])
        raise TypeError(f"plain semantics does not cover {type(e).__name__}")

    def steps_plain(self, e: ProcExpr) -> frozenset[StepKey]:
        r = self._plain_steps.get(e)
        if r is None:
            r = frozenset(self._steps_plain(e))
            self._plain_steps[e] = r
        return r

    def _steps_plain(self, e: ProcExpr) -> Iterable[StepKey]:
        if isinstance(e, (Accept, Deadlock)):
            return ()
        if isinstance(e, Prefix):
            return ((e.action, e.body),)
        if isinstance(e, Choice):
            return self.steps_plain(e.left) | self.steps_plain(e.right)
        if isinstance(e, Seqc):
            left = self.steps_plain(e.left)
            out = {(a, seq_target(p, e.right, Seqc)) for a, p in left}
            # negative premise: q moves only when p accepts and is stuck
            if not left and self.accepts_plain(e.left):
                out |= self.steps_plain(e.right)
            return out
        if isinstance(e, SeqLegacy):
            out = {(a, seq_target(p, e.right, SeqLegacy)) for a, p in self.steps_plain(e.left)}
            if self.accepts_plain(e.left):
                out |= self.steps_plain(e.right)
            return out
        if isinstance(e, Na):
            return self.steps_plain(e.body)
        if isinstance(e, Ident):
            return self.steps_plain(self.spec[e.name])
        raise TypeError(f"plain semantics does not cover {type(e).__name__}")

    # -- valuations -------------------------------------------------------
    def _after(self, a: Action, target: Prop) -> Prop:
        """Source valuations whose successor under ``a`` satisfies ``target``."""
        if self.effect is reset_effect:
            return self.T if target.holds(self._vtrue_row) else self.F
        vs = self.spec.vars
        bits = sum(1 << r for r in range(1 << len(vs)) if target.holds(self.effect(a, Valuation(vs, r)).row))
        return Prop(vs, bits)

    def cons_prop(self, e: ProcExpr) -> Prop:
        """Valuations under which ``e`` is consistent."""
        r = self._cons.get(e)
        if r is None:
            r = self._cons_prop(e)
            self._cons[e] = r
        return r

    def _cons_prop(self, e: ProcExpr) -> Prop:
        if isinstance(e, (Accept, Deadlock, Prefix)):
            return self.T
        if isinstance(e, Choice):
            return self.cons_prop(e.left) & self.cons_prop(e.right)
        if isinstance(e, (Seqc, SeqLegacy)):
            return self.cons_prop(e.left) & (~self.acc_prop(e.left) | self.cons_prop(e.right))
        if isinstance(e, (Na, Guard)):
            return self.cons_prop(e.body)
        if isinstance(e, Signal):
            return e.sig & self.cons_prop(e.body)
        if isinstance(e, Ident):
            return self.cons_prop(self.spec[e.name])
        raise TypeError(f"not a process expression: {e!r}")

    def acc_prop(self, e: ProcExpr) -> Prop:
        """Valuations under which ``e`` accepts (always within its consistency)."""
        r = self._acc.get(e)
        if r is None:
            r = self._acc_prop(e)
            self._acc[e] = r
        return r

    def _acc_prop(self, e: ProcExpr) -> Prop:
        if isinstance(e, Accept):
            return self.T
        if isinstance(e, (Deadlock, Prefix, Na)):
            return self.F
        if isinstance(e, Choice):
            l, r = e.left, e.right
            return (self.acc_prop(l) & self.cons_prop(r)) | (self.acc_prop(r) & self.cons_prop(l))
        if isinstance(e, (Seqc, SeqLegacy)):
            return self.acc_prop(e.left) & self.acc_prop(e.right)
        if isinstance(e, Guard):
            return e.cond & self.acc_prop(e.body)
        if isinstance(e, Signal):
            return e.sig & self.acc_prop(e.body)
        if isinstance(e, Ident):
            return self.acc_prop(self.spec[e.name])
        raise TypeError(f"not a process expression: {e!r}")

    def step_props(self, e: ProcExpr) -> dict[StepKey, Prop]:
        """Map each candidate step to the source valuations enabling it."""
        r = self._steps.get(e)
        if r is None:
            r = {k: p for k, p in self._step_props(e).items() if p.satisfiable}
            self._steps[e] = r
        return r

    def _step_props(self, e: ProcExpr) -> dict[StepKey, Prop]:
        if isinstance(e, (Accept, Deadlock)):
            return {}
        if isinstance(e, Prefix):
            return {(e.action, e.body): self._after(e.action, self.cons_prop(e.body))}
        if isinstance(e, Choice):
            out: dict[StepKey, Prop] = {}
            for side, other in ((e.left, e.right), (e.right, e.left)):
                c = self.cons_prop(other)
                for k, s in self.step_props(side).items():
                    out[k] = out.get(k, self.F) | (s & c)
            return out
        if isinstance(e, Seqc):
            out = {}
            left = self.step_props(e.left)
            enabled = self.F
            for (a, p), s in left.items():
                enabled = enabled | s
                tgt = seq_target(p, e.right, Seqc)
                out[(a, tgt)] = out.get((a, tgt), self.F) | (s & self._after(a, self.cons_prop(tgt)))
            passing = self.acc_prop(e.left) & ~enabled
            if passing.satisfiable:
                for k, s in self.step_props(e.right).items():
                    out[k] = out.get(k, self.F) | (s & passing)
            return out
        if isinstance(e, SeqLegacy):
            out = {}
            for (a, p), s in self.step_props(e.left).items():
                tgt = seq_target(p, e.right, SeqLegacy)
                out[(a, tgt)] = out.get((a, tgt), self.F) | (s & self._after(a, self.cons_prop(tgt)))
            acc = self.acc_prop(e.left)
            for k, s in self.step_props(e.right).items():
                out[k] = out.get(k, self.F) | (s & acc)
            return out
        if isinstance(e, Na):
            return self.step_props(e.body)
        if isinstance(e, (Guard, Signal)):
            c = e.cond if isinstance(e, Guard) else e.sig
            return {k: s & c for k, s in self.step_props(e.body).items()}
        if isinstance(e, Ident):
            return self.step_props(self.spec[e.name])
        raise TypeError(f"not a process expression: {e!r}")

    def cons(self, e: ProcExpr, v: Valuation) -> bool:
        return self.cons_prop(e).eval(v)

    def accepts_val(self, e: ProcExpr, v: Valuation) -> bool:
        return (self.acc_prop(e) & self.cons_prop(e)).eval(v)

    def steps_val(self, e: ProcExpr, v: Valuation) -> frozenset[tuple[Action, ProcExpr, Valuation]]:
        """Steps of ``<e, v>``; targets carry ``effect(a, v)``.

        Raises:
            InconsistentError: if ``e`` is not consistent under ``v``.
        """
        if not self.cons(e, v):
            raise InconsistentError(f"{e} is inconsistent under {v}")
        return frozenset((a, p, self.effect(a, v)) for (a, p), s in self.step_props(e).items() if s.eval(v))

    def enabled_prop(self, e: ProcExpr) -> Prop:
        out = self.F
        for s in self.step_props(e).values():
            out = out | s
        return out

    # -- derived ----------------------------------------------------------
    def _root(self, e: ProcExpr) -> Prop:
        c = self.cons_prop(e)
        if c.is_false:
            raise InconsistentError(f"{e} has no consistent valuation")
        return c

    def steps_derived(self, e: ProcExpr) -> frozenset[StepKey]:
        """Steps available under every valuation consistent with ``e``."""
        c = self._root(e)
        return frozenset(k for k, s in self.step_props(e).items() if c.implies(s))

    def accepts_derived(self, e: ProcExpr) -> bool:
        c = self._root(e)
        return c.implies(self.acc_prop(e))


COMPLETE = 10**9

_ENGINES: dict[int, tuple[Spec, Engine]] = {}


def engine_for(spec: Spec) -> Engine:
    """A shared reset-effect engine per specification object."""
    hit = _ENGINES.get(id(spec))
    if hit is None or hit[0] is not spec:
        if len(_ENGINES) > 256:
            _ENGINES.clear()
        hit = (spec, Engine(spec))
        _ENGINES[id(spec)] = hit
    return hit[1]


def steps_plain(spec: Spec, expr: ProcExpr) -> frozenset[StepKey]:
    return engine_for(spec).steps_plain(expr)


def accepts_plain(spec: Spec, expr: ProcExpr) -> bool:
    return engine_for(spec).accepts_plain(expr)


def cons(spec: Spec, expr: ProcExpr, v: Valuation) -> bool:
    return engine_for(spec).cons(expr, v)


def steps_val(spec: Spec, expr: ProcExpr, v: Valuation, effect: Effect = reset_effect):
    eng = engine_for(spec) if effect is reset_effect else Engine(spec, effect)
    return eng.steps_val(expr, v)


def accepts_val(spec: Spec, expr: ProcExpr, v: Valuation) -> bool:
    return engine_for(spec).accepts_val(expr, v)


def steps_derived(spec: Spec, expr: ProcExpr) -> frozenset[StepKey]:
    return engine_for(spec).steps_derived(expr)


def accepts_derived(spec: Spec, expr: ProcExpr) -> bool:
    return engine_for(spec).accepts_derived(expr)


# --------------------------------------------------------------------------
# Exploration


@dataclass(frozen=True)
class Bounds:
    max_depth: int = 12
    max_states: int = 50000

    def __post_init__(self):
        if self.max_depth <= 0 or self.max_states <= 0:
            raise ValueError("exploration bounds must be positive")


@dataclass
class Lts:
    """An explored process graph.

    Attributes:
        labels: Display label per state index.
        keys: The term or configuration behind each state.
        root: Index of the root state.
        transitions: ``(src, action, dst)`` triples in discovery order.
        accepting: Indices of accepting states.
        frontier: Indices whose outgoing steps were not all explored.
        exact_depth: Every state closer to the root than this is complete.
        depth: BFS distance from the root per state.
    """

    labels: list[str]
    keys: list[Hashable]
    root: int
    transitions: list[tuple[int, Action, int]]
    accepting: frozenset[int]
    frontier: frozenset[int]
    exact_depth: int = COMPLETE
    depth: list[int] = field(default_factory=list)

    @property
    def n_states(self) -> int:
        return len(self.labels)

    def successors(self) -> list[list[tuple[Action, int]]]:
        out: list[list[tuple[Action, int]]] = [[] for _ in self.labels]
        for s, a, t in self.transitions:
            out[s].append((a, t))
        return out

    def index_of(self, key: Hashable) -> int:
        return self.keys.index(key)


def _sorted_steps(steps: Iterable[tuple[Action, Hashable]], label) -> list[tuple[Action, Hashable]]:
    return sorted(steps, key=lambda st: (st[0].label, label(st[1])))


def explore_graph(root: Hashable, succ, accepts, label, bounds: Bounds) -> Lts:
    """Breadth-first exploration of the ball of radius ``bounds.max_depth``.

    States at the maximal depth are expanded only towards known states; a
    state loses a step to an unknown state when the radius or the state
    budget is exhausted, and is then marked frontier.
    """
    index: dict[Hashable, int] = {root: 0}
    keys: list[Hashable] = [root]
    depth = [0]
    trans: list[tuple[int, Action, int]] = []
    frontier: set[int] = set()
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for a, t in _sorted_steps(succ(keys[i]), label):
            j = index.get(t)
            if j is None:
                if depth[i] >= bounds.max_depth or len(keys) >= bounds.max_states:
                    frontier.add(i)
                    continue
                j = len(keys)
                index[t] = j
                keys.append(t)
                depth.append(depth[i] + 1)
                queue.append(j)
            trans.append((i, a, j))
    # a graph without frontier is complete, so any approximation level is exact
    exact = min((depth[i] for i in frontier), default=COMPLETE)
    acc = frozenset(i for i, k in enumerate(keys) if accepts(k))
    return Lts([label(k) for k in keys], keys, 0, trans, acc, frozenset(frontier), exact, depth)


def explore(source: Spec | Pda, bounds: Bounds | None = None, semantics: SemanticsKind = "plain",
            engine: Engine | None = None, root: ProcExpr | None = None) -> Lts:
    """Explore the process graph of a specification or a PDA.

    Args:
        source: A guarded specification or a PDA.
        bounds: Radius and state budget.
        semantics: ``plain`` or ``derived``; ignored for PDAs.
        engine: Engine to reuse for a specification.
        root: Start term; defaults to the initial identifier.
    """
    bounds = bounds or Bounds()
    if isinstance(source, Pda):
        return explore_graph(source.root, lambda c: pda_steps(source, c), lambda c: pda_accepts(source, c),
                             str, bounds)
    eng = engine or engine_for(source)
    start = root if root is not None else Ident(source.init)
    if semantics == "plain":
        succ, acc = eng.steps_plain, eng.accepts_plain
    elif semantics == "derived":
        succ, acc = eng.steps_derived, eng.accepts_derived
    else:
        raise ValueError(f"unknown semantics {semantics!r}")
    from .parser import format_expr

    return explore_graph(start, succ, acc, format_expr, bounds)


def weak_reach(lts: Lts, state: int, word: Iterable[Action]) -> set[int]:
    """States reachable from ``state`` by ``word`` with tau steps absorbed."""
    succ = lts.successors()

    def tau_closure(states: set[int]) -> set[int]:
        todo, seen = list(states), set(states)
        while todo:
            s = todo.pop()
            for a, t in succ[s]:
                if a.is_tau and t not in seen:
                    seen.add(t)
                    todo.append(t)
        return seen

    cur = tau_closure({state})
    for a in word:
        cur = tau_closure({t for s in cur for b, t in succ[s] if b == a})
    return cur


Source = Union[Spec, Pda]
__all__ = [
    "Bounds",
    "Config",
    "Engine",
    "Guardedness",
    "InconsistentError",
    "Lts",
    "UnguardedError",
    "accepts_derived",
    "accepts_plain",
    "accepts_val",
    "check_guarded",
    "cons",
    "explore",
    "reset_effect",
    "steps_derived",
    "steps_plain",
    "steps_val",
]
