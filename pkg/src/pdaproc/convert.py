"""Constructions between pushdown automata and recursive specifications."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .core import (
    ACCEPT,
    DEADLOCK,
    Accept,
    Action,
    Guard,
    Ident,
    Prefix,
    ProcExpr,
    Prop,
    Seqc,
    Signal,
    Spec,
    big_choice,
    seq_word,
)
from .normal import _factors, classify, gnf_words, separate, to_aignf, to_gnf
from .pda import Pda, Transition
from .rewrite import Hnf, HnfEngine
from .semantics import Engine, engine_for, require_guarded

# --------------------------------------------------------------------------
# Names


def _safe(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_#']", "_", name)


def _unique_map(names, make) -> dict[str, str]:
    out: dict[str, str] = {}
    used: set[str] = set()
    for n in names:
        cand = make(_safe(n))
        while cand in used:
            cand += "'"
        used.add(cand)
        out[n] = cand
    return out


@dataclass(frozen=True)
class StackIdents:
    """Identifiers standing for the stack of an automaton.

    Attributes:
        init: The initial identifier ``X``.
        eps: ``X_eps`` (empty stack), or ``None`` when not needed.
        data: Map from each datum ``d`` to ``X_d``.
    """

    init: str
    eps: str | None
    data: dict[str, str]

    def word(self, push: tuple[str, ...]) -> list[str]:
        return [self.data[d] for d in push]


def _stack_idents(pda: Pda, with_eps: bool) -> StackIdents:
    data = _unique_map(pda.data, lambda s: f"X_{s}")
    taken = set(data.values())
    eps = None
    if with_eps:
        eps = "X_eps"
        while eps in taken:
            eps += "'"
    return StackIdents("X", eps, data)


def _word_then(word: list[str], last: str | None) -> ProcExpr:
    return seq_word(word + ([last] if last else []))


# --------------------------------------------------------------------------
# One-state automata


def onestate_pda_to_spec(pda: Pda) -> Spec:
    """A sequential specification for a one-state automaton.

    Raises:
        ValueError: if the automaton does not have exactly one state.
    """
    if len(pda.states) != 1:
        raise ValueError(f"expected a one-state automaton, got {len(pda.states)} states")
    final = pda.init in pda.finals
    eps_moves = [t for t in pda.transitions if t.pop is None]
    if not eps_moves:
        return Spec({"X": ACCEPT if final else DEADLOCK}, "X", alphabet=pda.alphabet, name=pda.name)
    ids = _stack_idents(pda, with_eps=False)
    one = [ACCEPT] if final else []
    eqs: dict[str, ProcExpr] = {
        "X": big_choice(one + [Prefix(t.action, _word_then(ids.word(t.push), "X")) for t in eps_moves])
    }
    for d in pda.data:
        parts = [Prefix(t.action, seq_word(ids.word(t.push))) for t in pda.transitions if t.pop == d]
        eqs[ids.data[d]] = big_choice(one + parts)
    return Spec(eqs, "X", alphabet=pda.alphabet, name=pda.name)


# --------------------------------------------------------------------------
# Specification to two-state automaton


BOTTOM = "#bot"


@dataclass(frozen=True)
class TwoStateResult:
    """The automaton together with the specification it was read from."""

    pda: Pda
    spec: Spec
    sep: frozenset[str]


def _can_vanish(spec: Spec) -> set[str]:
    """Identifiers from which the empty word is reachable."""
    v: set[str] = set()
    changed = True
    while changed:
        changed = False
        for x in spec.idents:
            if x in v:
                continue
            _, summ = gnf_words(spec, x)
            if any(all(y in v for y in w) for _, w in summ):
                v.add(x)
                changed = True
    return v


def spec_to_pda_detailed(spec: Spec) -> TwoStateResult:
    """Two-state automaton for a guarded sequencing specification.

    The specification is brought into separated AIGNF first. Transitions
    follow the four rules of the construction; a non-accepting separating
    identifier whose word continues non-accepting loops on ``n``. When the
    initial identifier accepts and can vanish, ε-top transitions push a
    bottom marker so that the empty word is not confused with the start.

    Raises:
        UnguardedError: if the specification is not guarded.
        ValueError: for ``seq`` mode or specifications with conditions.
    """
    require_guarded(spec)
    if spec.mode != "seqc" or spec.has_conditions():
        raise ValueError("spec_to_pda covers plain sequencing specifications; use signal_spec_to_pda")
    a = to_aignf(spec)
    s, sep = separate(a)
    cls = classify(s)
    acc = cls.accepting
    init = s.init
    bottom = init in acc and init in _can_vanish(s)
    start = "t" if init in acc else "n"
    trans: list[Transition] = []
    initial: list[Transition] = []
    for x in s.idents:
        _, summ = gnf_words(s, x)
        for lab, w in summ:
            lands_acc = not w or w[0] in acc
            if x in acc:
                src, dst = "t", ("t" if lands_acc else "n")
            elif x in sep:
                src, dst = "n", ("t" if lands_acc else "n")
            else:
                src, dst = "n", "n"
            trans.append(Transition(src, Action(lab), x, w, dst))
            if x == init:
                initial.append(Transition(src, Action(lab), None, w + ((BOTTOM,) if bottom else ()), dst))
    data = tuple(s.idents) + ((BOTTOM,) if bottom else ())
    pda = Pda(("n", "t"), s.alphabet, data, tuple(trans + initial), start, frozenset({"t"}), name=spec.name)
    return TwoStateResult(pda, s, sep)


def spec_to_pda(spec: Spec) -> Pda:
    """See :func:`spec_to_pda_detailed`."""
    return spec_to_pda_detailed(spec).pda


# --------------------------------------------------------------------------
# Automaton to specification with signals and conditions


def state_var(s: str) -> str:
    return f"state_{_safe(s)}"


def halt_hazard(pda: Pda) -> bool:
    """Some datum is never popped while a final state has transitions.

    In the literal construction such a datum's identifier accepts without
    moving under every valuation, so lower stack layers would take over.
    """
    popped = {t.pop for t in pda.transitions}
    moving = {t.src for t in pda.transitions}
    return bool(pda.finals & moving) and any(d not in popped for d in pda.data)


def halt_normalize(pda: Pda) -> Pda:
    """Equivalent automaton without stuck final configurations over a nonempty stack.

    Stack symbols are annotated with the datum below them. A transition that
    would leave a final state stuck on its new top is redirected to a fresh
    final state without transitions.
    """
    heads = {(t.src, t.pop) for t in pda.transitions}
    halt = "halt"
    while halt in pda.states:
        halt += "'"

    def stuck(state: str, top: str | None) -> bool:
        return state in pda.finals and top is not None and (state, top) not in heads

    names: dict[tuple[str, str | None], str] = {}

    def sym(d: str, below: str | None) -> str:
        key = (d, below)
        if key not in names:
            n = f"{d}#{below if below is not None else 'eps'}"
            while n in names.values() or n in pda.data:
                n += "'"
            names[key] = n
        return names[key]

    def annotate(push: tuple[str, ...], below: str | None) -> tuple[str, ...]:
        out = []
        for i, d in enumerate(push):
            out.append(sym(d, push[i + 1] if i + 1 < len(push) else below))
        return tuple(out)

    trans: list[Transition] = []
    seen: set[tuple[str, str | None]] = set()
    todo: list[tuple[str, str | None]] = []

    def reach(key):
        if key not in seen:
            seen.add(key)
            todo.append(key)

    for t in pda.transitions:
        if t.pop is None:
            top = t.push[0] if t.push else None
            dst = halt if stuck(t.dst, top) else t.dst
            trans.append(Transition(t.src, t.action, None, annotate(t.push, None), dst))
            for i, d in enumerate(t.push):
                reach((d, t.push[i + 1] if i + 1 < len(t.push) else None))
    while todo:
        d, below = todo.pop()
        for t in pda.transitions:
            if t.pop != d:
                continue
            top = t.push[0] if t.push else below
            dst = halt if stuck(t.dst, top) else t.dst
            trans.append(Transition(t.src, t.action, sym(d, below), annotate(t.push, below), dst))
            for i, e in enumerate(t.push):
                reach((e, t.push[i + 1] if i + 1 < len(t.push) else below))
    data = tuple(sorted(set(names.values())))
    uses_halt = any(t.dst == halt for t in trans)
    states = pda.states + ((halt,) if uses_halt else ())
    finals = pda.finals | ({halt} if uses_halt else set())
    return Pda(states, pda.alphabet, data, tuple(sorted(set(trans), key=lambda t: (t.src, t.pop or "", str(t)))),
               pda.init, frozenset(finals), name=pda.name)


def pda_to_signal_spec(pda: Pda, normalize: bool = True) -> Spec:
    """A guarded specification with signals and conditions for an automaton.

    Every control state ``s`` gets a variable ``state_<s>``. When a final
    state can be stuck on a stack symbol the automaton is first passed
    through :func:`halt_normalize` (unless ``normalize`` is false).
    """
    if normalize and halt_hazard(pda):
        pda = halt_normalize(pda)
    var = {s: state_var(s) for s in pda.states}
    vars_ = tuple(var[s] for s in pda.states)
    final = pda.init in pda.finals
    eps_moves = [t for t in pda.transitions if t.pop is None and t.src == pda.init]
    if not eps_moves:
        return Spec({"X": ACCEPT if final else DEADLOCK}, "X", vars=vars_, alphabet=pda.alphabet, name=pda.name)
    ids = _stack_idents(pda, with_eps=True)
    st = lambda s: Prop.var(vars_, var[s])  # noqa: E731

    def move(t: Transition, last: str | None) -> ProcExpr:
        return Prefix(t.action, Signal(st(t.dst), _word_then(ids.word(t.push), last)))

    accepting = [Guard(st(s), ACCEPT) for s in pda.states if s in pda.finals]
    eqs: dict[str, ProcExpr] = {
        ids.init: big_choice([move(t, ids.eps) for t in eps_moves] + ([ACCEPT] if final else []))
    }
    for d in pda.data:
        parts = [Guard(st(t.src), move(t, None)) for t in pda.transitions if t.pop == d]
        eqs[ids.data[d]] = big_choice(parts + accepting)
    parts = [Guard(st(t.src), move(t, ids.eps)) for t in pda.transitions if t.pop is None]
    eqs[ids.eps] = big_choice(parts + accepting)
    return Spec(eqs, ids.init, vars=vars_, alphabet=pda.alphabet, name=pda.name)


# --------------------------------------------------------------------------
# Specification with signals and conditions to automaton


class TransparencyError(ValueError):
    """A stack top accepts without moving under every consistent valuation."""


Ctx = tuple[Prop, Prop]  # (consistency, acceptance) of a layer without steps


def _merge(c1: Ctx, c2: Ctx) -> Ctx:
    k1, a1 = c1
    k2, a2 = c2
    return k1 & (~a1 | k2), a1 & a2


def signal_gnf(spec: Spec) -> Spec:
    """Signal GNF in which only the last factor of a word may lack action summands.

    A factor without action summands that is followed by further factors is
    fused with its successor into one fresh identifier, so that every
    non-final identifier of a word can move under some valuation.
    """
    g = to_gnf(spec)
    henv = HnfEngine(g)
    eqs = dict(g.equations)
    taken = set(eqs)
    fused: dict[ProcExpr, str] = {}
    counter = 0
    todo = list(g.idents)
    done: set[str] = set()
    while todo:
        x = todo.pop(0)
        if x in done:
            continue
        done.add(x)
        h = henv.hnf(Ident(x)) if x in g.equations else _hnf_in(eqs, g, eqs[x])
        changed = False
        summands = []
        for phi, a, tail in h.summands:
            word = [f for f in _factors(tail, Seqc)]
            groups: list[ProcExpr] = []
            cur: ProcExpr | None = None
            for f in word:
                cur = f if cur is None else Seqc(cur, f)
                if _has_summands(eqs, g, cur):
                    groups.append(cur)
                    cur = None
            if cur is not None:
                groups.append(cur)
            names = []
            for grp in groups:
                if isinstance(grp, Ident):
                    names.append(grp.name)
                    continue
                changed = True
                n = fused.get(grp)
                if n is None:
                    while f"G{counter}" in taken:
                        counter += 1
                    n = f"G{counter}"
                    taken.add(n)
                    fused[grp] = n
                    eqs[n] = grp
                    todo.append(n)
                names.append(n)
            summands.append((phi, a, seq_word(names)))
        if changed or x not in g.equations:
            eqs[x] = Hnf(tuple(summands), h.psi, h.chi).to_expr()
    return g.replace(equations=eqs)


def _hnf_in(eqs, g: Spec, e: ProcExpr) -> Hnf:
    return HnfEngine(Spec(dict(eqs), g.init, g.mode, g.vars, g.alphabet)).hnf(e)


def _has_summands(eqs, g: Spec, e: ProcExpr) -> bool:
    return bool(_hnf_in(eqs, g, e).summands)


@dataclass(frozen=True)
class _Sym:
    ident: str
    pending: Ctx
    below_cons: Prop
    below_acc: Prop


class _SignalPdaBuilder:
    def __init__(self, spec: Spec):
        self.spec = spec
        self.eng: Engine = engine_for(spec)
        self.henv = HnfEngine(spec, self.eng)
        self.T, self.F = spec.true(), spec.false()
        self.neutral: Ctx = (self.T, self.T)
        self.vt = self.eng._vtrue_row
        self.ctx_ids: dict[Ctx, int] = {}
        self.sym_ids: dict[_Sym, int] = {}
        self.below: dict[_Sym, set[_Sym | None]] = {}

    def layer(self, x: str) -> Ctx:
        e = Ident(x)
        c = self.eng.cons_prop(e)
        return c, self.eng.acc_prop(e) & c

    def ctx_name(self, q: Ctx, flag: bool) -> str:
        k = self.ctx_ids.setdefault(q, len(self.ctx_ids))
        return f"c{k}{'_acc' if flag else ''}"

    def sym_name(self, s: _Sym) -> str:
        k = self.sym_ids.setdefault(s, len(self.sym_ids))
        return f"{s.ident}@{k}"

    def cons_below(self, layers: list[Ctx], c: Prop) -> Prop:
        for k, a in reversed(layers):
            c = k & (~a | c)
        return c

    def push_word(self, word: list[str], last: Ctx, c: Prop, a: Prop) -> list[_Sym]:
        """Annotated symbols for ``word`` followed by a zero layer over a stack (c, a)."""
        out: list[_Sym] = []
        pending = last
        for x in reversed(word):
            s = _Sym(x, pending, c, a)
            out.append(s)
            lk, la = self.layer(x)
            c = self.cons_below([(lk, la), pending], c)
            a = la & pending[1] & a
            pending = self.neutral
        out.reverse()
        return out

    def split_tail(self, tail: ProcExpr) -> tuple[list[str], Ctx]:
        fs = _factors(tail, Seqc)
        word: list[str] = []
        last = self.neutral
        for i, f in enumerate(fs):
            if not isinstance(f, Ident):
                raise ValueError(f"summand tail {tail} is not an identifier word")
            h = self.henv.hnf(f)
            if not h.summands and i == len(fs) - 1:
                last = self.layer(f.name)
            else:
                word.append(f.name)
        return word, last

    def config_cons(self, q: Ctx, s: _Sym) -> Prop:
        return self.cons_below([q, self.layer(s.ident), s.pending], s.below_cons)

    def config_acc(self, q: Ctx, s: _Sym | None, c: Prop = None, a: Prop = None) -> bool:
        if s is None:
            k = self.cons_below([q], c)
            return k.satisfiable and k.implies(q[1] & a)
        k = self.config_cons(q, s)
        la = self.layer(s.ident)[1]
        return k.satisfiable and k.implies(q[1] & la & s.pending[1] & s.below_acc)

    def moves(self, q: Ctx, s: _Sym | None, root: str | None = None):
        """Derived steps of a configuration as (action, pushed symbols, new context, flag, popped)."""
        if root is not None:
            x, pend, c, a = root, self.neutral, self.T, self.T
            k = self.eng.cons_prop(Ident(root))
        else:
            x, pend, c, a = s.ident, s.pending, s.below_cons, s.below_acc
            k = self.config_cons(q, s)
        if not k.satisfiable:
            return []
        h = self.henv.hnf(Ident(x))
        out = []
        enabled = self.F
        for phi, act, tail in h.summands:
            word, last = self.split_tail(tail)
            if word:
                syms = self.push_word(word, _merge(last, pend), c, a)
                top = syms[0]
                after = self.config_cons(self.neutral, top)
                ok_after = after.holds(self.vt)
            else:
                after = self.cons_below([_merge(last, pend)], c)
                ok_after = after.holds(self.vt)
                syms = []
            guard = phi & h.psi & q[1]
            if ok_after:
                enabled = enabled | guard
            if ok_after and k.implies(guard):
                if word:
                    out.append((act, syms, self.neutral, self.config_acc(self.neutral, syms[0]), False))
                else:
                    ctx = _merge(last, pend)
                    out.append((act, [], ctx, self.config_acc(ctx, None, c, a), True))
        if root is None:
            la = self.layer(x)[1]
            transparent = q[1] & la & ~enabled
            if k.implies(transparent) and self.below.get(s, {None}) != {None}:
                raise TransparencyError(f"stack top {x} can hand over control under every consistent valuation")
        return out

    def build(self) -> Pda:
        spec = self.spec
        init_state = "init"
        trans: list[Transition] = []
        states: dict[str, bool] = {}
        root = spec.init
        k0 = self.eng.cons_prop(Ident(root))
        states[init_state] = k0.satisfiable and k0.implies(self.eng.acc_prop(Ident(root)))
        pairs: list[tuple[Ctx, bool, _Sym]] = []
        seen_pairs: set[tuple[Ctx, bool, _Sym]] = set()

        def add_pair(q, flag, s):
            if (q, flag, s) not in seen_pairs:
                seen_pairs.add((q, flag, s))
                pairs.append((q, flag, s))

        def link(syms: list[_Sym], below: set):
            for i, s in enumerate(syms):
                b = {syms[i + 1]} if i + 1 < len(syms) else below
                cur = self.below.setdefault(s, set())
                if not b <= cur:
                    cur |= b
                    # pops of s now continue onto more symbols
                    for (q, flag, t) in list(seen_pairs):
                        if t == s:
                            seen_pairs.discard((q, flag, t))
                            add_pair(q, flag, t)

        def emit(src: str, act, popped: _Sym | None, syms, ctx, flag, is_pop, below: set):
            dst = self.ctx_name(ctx, flag)
            states.setdefault(dst, flag)
            push = tuple(self.sym_name(s) for s in syms)
            trans.append(Transition(src, act, None if popped is None else self.sym_name(popped), push, dst))
            if syms:
                link(syms, below)
                add_pair(ctx, flag, syms[0])
            elif is_pop:
                for b in below:
                    if b is not None:
                        add_pair(ctx, flag, b)

        for act, syms, ctx, flag, is_pop in self.moves(self.neutral, None, root=root):
            emit(init_state, act, None, syms, ctx, flag, is_pop, {None})
        while pairs:
            q, flag, s = pairs.pop()
            src = self.ctx_name(q, flag)
            for act, syms, ctx, fl, is_pop in self.moves(q, s):
                emit(src, act, s, syms, ctx, fl, is_pop, self.below.get(s, {None}))
        trans = sorted(set(trans), key=lambda t: (t.src, t.pop or "", str(t)))
        names = list(states)
        data = tuple(sorted({self.sym_name(s) for s in self.sym_ids}))
        return Pda(tuple(names), spec.alphabet, data, tuple(trans), init_state,
                   frozenset(n for n, f in states.items() if f), name=spec.name)


def signal_spec_to_pda(spec: Spec) -> Pda:
    """An automaton for a guarded specification with signals and conditions.

    The specification is put into signal GNF. Control states record the
    consistency and acceptance of pending step-free layers above the stack
    top together with an acceptance flag; stack symbols record an identifier,
    the step-free layer following it, and the consistency and acceptance of
    the stack below. Steps are those available under every valuation
    consistent with the configuration (derived semantics).

    Raises:
        UnguardedError: if the specification is not guarded.
        TransparencyError: if a stack top would hand over control under
            every consistent valuation (outside the supported fragment).
    """
    require_guarded(spec)
    if spec.mode != "seqc":
        raise ValueError("signal_spec_to_pda covers sequencing specifications")
    return _SignalPdaBuilder(signal_gnf(spec)).build()
