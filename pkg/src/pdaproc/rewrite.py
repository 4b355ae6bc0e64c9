"""Axioms, head normal forms and the recursion-free decision procedure.

Head normal forms are computed by structural recursion. Each case is a macro
rule that bundles a fixed group of axioms; the derivation is recorded as a
tree of rule applications that can be replayed. The soundness of every axiom
and every macro rule is checked against the stateless bisimilarity oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from .core import (
    ACCEPT,
    DEADLOCK,
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
    big_choice,
    free_idents,
)
from .parser import format_expr
from .semantics import Engine, engine_for

Summand = tuple[Prop, Action, ProcExpr]


@dataclass(frozen=True)
class Hnf:
    """``Σ φ_i :→ a_i.p_i + ψ^(χ :→ 1)``."""

    summands: tuple[Summand, ...]
    psi: Prop
    chi: Prop

    def to_expr(self) -> ProcExpr:
        """The head normal form as a term, omitting trivial parts."""
        parts: list[ProcExpr] = []
        for phi, a, p in self.summands:
            pre = Prefix(a, p)
            parts.append(pre if phi.is_true else Guard(phi, pre))
        if self.chi.is_true:
            tail: ProcExpr = ACCEPT
        elif self.chi.is_false:
            tail = DEADLOCK
        else:
            tail = Guard(self.chi, ACCEPT)
        if not self.psi.is_true:
            tail = Signal(self.psi, tail)
        if not isinstance(tail, Deadlock) or not parts:
            parts.append(tail)
        return big_choice(parts)

    @property
    def is_plain(self) -> bool:
        return self.psi.is_true and all(phi.is_true for phi, _, _ in self.summands)

    def __str__(self) -> str:
        return format_expr(self.to_expr())


def _sort_key(s: Summand):
    return (s[1].label, s[0].bits, format_expr(s[2]))


def normalize_summands(summands) -> tuple[Summand, ...]:
    """Merge summands with the same action and tail, drop false guards, sort."""
    merged: dict[tuple[Action, ProcExpr], Prop] = {}
    for phi, a, p in summands:
        key = (a, p)
        merged[key] = merged[key] | phi if key in merged else phi
    out = [(phi, a, p) for (a, p), phi in merged.items() if phi.satisfiable]
    return tuple(sorted(out, key=_sort_key))


# --------------------------------------------------------------------------
# Derivations


@dataclass(frozen=True)
class Derivation:
    """One macro step of a head-normal-form derivation.

    Derivations of equal sub-terms are shared, so positions are not stored
    but computed when the steps are listed.

    Attributes:
        rule: Macro rule name.
        axioms: The axioms the rule bundles.
        term: The term the rule rewrites.
        result: The head normal form obtained.
        premises: Derivations of the sub-terms the rule consumes, in child
            order (for ``hnf-def`` the single premise is the definition body).
    """

    rule: str
    axioms: tuple[str, ...]
    term: ProcExpr
    result: Hnf
    premises: tuple["Derivation", ...] = ()

    def steps(self, path: tuple[int, ...] = ()) -> list[tuple[tuple[int, ...], "Derivation"]]:
        """All macro steps with their positions, premises first.

        A position lists child indices from the root term; the body of an
        unfolded identifier counts as its child 0.
        """
        out: list[tuple[tuple[int, ...], Derivation]] = []
        for i, p in enumerate(self.premises):
            out.extend(p.steps(path + (i,)))
        out.append((path, self))
        return out

    def format(self) -> str:
        lines = []
        for path, d in self.steps():
            pos = ".".join(map(str, path)) or "root"
            lines.append(f"{d.rule} [{', '.join(d.axioms)}] at {pos}: {format_expr(d.term)}  =>  {d.result}")
        return "\n".join(lines)


RULE_AXIOMS: dict[str, tuple[str, ...]] = {
    "hnf-deadlock": ("A6", "C1", "C2", "SI1"),
    "hnf-accept": ("A6", "C1", "SI1"),
    "hnf-prefix": ("A6", "C1", "SI1"),
    "hnf-choice": ("A1", "A2", "A3", "C3", "SI4", "SI5"),
    "hnf-guard": ("C3", "C4", "C5", "SI6"),
    "hnf-signal": ("SI4", "SI5"),
    "hnf-na": ("NA1", "NA2", "NA3", "NA4", "C7", "SI9"),
    "hnf-seqc": ("A5", "A7", "A8", "A9", "A10", "A11", "A12", "A13", "C6", "C8", "SI8", "R"),
    "hnf-seq": ("A4", "A7", "A8", "A9", "A10"),
    "hnf-def": ("DEF",),
}


class HnfEngine:
    """Head normal forms for terms over one guarded specification."""

    def __init__(self, spec: Spec, engine: Engine | None = None):
        self.spec = spec
        self.sem = engine or engine_for(spec)
        self.T = spec.true()
        self.F = spec.false()
        self._memo: dict[ProcExpr, Derivation] = {}

    def cons_true(self, p: ProcExpr) -> bool:
        return self.sem.cons_prop(p).holds(self.sem._vtrue_row)

    def derive(self, e: ProcExpr) -> Derivation:
        d = self._memo.get(e)
        if d is None:
            d = self._derive(e)
            self._memo[e] = d
        return d

    def hnf(self, e: ProcExpr) -> Hnf:
        return self.derive(e).result

    def _derive(self, e: ProcExpr) -> Derivation:
        subs: tuple[ProcExpr, ...]
        if isinstance(e, Ident):
            rule, subs = "hnf-def", (self.spec[e.name],)
        elif isinstance(e, Deadlock):
            rule, subs = "hnf-deadlock", ()
        elif isinstance(e, Accept):
            rule, subs = "hnf-accept", ()
        elif isinstance(e, Prefix):
            rule, subs = "hnf-prefix", ()
        elif isinstance(e, Choice):
            rule, subs = "hnf-choice", (e.left, e.right)
        elif isinstance(e, Guard):
            rule, subs = "hnf-guard", (e.body,)
        elif isinstance(e, Signal):
            rule, subs = "hnf-signal", (e.body,)
        elif isinstance(e, Na):
            rule, subs = "hnf-na", (e.body,)
        elif isinstance(e, Seqc):
            rule, subs = "hnf-seqc", (e.left, e.right)
        elif isinstance(e, SeqLegacy):
            rule, subs = "hnf-seq", (e.left, e.right)
        else:
            raise TypeError(f"not a process expression: {e!r}")
        premises = tuple(self.derive(s) for s in subs)
        result = self.combine(rule, e, [p.result for p in premises])
        return Derivation(rule, RULE_AXIOMS[rule], e, result, premises)

    def combine(self, rule: str, e: ProcExpr, hs: list[Hnf]) -> Hnf:
        """Apply one macro rule to the head normal forms of the sub-terms."""
        T, F = self.T, self.F
        if rule == "hnf-def":
            return hs[0]
        if rule == "hnf-deadlock":
            return Hnf((), T, F)
        if rule == "hnf-accept":
            return Hnf((), T, T)
        if rule == "hnf-prefix":
            return Hnf(((T, e.action, e.body),), T, F)
        if rule == "hnf-choice":
            h1, h2 = hs
            return Hnf(normalize_summands(h1.summands + h2.summands), h1.psi & h2.psi, h1.chi | h2.chi)
        if rule == "hnf-guard":
            (h,) = hs
            phi = e.cond
            return Hnf(normalize_summands((phi & g, a, p) for g, a, p in h.summands), h.psi, phi & h.chi)
        if rule == "hnf-signal":
            (h,) = hs
            return Hnf(h.summands, e.sig & h.psi, h.chi)
        if rule == "hnf-na":
            (h,) = hs
            return Hnf(h.summands, h.psi, F)
        if rule == "hnf-seqc":
            h1, h2 = hs
            z = e.right
            live = F
            for g, _, p in h1.summands:
                if self.cons_true(p):
                    live = live | g
            first = [(g, a, z if isinstance(p, Accept) else Seqc(p, z)) for g, a, p in h1.summands]
            passing = h1.chi & ~live
            second = [(passing & g, a, q) for g, a, q in h2.summands]
            psi = h1.psi & (~h1.chi | h2.psi)
            return Hnf(normalize_summands(first + second), psi, h1.chi & h2.chi)
        if rule == "hnf-seq":
            h1, h2 = hs
            z = e.right
            first = [(g, a, z if isinstance(p, Accept) else SeqLegacy(p, z)) for g, a, p in h1.summands]
            second = [(h1.chi & g, a, q) for g, a, q in h2.summands]
            psi = h1.psi & (~h1.chi | h2.psi)
            return Hnf(normalize_summands(first + second), psi, h1.chi & h2.chi)
        raise ValueError(f"unknown rule {rule}")

    def replay(self, d: Derivation, term: ProcExpr | None = None) -> bool:
        """Re-run every recorded macro step and compare with the record."""
        if term is not None and d.term != term:
            return False
        e = d.term
        if d.rule == "hnf-def":
            subs: tuple[ProcExpr, ...] = (self.spec[e.name],) if isinstance(e, Ident) else ()
        elif d.rule in ("hnf-choice", "hnf-seqc", "hnf-seq"):
            subs = (e.left, e.right)
        elif d.rule in ("hnf-guard", "hnf-signal", "hnf-na"):
            subs = (e.body,)
        else:
            subs = ()
        if len(subs) != len(d.premises) or d.axioms != RULE_AXIOMS.get(d.rule):
            return False
        if not all(self.replay(p, s) for p, s in zip(d.premises, subs)):
            return False
        try:
            return self.combine(d.rule, e, [p.result for p in d.premises]) == d.result
        except (AttributeError, ValueError, TypeError):
            return False

    # -- reduced forms ----------------------------------------------------
    def reduce(self, h: Hnf) -> Hnf:
        """Drop summands that can never fire; restrict guards to the root signal.

        Raises:
            ValueError: if the root signal is unsatisfiable.
        """
        if not h.psi.satisfiable:
            raise ValueError("root signal is unsatisfiable; no reduced form exists")
        kept = [(phi & h.psi, a, p) for phi, a, p in h.summands if (phi & h.psi).satisfiable and self.cons_true(p)]
        return Hnf(normalize_summands(kept), h.psi, h.chi & h.psi)


def hnf(spec: Spec, expr: ProcExpr) -> Hnf:
    """Head normal form of ``expr`` (identifiers in head position are unfolded)."""
    return HnfEngine(spec).hnf(expr)


def hnf_derivation(spec: Spec, expr: ProcExpr) -> Derivation:
    return HnfEngine(spec).derive(expr)


def reduce_hnf(spec: Spec, h: Hnf) -> Hnf:
    return HnfEngine(spec).reduce(h)


def is_reduced(spec: Spec, h: Hnf) -> bool:
    """Every summand is enabled under some valuation with a consistent target."""
    eng = engine_for(spec)
    row = eng._vtrue_row
    return h.psi.satisfiable and all(
        (phi & h.psi).satisfiable and eng.cons_prop(p).holds(row) for phi, _, p in h.summands
    )


# --------------------------------------------------------------------------
# Depth

INFINITE = math.inf


def depth(spec: Spec, expr: ProcExpr, limit: int = 20000, engine: Engine | None = None) -> float:
    """Length of the longest step sequence from ``expr`` (``inf`` on cycles)."""
    eng = engine or engine_for(spec)
    memo: dict[ProcExpr, float] = {}
    on_path: set[ProcExpr] = set()

    def go(p: ProcExpr) -> float:
        if p in memo:
            return memo[p]
        if p in on_path or len(memo) > limit:
            return INFINITE
        on_path.add(p)
        c = eng.cons_prop(p)
        best = 0.0
        for (_, q), s in eng.step_props(p).items():
            if (s & c).satisfiable:
                best = max(best, 1 + go(q))
                if best == INFINITE:
                    break
        on_path.discard(p)
        memo[p] = best
        return best

    d = go(expr)
    return d if d == INFINITE else int(d)


# --------------------------------------------------------------------------
# Decision procedure for recursion-free terms


@dataclass(frozen=True)
class Distinction:
    """Why two recursion-free terms differ.

    Attributes:
        kind: ``consistency``, ``acceptance`` or ``step``.
        valuation_row: A row of the truth table exhibiting the difference.
        side: For steps, ``left`` or ``right``: which term moves.
        action: For steps, the action.
        target: For steps, the target of the move.
        answers: The other side's answers with the reason each one fails.
    """

    kind: str
    valuation_row: int
    side: str = ""
    action: Action | None = None
    target: ProcExpr | None = None
    answers: tuple[tuple[ProcExpr, "Distinction"], ...] = ()

    def format(self, vars: tuple[str, ...], indent: int = 0) -> str:
        from .core import Valuation

        pad = "  " * indent
        v = Valuation(vars, self.valuation_row)
        if self.kind != "step":
            return f"{pad}{self.kind} differs under {v}"
        lines = [f"{pad}under {v} the {self.side} term does {self.action} to {format_expr(self.target)}"]
        if not self.answers:
            lines.append(f"{pad}  and the other term has no {self.action}-step")
        for q, sub in self.answers:
            lines.append(f"{pad}  answer {format_expr(q)} fails:")
            lines.append(sub.format(vars, indent + 2))
        return "\n".join(lines)


@dataclass(frozen=True)
class RfVerdict:
    equal: bool
    distinction: Distinction | None = None

    def __bool__(self) -> bool:
        return self.equal


def _low(bits: int) -> int:
    return (bits & -bits).bit_length() - 1


class RfDecider:
    """Ground-completeness procedure on reduced head normal forms."""

    def __init__(self, spec: Spec):
        self.spec = spec
        self.h = HnfEngine(spec)
        self._memo: dict[tuple[ProcExpr, ProcExpr], RfVerdict] = {}

    def _reduced(self, p: ProcExpr) -> Hnf | None:
        h = self.h.hnf(p)
        return self.h.reduce(h) if h.psi.satisfiable else None

    def decide(self, p: ProcExpr, q: ProcExpr) -> RfVerdict:
        key = (p, q)
        r = self._memo.get(key)
        if r is None:
            r = self._decide(p, q)
            self._memo[key] = r
        return r

    def _decide(self, p: ProcExpr, q: ProcExpr) -> RfVerdict:
        hp, hq = self._reduced(p), self._reduced(q)
        if hp is None or hq is None:
            if hp is None and hq is None:
                return RfVerdict(True)
            other = hq if hp is None else hp
            return RfVerdict(False, Distinction("consistency", _low(other.psi.bits)))
        if hp.psi != hq.psi:
            return RfVerdict(False, Distinction("consistency", _low(hp.psi.bits ^ hq.psi.bits)))
        if hp.chi != hq.chi:
            return RfVerdict(False, Distinction("acceptance", _low(hp.chi.bits ^ hq.chi.bits)))
        for side, x, y in (("left", hp, hq), ("right", hq, hp)):
            for phi, a, pi in x.summands:
                cover = self.spec.false()
                for phj, b, pj in y.summands:
                    if b == a and self._tails(side, pi, pj):
                        cover = cover | (phi & phj)
                if cover != phi:
                    row = _low(phi.bits & ~cover.bits)
                    answers = []
                    for phj, b, pj in y.summands:
                        if b == a and phj.holds(row):
                            sub = self._tails_verdict(side, pi, pj)
                            answers.append((pj, sub.distinction))
                    return RfVerdict(False, Distinction("step", row, side, a, pi, tuple(answers)))
        return RfVerdict(True)

    def _tails_verdict(self, side: str, pi: ProcExpr, pj: ProcExpr) -> RfVerdict:
        return self.decide(pi, pj) if side == "left" else self.decide(pj, pi)

    def _tails(self, side: str, pi: ProcExpr, pj: ProcExpr) -> bool:
        return self._tails_verdict(side, pi, pj).equal


def decide_bisim_rf(spec: Spec, p: ProcExpr, q: ProcExpr) -> RfVerdict:
    """Decide stateless bisimilarity of two identifier-free terms.

    Raises:
        ValueError: if either term mentions a process identifier.
    """
    if free_idents(p) or free_idents(q):
        raise ValueError("decide_bisim_rf needs recursion-free terms without identifiers")
    return RfDecider(spec).decide(p, q)


# --------------------------------------------------------------------------
# Axioms

Subst = dict[str, object]


@dataclass(frozen=True)
class Rule:
    """An axiom oriented left to right.

    Attributes:
        id: Axiom name.
        lhs: Builds the left-hand side from a substitution.
        rhs: Builds the right-hand side from a substitution.
        sorts: Metavariable sorts: ``term``, ``action`` or ``prop``.
        modes: Modes in which the axiom is claimed sound.
        side: Extra side condition, checked with a semantics engine.
        side_text: Human-readable side condition.
    """

    id: str
    lhs: Callable[[Subst], ProcExpr]
    rhs: Callable[[Subst], ProcExpr]
    sorts: dict[str, str]
    modes: frozenset[str]
    side: Callable[[Subst, Engine], bool] | None = None
    side_text: str = ""
    pattern: str = field(default="", compare=False)

    def instantiate(self, s: Subst) -> tuple[ProcExpr, ProcExpr]:
        return self.lhs(s), self.rhs(s)

    def applicable(self, s: Subst, eng: Engine) -> bool:
        return self.side is None or self.side(s, eng)


def _seq(mode: str):
    return Seqc if mode == "seqc" else SeqLegacy


def _cons_everywhere(name: str):
    return lambda s, eng: eng.cons_prop(s[name]).is_true


def _cons_at_true(name: str):
    return lambda s, eng: eng.cons_prop(s[name]).holds(eng._vtrue_row)


def _rules(mode: str) -> dict[str, Rule]:
    S = _seq(mode)
    both = frozenset({"seq", "seqc"})
    seqc = frozenset({"seqc"})
    seq = frozenset({"seq"})
    t3 = {"x": "term", "y": "term", "z": "term"}
    r: list[Rule] = []

    def add(id, lhs, rhs, sorts, modes, side=None, side_text="", pattern=""):
        r.append(Rule(id, lhs, rhs, sorts, modes, side, side_text, pattern))

    x = lambda s: s["x"]  # noqa: E731
    y = lambda s: s["y"]  # noqa: E731
    z = lambda s: s["z"]  # noqa: E731
    one, zero = ACCEPT, DEADLOCK
    add("A1", lambda s: Choice(x(s), y(s)), lambda s: Choice(y(s), x(s)), t3, both, pattern="x+y = y+x")
    add("A2", lambda s: Choice(x(s), Choice(y(s), z(s))), lambda s: Choice(Choice(x(s), y(s)), z(s)), t3, both,
        pattern="x+(y+z) = (x+y)+z")
    add("A3", lambda s: Choice(x(s), x(s)), x, t3, both, pattern="x+x = x")
    add("A4", lambda s: S(Choice(x(s), y(s)), z(s)), lambda s: Choice(S(x(s), z(s)), S(y(s), z(s))), t3, seq,
        pattern="(x+y)·z = x·z + y·z")
    add("A5", lambda s: S(S(x(s), y(s)), z(s)), lambda s: S(x(s), S(y(s), z(s))), t3, both,
        pattern="(x·y)·z = x·(y·z)")
    add("A6", lambda s: Choice(x(s), zero), x, t3, both, pattern="x+0 = x")
    add("A7", lambda s: S(zero, x(s)), lambda s: zero, t3, both, pattern="0·x = 0")
    add("A8", lambda s: S(x(s), one), x, t3, both, pattern="x·1 = x")
    add("A9", lambda s: S(one, x(s)), x, t3, both, pattern="1·x = x")
    ta = {"a": "action", "x": "term", "y": "term"}
    add("A10", lambda s: S(Prefix(s["a"], x(s)), y(s)), lambda s: Prefix(s["a"], S(x(s), y(s))), ta, both,
        pattern="(a.x)·y = a.(x·y)")
    if mode == "seqc":
        add("NA1", lambda s: Na(zero), lambda s: zero, {}, seqc, pattern="NA(0) = 0")
        add("NA2", lambda s: Na(one), lambda s: zero, {}, seqc, pattern="NA(1) = 0")
        add("NA3", lambda s: Na(Prefix(s["a"], x(s))), lambda s: Prefix(s["a"], x(s)), {"a": "action", "x": "term"},
            seqc, pattern="NA(a.x) = a.x")
        add("NA4", lambda s: Na(Choice(x(s), y(s))), lambda s: Choice(Na(x(s)), Na(y(s))), t3, seqc,
            pattern="NA(x+y) = NA(x)+NA(y)")
        add("A11", lambda s: Seqc(Na(Choice(x(s), y(s))), z(s)),
            lambda s: Choice(Seqc(Na(x(s)), z(s)), Seqc(Na(y(s)), z(s))), t3, seqc,
            pattern="NA(x+y);z = NA(x);z + NA(y);z")
        tax = {"a": "action", "x": "term", "y": "term", "z": "term"}
        add("A12", lambda s: Seqc(Choice(Choice(Prefix(s["a"], x(s)), y(s)), one), Na(z(s))),
            lambda s: Seqc(Choice(Prefix(s["a"], x(s)), y(s)), Na(z(s))), tax, seqc,
            lambda s, eng: _cons_at_true("x")(s, eng) and _cons_everywhere("z")(s, eng),
            "x is consistent under v_true and z under every valuation",
            pattern="(a.x+y+1);NA(z) = (a.x+y);NA(z)")
        add("A13", lambda s: Seqc(Choice(Choice(Prefix(s["a"], x(s)), y(s)), one), Choice(z(s), one)),
            lambda s: Choice(Seqc(Choice(Prefix(s["a"], x(s)), y(s)), Choice(z(s), one)), one), tax, seqc,
            lambda s, eng: _cons_at_true("x")(s, eng) and _cons_everywhere("z")(s, eng),
            "x is consistent under v_true and z under every valuation",
            pattern="(a.x+y+1);(z+1) = (a.x+y);(z+1) + 1")
        tp = {"x": "term"}
        tpp = {"phi": "prop", "psi": "prop", "x": "term"}
        tpx = {"phi": "prop", "x": "term"}
        tpxy = {"phi": "prop", "x": "term", "y": "term"}
        P = lambda s: s["phi"]  # noqa: E731
        Q = lambda s: s["psi"]  # noqa: E731
        add("C1", lambda s: Guard(Prop.true(s["x_vars"]), x(s)), x, tp | {"x_vars": "vars"}, seqc, pattern="true:→x = x")
        add("C2", lambda s: Guard(Prop.false(s["x_vars"]), x(s)), lambda s: zero, tp | {"x_vars": "vars"}, seqc,
            _cons_everywhere("x"), "x is consistent under every valuation", pattern="false:→x = 0")
        add("C3", lambda s: Guard(P(s) | Q(s), x(s)), lambda s: Choice(Guard(P(s), x(s)), Guard(Q(s), x(s))), tpp,
            seqc, pattern="(φ∨ψ):→x = φ:→x + ψ:→x")
        add("C4", lambda s: Guard(P(s) & Q(s), x(s)), lambda s: Guard(P(s), Guard(Q(s), x(s))), tpp, seqc,
            pattern="(φ∧ψ):→x = φ:→(ψ:→x)")
        add("C5", lambda s: Guard(P(s), Choice(x(s), y(s))), lambda s: Choice(Guard(P(s), x(s)), Guard(P(s), y(s))),
            tpxy, seqc, pattern="φ:→(x+y) = φ:→x + φ:→y")
        add("C6", lambda s: Guard(P(s), Seqc(x(s), y(s))), lambda s: Seqc(Guard(P(s), x(s)), y(s)), tpxy, seqc,
            _cons_everywhere("y"), "y is consistent under every valuation", pattern="φ:→(x;y) = (φ:→x);y")
        add("C7", lambda s: Guard(P(s), Na(x(s))), lambda s: Na(Guard(P(s), x(s))), tpx, seqc,
            pattern="φ:→NA(x) = NA(φ:→x)")

        def c8_side(s, eng):
            xe = s["x"]
            enabled = eng.enabled_prop(xe)
            return eng.cons_prop(s["y"]).is_true and (s["phi"] & eng.cons_prop(xe)).implies(enabled)

        add("C8", lambda s: Seqc(Choice(Na(x(s)), Guard(P(s), one)), Choice(Na(y(s)), Guard(Q(s), one))),
            lambda s: Choice(Seqc(Na(x(s)), Choice(Na(y(s)), Guard(Q(s), one))), Guard(P(s) & Q(s), one)),
            {"phi": "prop", "psi": "prop", "x": "term", "y": "term"}, seqc, c8_side,
            "y is consistent under every valuation and x has a step wherever φ holds and x is consistent",
            pattern="(NA(x)+φ:→1);(NA(y)+ψ:→1) = NA(x);(NA(y)+ψ:→1) + (φ∧ψ):→1")
        add("SI1", lambda s: Signal(Prop.true(s["x_vars"]), x(s)), x, tp | {"x_vars": "vars"}, seqc,
            pattern="true^x = x")
        add("SI2", lambda s: Signal(Prop.false(s["x_vars"]), x(s)), lambda s: Signal(Prop.false(s["x_vars"]), zero),
            tp | {"x_vars": "vars"}, seqc, pattern="false^x = false^0")
        add("SI3", lambda s: Prefix(s["a"], Signal(Prop.false(s["x_vars"]), x(s))), lambda s: zero,
            {"a": "action", "x": "term", "x_vars": "vars"}, seqc, pattern="a.(false^x) = 0")
        add("SI4", lambda s: Choice(Signal(P(s), x(s)), y(s)), lambda s: Signal(P(s), Choice(x(s), y(s))), tpxy, seqc,
            pattern="(φ^x)+y = φ^(x+y)")
        add("SI5", lambda s: Signal(P(s), Signal(Q(s), x(s))), lambda s: Signal(P(s) & Q(s), x(s)), tpp, seqc,
            pattern="φ^(ψ^x) = (φ∧ψ)^x")
        add("SI6", lambda s: Guard(P(s), Signal(Q(s), x(s))), lambda s: Signal(~P(s) | Q(s), Guard(P(s), x(s))), tpp,
            seqc, lambda s, eng: not (~s["phi"] & ~s["psi"] & eng.cons_prop(s["x"])).satisfiable,
            "¬φ∧¬ψ is inconsistent with x", pattern="φ:→(ψ^x) = (¬φ∨ψ)^(φ:→x)")
        add("SI7", lambda s: Signal(P(s), Guard(P(s), x(s))), lambda s: Signal(P(s), x(s)), tpx, seqc,
            pattern="φ^(φ:→x) = φ^x")
        add("SI8", lambda s: Signal(P(s), Seqc(x(s), y(s))), lambda s: Seqc(Signal(P(s), x(s)), y(s)), tpxy, seqc,
            pattern="φ^(x;y) = (φ^x);y")
        add("SI9", lambda s: Signal(P(s), Na(x(s))), lambda s: Na(Signal(P(s), x(s))), tpx, seqc,
            pattern="φ^NA(x) = NA(φ^x)")
        add("R", lambda s: Prefix(s["a"], Signal(s["sigma"], x(s))), lambda s: zero,
            {"a": "action", "sigma": "prop", "x": "term"}, seqc,
            lambda s, eng: not s["sigma"].holds(eng._vtrue_row), "σ is false under v_true",
            pattern="a.(σ^x) = 0")
    return {rule.id: rule for rule in r}


AXIOM_IDS = (
    ["A%d" % i for i in range(1, 14)]
    + ["NA1", "NA2", "NA3", "NA4"]
    + ["C%d" % i for i in range(1, 9)]
    + ["SI%d" % i for i in range(1, 10)]
    + ["R"]
)


def axiom_instances(id: str, mode: str = "seqc", allow_unsound: bool = False) -> Rule:
    """The rewrite rule for axiom ``id`` in the given composition mode.

    Args:
        id: Axiom name such as ``A9`` or ``SI3``.
        mode: ``seqc`` (sequencing) or ``seq`` (legacy composition).
        allow_unsound: Return axioms not claimed for this mode (A4 in seqc).

    Raises:
        KeyError: for unknown axiom names or axioms invalid for the mode.
    """
    if id not in AXIOM_IDS:
        raise KeyError(f"unknown axiom {id}")
    rules = _rules(mode)
    if id == "A4" and mode == "seqc" and allow_unsound:
        base = _rules("seq")["A4"]
        return Rule("A4", lambda s: Seqc(Choice(s["x"], s["y"]), s["z"]),
                    lambda s: Choice(Seqc(s["x"], s["z"]), Seqc(s["y"], s["z"])), base.sorts, frozenset(),
                    pattern="(x+y);z = x;z + y;z")
    rule = rules.get(id)
    if rule is None or mode not in rule.modes:
        raise KeyError(f"axiom {id} is not valid in {mode} mode")
    return rule


def axioms_for(mode: str) -> list[str]:
    return [a for a in AXIOM_IDS if a in _rules(mode) and mode in _rules(mode)[a].modes]


# --------------------------------------------------------------------------
# Soundness checking against the stateless oracle


@dataclass(frozen=True)
class SoundnessReport:
    """Outcome of checking one axiom on random instances.

    Attributes:
        id: Axiom name.
        mode: Composition mode.
        checked: Instances meeting the side condition that were compared.
        failures: Instances meeting the side condition with inequivalent sides.
        rejected: Instances discarded by the side condition.
        unconditioned_failures: Rejected instances whose sides do differ.
    """

    id: str
    mode: str
    checked: int
    failures: tuple[tuple[ProcExpr, ProcExpr], ...]
    rejected: int
    unconditioned_failures: int

    @property
    def sound(self) -> bool:
        return not self.failures


def check_axiom(id: str, mode: str = "seqc", n: int = 200, seed: int = 0, depth: int = 2,
                allow_unsound: bool = False) -> SoundnessReport:
    """Compare both sides of ``n`` random instances of an axiom."""
    import random

    from .bisim import stateless_bisimilar
    from .gen import TermShape, empty_spec, random_subst

    rule = axiom_instances(id, mode, allow_unsound)
    shape = TermShape(depth=depth, vars=("P", "Q") if mode == "seqc" else (), mode=mode)
    spec = empty_spec(shape)
    eng = engine_for(spec)
    rng = random.Random(f"{id}/{mode}/{seed}")
    checked = rejected = uncond = 0
    failures = []
    attempts = 0
    while checked < n and attempts < 50 * n:
        attempts += 1
        s = random_subst(rng, rule.sorts, shape)
        lhs, rhs = rule.instantiate(s)
        ok = stateless_bisimilar(spec, lhs, rhs, eng).bisimilar
        if not rule.applicable(s, eng):
            rejected += 1
            uncond += not ok
            continue
        checked += 1
        if not ok:
            failures.append((lhs, rhs))
    return SoundnessReport(id, mode, checked, tuple(failures), rejected, uncond)


def check_hnf(spec: Spec, e: ProcExpr) -> bool:
    """The head normal form of ``e`` is stateless bisimilar to ``e``."""
    from .bisim import stateless_bisimilar

    return stateless_bisimilar(spec, e, hnf(spec, e).to_expr()).bisimilar
