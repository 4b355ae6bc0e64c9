"""Random terms, propositions and specifications for property tests."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .core import (
    ACCEPT,
    DEADLOCK,
    Action,
    Choice,
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
)


@dataclass(frozen=True)
class TermShape:
    """Parameters of the random term generator.

    Attributes:
        depth: Maximum nesting depth.
        actions: Action labels to draw from.
        vars: Propositional variables; empty disables guards and signals.
        mode: ``seqc`` or ``seq``.
        na: Whether ``NA`` may occur.
    """

    depth: int = 3
    actions: tuple[str, ...] = ("a", "b")
    vars: tuple[str, ...] = ("P", "Q")
    mode: str = "seqc"
    na: bool = True


def random_prop(rng: random.Random, vars: tuple[str, ...]) -> Prop:
    full = (1 << (1 << len(vars))) - 1
    return Prop(tuple(vars), rng.randint(0, full))


def random_term(rng: random.Random, shape: TermShape, idents: tuple[str, ...] = (), guarded: bool = False) -> ProcExpr:
    """A random term; identifiers occur only under a prefix when ``guarded``."""

    def go(d: int, under_prefix: bool) -> ProcExpr:
        leaves = ["0", "1"] + (["X"] if idents and (under_prefix or not guarded) else [])
        if d <= 0:
            kind = rng.choice(leaves + ["pre"])
        else:
            ops = ["pre", "pre", "+", ";", "0", "1"]
            if shape.vars:
                ops += ["guard", "sig"]
            if shape.na and shape.mode == "seqc":
                ops.append("na")
            if idents and (under_prefix or not guarded):
                ops.append("X")
            kind = rng.choice(ops)
        if kind == "0":
            return DEADLOCK
        if kind == "1":
            return ACCEPT
        if kind == "X":
            return Ident(rng.choice(idents))
        if kind == "pre":
            body = go(d - 1, True) if d > 0 else ACCEPT
            return Prefix(Action(rng.choice(shape.actions)), body)
        if kind == "+":
            return Choice(go(d - 1, under_prefix), go(d - 1, under_prefix))
        if kind == ";":
            op = Seqc if shape.mode == "seqc" else SeqLegacy
            return op(go(d - 1, under_prefix), go(d - 1, under_prefix))
        if kind == "guard":
            return Guard(random_prop(rng, shape.vars), go(d - 1, under_prefix))
        if kind == "sig":
            return Signal(random_prop(rng, shape.vars), go(d - 1, under_prefix))
        return Na(go(d - 1, under_prefix))

    return go(shape.depth, False)


def random_spec(rng: random.Random, shape: TermShape, n_idents: int = 2, summands: int = 3) -> Spec:
    """A random guarded specification.

    Every equation is a sum of at most ``summands`` parts; a part is ``1`` or
    ``a.t`` where ``t`` sequences up to three factors, most of them
    identifiers. With variables, parts may be guarded and tails signalled.
    """
    names = tuple(f"X{i}" for i in range(n_idents))
    small = TermShape(1, shape.actions, shape.vars, shape.mode, shape.na)
    op = Seqc if shape.mode == "seqc" else SeqLegacy
    eqs = {}
    for x in names:
        parts: list[ProcExpr] = []
        for _ in range(rng.randint(1, summands)):
            if rng.random() < 0.2:
                part: ProcExpr = ACCEPT
            else:
                factors = [
                    Ident(rng.choice(names)) if rng.random() < 0.7 else random_term(rng, small)
                    for _ in range(rng.randint(0, 3))
                ]
                tail: ProcExpr = ACCEPT
                for f in factors:
                    tail = f if tail is ACCEPT else op(tail, f)
                if shape.vars and rng.random() < 0.3:
                    tail = Signal(random_prop(rng, shape.vars), tail)
                part = Prefix(Action(rng.choice(shape.actions)), tail)
            if shape.vars and rng.random() < 0.3:
                part = Guard(random_prop(rng, shape.vars), part)
            parts.append(part)
        e = parts[0]
        for p in parts[1:]:
            e = Choice(e, p)
        eqs[x] = e
    return Spec(eqs, names[0], mode=shape.mode, vars=shape.vars, alphabet=shape.actions)


def random_subst(rng: random.Random, sorts: dict[str, str], shape: TermShape) -> dict[str, object]:
    """A random substitution for the metavariables of an axiom."""
    out: dict[str, object] = {}
    for name, sort in sorts.items():
        if sort == "term":
            out[name] = random_term(rng, shape)
        elif sort == "action":
            out[name] = Action(rng.choice(shape.actions))
        elif sort == "prop":
            out[name] = random_prop(rng, shape.vars)
        elif sort == "vars":
            out[name] = shape.vars
        else:
            raise ValueError(f"unknown sort {sort}")
    return out


def empty_spec(shape: TermShape) -> Spec:
    """A specification with no equations, used as context for closed terms."""
    return Spec({"S": ACCEPT}, "S", mode=shape.mode, vars=shape.vars if shape.mode == "seqc" else (),
                alphabet=shape.actions)


def random_context(rng: random.Random, shape: TermShape, depth: int = 2):
    """A random one-hole context, returned as a function filling the hole."""
    op = Seqc if shape.mode == "seqc" else SeqLegacy
    small = TermShape(1, shape.actions, shape.vars, shape.mode, shape.na)
    layers = []
    for _ in range(rng.randint(0, depth)):
        kinds = ["+l", "+r", ";l", ";r", "pre"]
        if shape.vars:
            kinds += ["guard", "sig"]
        if shape.na and shape.mode == "seqc":
            kinds.append("na")
        layers.append((rng.choice(kinds), random_term(rng, small), random_prop(rng, shape.vars) if shape.vars else None,
                       Action(rng.choice(shape.actions))))

    def fill(e: ProcExpr) -> ProcExpr:
        for kind, other, phi, a in layers:
            if kind == "+l":
                e = Choice(e, other)
            elif kind == "+r":
                e = Choice(other, e)
            elif kind == ";l":
                e = op(e, other)
            elif kind == ";r":
                e = op(other, e)
            elif kind == "pre":
                e = Prefix(a, e)
            elif kind == "guard":
                e = Guard(phi, e)
            elif kind == "sig":
                e = Signal(phi, e)
            else:
                e = Na(e)
        return e

    return fill


def axiom_pair(rng: random.Random, shape: TermShape, steps: int = 3):
    """Two terms equal by construction: both sides of axiom instances in contexts.

    Starting from a random term, each step rewrites the whole current term
    inside a fresh context with an instance of a random sound axiom whose
    side condition holds, so the two results are bisimilar.
    """
    from .rewrite import axiom_instances, axioms_for
    from .semantics import engine_for

    spec = empty_spec(shape)
    eng = engine_for(spec)
    ids = axioms_for(shape.mode)
    left = right = random_term(rng, TermShape(2, shape.actions, shape.vars, shape.mode, shape.na))
    for _ in range(steps):
        rule = axiom_instances(rng.choice(ids), shape.mode)
        for _ in range(50):
            s = random_subst(rng, rule.sorts, TermShape(1, shape.actions, shape.vars, shape.mode, shape.na))
            if rule.applicable(s, eng):
                break
        else:
            continue
        l, r = rule.instantiate(s)
        ctx = random_context(rng, shape, 1)
        left, right = ctx(Choice(left, l)), ctx(Choice(right, r))
    return left, right
