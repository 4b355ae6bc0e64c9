"""Immutable terms, propositions and specifications.

Process expressions are frozen dataclasses compared structurally. Propositions
are truth tables over an ordered variable list, so logical equivalence is
plain equality.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Literal, Union

Mode = Literal["seq", "seqc"]
TAU_LABEL = "tau"


def _cached_hash(cls):
    """Cache structural hashes; terms are hashed a lot by the memo tables."""
    plain = cls.__hash__

    def __hash__(self):
        h = self.__dict__.get("_h")
        if h is None:
            h = plain(self)
            object.__setattr__(self, "_h", h)
        return h

    cls.__hash__ = __hash__
    return cls


@dataclass(frozen=True, order=True)
class Action:
    """An action label; ``tau`` is the silent action."""

    label: str

    def __post_init__(self):
        if not self.label:
            raise ValueError("action label must be nonempty")

    @property
    def is_tau(self) -> bool:
        return self.label == TAU_LABEL

    def __str__(self) -> str:
        return self.label


TAU = Action(TAU_LABEL)


# --------------------------------------------------------------------------
# Propositions


@dataclass(frozen=True)
class Prop:
    """A proposition as the set of satisfying rows of a truth table.

    Row ``r`` assigns ``vars[i]`` the value of bit ``i`` of ``r``.

    Attributes:
        vars: Ordered variable list the table ranges over.
        bits: Bit set of satisfying rows.
    """

    vars: tuple[str, ...]
    bits: int

    @property
    def nrows(self) -> int:
        return 1 << len(self.vars)

    @property
    def full(self) -> int:
        return (1 << self.nrows) - 1

    @staticmethod
    def true(vars: Iterable[str]) -> Prop:
        vs = tuple(vars)
        return Prop(vs, (1 << (1 << len(vs))) - 1)

    @staticmethod
    def false(vars: Iterable[str]) -> Prop:
        return Prop(tuple(vars), 0)

    @staticmethod
    def var(vars: Iterable[str], name: str) -> Prop:
        vs = tuple(vars)
        if name not in vs:
            raise KeyError(f"unknown propositional variable {name!r}")
        return Prop(vs, _var_bits(len(vs), vs.index(name)))

    @staticmethod
    def const(vars: Iterable[str], value: bool) -> Prop:
        return Prop.true(vars) if value else Prop.false(vars)

    def _check(self, other: Prop) -> None:
        if self.vars != other.vars:
            raise ValueError(f"variable lists differ: {self.vars} vs {other.vars}")

    def __and__(self, other: Prop) -> Prop:
        self._check(other)
        return Prop(self.vars, self.bits & other.bits)

    def __or__(self, other: Prop) -> Prop:
        self._check(other)
        return Prop(self.vars, self.bits | other.bits)

    def __invert__(self) -> Prop:
        return Prop(self.vars, self.full & ~self.bits)

    def implies(self, other: Prop) -> bool:
        """True iff every row satisfying self satisfies other."""
        self._check(other)
        return self.bits & ~other.bits == 0

    @property
    def is_true(self) -> bool:
        return self.bits == self.full

    @property
    def is_false(self) -> bool:
        return self.bits == 0

    @property
    def satisfiable(self) -> bool:
        return self.bits != 0

    def holds(self, row: int) -> bool:
        return bool(self.bits >> row & 1)

    def rows(self) -> Iterator[int]:
        b, r = self.bits, 0
        while b:
            if b & 1:
                yield r
            b >>= 1
            r += 1

    def eval(self, v: Valuation) -> bool:
        return prop_eval(self, v)

    def __str__(self) -> str:
        return format_prop(self)


@lru_cache(maxsize=None)
def _var_bits(n: int, i: int) -> int:
    return sum(1 << r for r in range(1 << n) if r >> i & 1)


@lru_cache(maxsize=4096)
def format_prop(p: Prop) -> str:
    """Render a proposition as a small DNF in the concrete syntax."""
    if p.is_true:
        return "true"
    if p.is_false:
        return "false"
    from sympy import symbols
    from sympy.logic import SOPform
    from sympy.logic.boolalg import And, Not, Or

    syms = tuple(symbols(f"v0:{len(p.vars)}"))
    minterms = [[r >> i & 1 for i in range(len(p.vars))] for r in p.rows()]
    expr = SOPform(list(syms), minterms)

    def lit(e) -> str:
        if isinstance(e, Not):
            return "!" + p.vars[syms.index(e.args[0])]
        return p.vars[syms.index(e)]

    def conj(e) -> str:
        if isinstance(e, And):
            return " & ".join(lit(a) for a in sorted(e.args, key=_sym_key(syms)))
        return lit(e)

    terms = list(expr.args) if isinstance(expr, Or) else [expr]
    parts = [conj(t) for t in terms]
    if len(parts) == 1:
        return parts[0]
    return " | ".join(f"({s})" if "&" in s else s for s in sorted(parts))


def _sym_key(syms):
    def key(e):
        from sympy.logic.boolalg import Not

        base = e.args[0] if isinstance(e, Not) else e
        return syms.index(base)

    return key


@dataclass(frozen=True)
class Valuation:
    """A total assignment of truth values to an ordered variable list."""

    vars: tuple[str, ...]
    row: int

    @staticmethod
    def from_dict(vars: Iterable[str], values: dict[str, bool]) -> Valuation:
        vs = tuple(vars)
        missing = set(vs) - set(values)
        if missing:
            raise ValueError(f"valuation not total, missing {sorted(missing)}")
        return Valuation(vs, sum(1 << i for i, x in enumerate(vs) if values[x]))

    def __getitem__(self, name: str) -> bool:
        return bool(self.row >> self.vars.index(name) & 1)

    def as_dict(self) -> dict[str, bool]:
        return {x: self[x] for x in self.vars}

    def __str__(self) -> str:
        if not self.vars:
            return "{}"
        return "{" + ", ".join(x if self[x] else "!" + x for x in self.vars) + "}"


def v_true(vars: Iterable[str]) -> Valuation:
    vs = tuple(vars)
    return Valuation(vs, (1 << len(vs)) - 1)


def all_valuations(vars: Iterable[str]) -> list[Valuation]:
    vs = tuple(vars)
    return [Valuation(vs, r) for r in range(1 << len(vs))]


def prop_eval(p: Prop, v: Valuation) -> bool:
    """Evaluate ``p`` under ``v``.

    Raises:
        ValueError: if the valuation ranges over a different variable list.
    """
    if p.vars != v.vars:
        raise ValueError(f"variable lists differ: {p.vars} vs {v.vars}")
    return p.holds(v.row)


# --------------------------------------------------------------------------
# Process expressions


class ProcExpr:
    """Base class of process expressions."""

    __slots__ = ()

    def __str__(self) -> str:
        from .parser import format_expr

        return format_expr(self)

    def __add__(self, other: ProcExpr) -> ProcExpr:
        return Choice(self, other)


@_cached_hash
@dataclass(frozen=True, repr=False)
class Deadlock(ProcExpr):
    def __repr__(self) -> str:
        return "Deadlock()"


@_cached_hash
@dataclass(frozen=True, repr=False)
class Accept(ProcExpr):
    def __repr__(self) -> str:
        return "Accept()"


@_cached_hash
@dataclass(frozen=True)
class Prefix(ProcExpr):
    action: Action
    body: ProcExpr


@_cached_hash
@dataclass(frozen=True)
class Choice(ProcExpr):
    left: ProcExpr
    right: ProcExpr


@_cached_hash
@dataclass(frozen=True)
class Seqc(ProcExpr):
    """Sequencing ``p;q``: q starts once p accepts and has no steps."""

    left: ProcExpr
    right: ProcExpr


@_cached_hash
@dataclass(frozen=True)
class SeqLegacy(ProcExpr):
    """Sequential composition ``p·q`` with the transparent rules."""

    left: ProcExpr
    right: ProcExpr


@_cached_hash
@dataclass(frozen=True)
class Na(ProcExpr):
    body: ProcExpr


@_cached_hash
@dataclass(frozen=True)
class Guard(ProcExpr):
    cond: Prop
    body: ProcExpr


@_cached_hash
@dataclass(frozen=True)
class Signal(ProcExpr):
    sig: Prop
    body: ProcExpr


@_cached_hash
@dataclass(frozen=True)
class Ident(ProcExpr):
    name: str


DEADLOCK = Deadlock()
ACCEPT = Accept()

Binary = Union[Choice, Seqc, SeqLegacy]


def children(e: ProcExpr) -> tuple[ProcExpr, ...]:
    if isinstance(e, (Choice, Seqc, SeqLegacy)):
        return (e.left, e.right)
    if isinstance(e, (Prefix, Na, Guard, Signal)):
        return (e.body,)
    return ()


def subterms(e: ProcExpr) -> Iterator[ProcExpr]:
    stack = [e]
    while stack:
        t = stack.pop()
        yield t
        stack.extend(children(t))


def free_idents(expr: ProcExpr) -> set[str]:
    """Identifiers occurring syntactically in ``expr``."""
    return {t.name for t in subterms(expr) if isinstance(t, Ident)}


def actions_of(expr: ProcExpr) -> set[Action]:
    return {t.action for t in subterms(expr) if isinstance(t, Prefix)}


def props_of(expr: ProcExpr) -> list[Prop]:
    out = []
    for t in subterms(expr):
        if isinstance(t, Guard):
            out.append(t.cond)
        elif isinstance(t, Signal):
            out.append(t.sig)
    return out


def has_conditions(expr: ProcExpr) -> bool:
    return any(isinstance(t, (Guard, Signal)) for t in subterms(expr))


def big_choice(exprs: Iterable[ProcExpr]) -> ProcExpr:
    """Left-nested choice; the empty sum is deadlock."""
    it = iter(exprs)
    acc = next(it, None)
    if acc is None:
        return DEADLOCK
    for e in it:
        acc = Choice(acc, e)
    return acc


def seq_word(word: Iterable[str], mode: Mode = "seqc") -> ProcExpr:
    """Left-nested sequential composition of identifiers.

    The empty word is ``1`` and a single identifier is returned as is.
    """
    op = Seqc if mode == "seqc" else SeqLegacy
    acc: ProcExpr | None = None
    for name in word:
        acc = Ident(name) if acc is None else op(acc, Ident(name))
    return ACCEPT if acc is None else acc


def flatten_choice(e: ProcExpr) -> list[ProcExpr]:
    if isinstance(e, Choice):
        return flatten_choice(e.left) + flatten_choice(e.right)
    return [e]


def flatten_seq(e: ProcExpr) -> list[ProcExpr]:
    if isinstance(e, Seqc):
        return flatten_seq(e.left) + flatten_seq(e.right)
    return [e]


def term_word(e: ProcExpr) -> list[str] | None:
    """The identifier word a sequencing of identifiers denotes, if any.

    ``1`` factors are skipped, so ``1`` itself is the empty word.
    """
    out: list[str] = []
    for f in flatten_seq(e):
        if isinstance(f, Ident):
            out.append(f.name)
        elif not isinstance(f, Accept):
            return None
    return out


# --------------------------------------------------------------------------
# Specifications


@dataclass(frozen=True, eq=False)
class Spec:
    """A recursive specification.

    Attributes:
        equations: Ordered map from identifier to defining expression.
        init: The initial identifier.
        mode: ``seqc`` for sequencing, ``seq`` for legacy composition.
        vars: Declared propositional variables.
        alphabet: Action labels, declared or inferred.
        name: Optional display name.
    """

    equations: dict[str, ProcExpr]
    init: str
    mode: Mode = "seqc"
    vars: tuple[str, ...] = ()
    alphabet: tuple[str, ...] = ()
    name: str = "S"
    _key: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.init not in self.equations:
            raise ValueError(f"initial identifier {self.init!r} is not defined")
        for x, body in self.equations.items():
            undefined = free_idents(body) - self.equations.keys()
            if undefined:
                raise ValueError(f"{x}: undefined identifiers {sorted(undefined)}")
        if not self.alphabet:
            labels: list[str] = []
            for body in self.equations.values():
                for a in sorted(actions_of(body)):
                    if not a.is_tau and a.label not in labels:
                        labels.append(a.label)
            object.__setattr__(self, "alphabet", tuple(labels))
        key = (tuple(self.equations.items()), self.init, self.mode, self.vars, self.alphabet)
        object.__setattr__(self, "_key", key)

    def __eq__(self, other) -> bool:
        return isinstance(other, Spec) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __getitem__(self, name: str) -> ProcExpr:
        return self.equations[name]

    @property
    def idents(self) -> list[str]:
        return list(self.equations)

    def true(self) -> Prop:
        return Prop.true(self.vars)

    def false(self) -> Prop:
        return Prop.false(self.vars)

    def var(self, name: str) -> Prop:
        return Prop.var(self.vars, name)

    def v_true(self) -> Valuation:
        return v_true(self.vars)

    def valuations(self) -> list[Valuation]:
        return all_valuations(self.vars)

    def has_conditions(self) -> bool:
        return any(has_conditions(b) for b in self.equations.values())

    def replace(self, **changes) -> Spec:
        fields = dict(
            equations=self.equations,
            init=self.init,
            mode=self.mode,
            vars=self.vars,
            alphabet=self.alphabet,
            name=self.name,
        )
        fields.update(changes)
        return Spec(**fields)

    def __str__(self) -> str:
        from .parser import format_spec

        return format_spec(self)


def product_rows(n: int) -> Iterator[tuple[bool, ...]]:
    return itertools.product((False, True), repeat=n)
