"""Pushdown automata and their process graphs.

A configuration is a control state with a stack whose leftmost symbol is the
top. A transition ``s --a[d/x]--> t`` pops ``d`` (or fires on the empty stack
when ``d`` is ``None``) and pushes the word ``x``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .core import Action


@dataclass(frozen=True, order=True)
class Transition:
    src: str
    action: Action
    pop: str | None
    push: tuple[str, ...]
    dst: str

    def __str__(self) -> str:
        pop = "eps" if self.pop is None else self.pop
        push = " ".join(self.push) if self.push else "eps"
        return f"{self.src} --{self.action}[{pop}/{push}]--> {self.dst}"


@dataclass(frozen=True, order=True)
class Config:
    state: str
    stack: tuple[str, ...] = ()

    def __str__(self) -> str:
        return f"({self.state},{' '.join(self.stack) if self.stack else 'eps'})"


@dataclass(frozen=True)
class Pda:
    """A pushdown automaton accepting by final state.

    Attributes:
        states: Control states, in declaration order.
        alphabet: Input action labels (``tau`` may label transitions too).
        data: Stack alphabet.
        transitions: The transition relation.
        init: Initial control state.
        finals: Final control states.
        name: Display name.
    """

    states: tuple[str, ...]
    alphabet: tuple[str, ...]
    data: tuple[str, ...]
    transitions: tuple[Transition, ...]
    init: str
    finals: frozenset[str] = frozenset()
    name: str = "M"
    _by_head: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        known = set(self.states)
        if self.init not in known:
            raise ValueError(f"undeclared initial state {self.init!r}")
        if not self.finals <= known:
            raise ValueError(f"undeclared final states {sorted(self.finals - known)}")
        data = set(self.data)
        index: dict[tuple[str, str | None], list[Transition]] = {}
        for t in self.transitions:
            if t.src not in known or t.dst not in known:
                raise ValueError(f"undeclared state in {t}")
            if t.pop is not None and t.pop not in data or not set(t.push) <= data:
                raise ValueError(f"undeclared datum in {t}")
            if not t.action.is_tau and t.action.label not in self.alphabet:
                raise ValueError(f"undeclared action in {t}")
            index.setdefault((t.src, t.pop), []).append(t)
        object.__setattr__(self, "_by_head", index)

    def matching(self, state: str, top: str | None) -> list[Transition]:
        return self._by_head.get((state, top), [])

    @property
    def root(self) -> Config:
        return Config(self.init, ())

    def is_final(self, cfg: Config) -> bool:
        return cfg.state in self.finals

    def __str__(self) -> str:
        from .parser import format_pda

        return format_pda(self)


def pda_steps(pda: Pda, cfg: Config) -> set[tuple[Action, Config]]:
    """Outgoing steps of a configuration."""
    top = cfg.stack[0] if cfg.stack else None
    rest = cfg.stack[1:]
    return {(t.action, Config(t.dst, t.push + rest)) for t in pda.matching(cfg.state, top)}


def pda_accepts(pda: Pda, cfg: Config) -> bool:
    return cfg.state in pda.finals


def pda_lts(pda: Pda, max_depth: int = 12, max_states: int = 50000):
    """Explore the process graph of ``pda`` from its root configuration."""
    from .semantics import Bounds, explore

    return explore(pda, Bounds(max_depth, max_states))


def branching_degree(pda: Pda) -> int:
    """Maximum number of transitions enabled by a state and stack top."""
    counts = Counter((t.src, t.pop) for t in pda.transitions)
    return max(counts.values(), default=0)
