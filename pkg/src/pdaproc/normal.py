"""Identifier classification, Greibach normal forms and separation.

Fresh identifiers are named deterministically: ``F0, F1, ...`` for factors
introduced by the Greibach transformation, ``X#na`` for acceptance-stripped
variants and ``X#dag`` for separation variants.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import (
    ACCEPT,
    Accept,
    Choice,
    Deadlock,
    Guard,
    Ident,
    Prefix,
    ProcExpr,
    SeqLegacy,
    Seqc,
    Signal,
    Spec,
    big_choice,
    flatten_choice,
    free_idents,
    seq_word,
)
from .rewrite import Hnf, HnfEngine
from .semantics import Bounds, engine_for, explore, require_guarded

Word = tuple[str, ...]


@dataclass(frozen=True)
class IdentClass:
    """Partition of the identifiers of a specification.

    Attributes:
        accepting: Identifiers that accept immediately.
        nonaccepting: All other identifiers.
        hereditary: Largest set of non-accepting identifiers whose defining
            equations mention only identifiers of the set.
    """

    accepting: frozenset[str]
    nonaccepting: frozenset[str]
    hereditary: frozenset[str]


def _accepts(spec: Spec, x: str) -> bool:
    eng = engine_for(spec)
    if spec.has_conditions():
        return eng.accepts_derived(Ident(x))
    return eng.accepts_plain(Ident(x))


def hereditary_step(spec: Spec, candidates: frozenset[str]) -> frozenset[str]:
    """One closure iteration: keep identifiers whose bodies stay inside the set."""
    return frozenset(x for x in candidates if free_idents(spec[x]) <= candidates)


def classify(spec: Spec) -> IdentClass:
    """Split identifiers by acceptance and compute the hereditary ones.

    Raises:
        UnguardedError: if the specification is not guarded.
    """
    require_guarded(spec)
    acc = frozenset(x for x in spec.idents if _accepts(spec, x))
    nacc = frozenset(spec.idents) - acc
    h = nacc
    while True:
        nxt = hereditary_step(spec, h)
        if nxt == h:
            return IdentClass(acc, nacc, h)
        h = nxt


def _check_word(word, cls: IdentClass) -> None:
    known = cls.accepting | cls.nonaccepting
    for x in word:
        if x not in known:
            raise ValueError(f"undefined identifier {x!r} in word")


def is_acceptance_irredundant(word, cls: IdentClass) -> bool:
    """Membership of ``word`` in ``INT* NT T* ∪ T*``."""
    _check_word(word, cls)
    last = max((i for i, y in enumerate(word) if y in cls.nonaccepting), default=None)
    # everything after the last non-accepting position is accepting
    return last is None or all(y in cls.hereditary for y in word[:last])


def is_separated(word, cls: IdentClass, sep: frozenset[str]) -> bool:
    """Membership of ``word`` in ``(INT − sep)* sep T* ∪ T*``."""
    _check_word(word, cls)
    if all(x in cls.accepting for x in word):
        return True
    i = 0
    while i < len(word) and word[i] in cls.hereditary - sep:
        i += 1
    return i < len(word) and word[i] in sep and all(x in cls.accepting for x in word[i + 1:])


# --------------------------------------------------------------------------
# Greibach normal form


def _seq_op(spec: Spec):
    return Seqc if spec.mode == "seqc" else SeqLegacy


def _factors(e: ProcExpr, op) -> list[ProcExpr]:
    if isinstance(e, op):
        return _factors(e.left, op) + _factors(e.right, op)
    return [] if isinstance(e, Accept) else [e]


def _prefix_word(e: ProcExpr, op) -> Word | None:
    if isinstance(e, Prefix):
        fs = _factors(e.body, op)
        if all(isinstance(f, Ident) for f in fs) and (fs or isinstance(e.body, Accept)):
            if isinstance(e.body, Accept) or _is_left_word(e.body, op):
                return tuple(f.name for f in fs)
    return None


def _is_left_word(e: ProcExpr, op) -> bool:
    if isinstance(e, Ident):
        return True
    return isinstance(e, op) and isinstance(e.right, Ident) and _is_left_word(e.left, op)


def is_gnf_expr(e: ProcExpr, op=Seqc) -> bool:
    """Syntactic check for ``(1 +) Σ a_i.α_i`` with identifier words ``α_i``."""
    if isinstance(e, Deadlock):
        return True
    parts = flatten_choice(e)
    ones = [p for p in parts if isinstance(p, Accept)]
    return len(ones) <= 1 and all(isinstance(p, Accept) or _prefix_word(p, op) is not None for p in parts)


def _is_signal_gnf(e: ProcExpr, op) -> bool:
    for p in flatten_choice(e):
        if isinstance(p, Guard):
            p = p.body
        if isinstance(p, Signal):
            p = p.body
            if isinstance(p, Guard):
                p = p.body
        if not (isinstance(p, (Accept, Deadlock)) or _prefix_word(p, op) is not None):
            return False
    return True


def is_gnf(spec: Spec) -> bool:
    op = _seq_op(spec)
    check = _is_signal_gnf if spec.has_conditions() else is_gnf_expr
    return all(check(spec[x], op) for x in spec.idents)


def gnf_words(spec: Spec, x: str) -> tuple[bool, list[tuple[str, Word]]]:
    """The 1-summand flag and the ``(action, word)`` summands of a GNF equation."""
    op = _seq_op(spec)
    one = False
    out = []
    for p in flatten_choice(spec[x]):
        if isinstance(p, Accept):
            one = True
        elif isinstance(p, Deadlock):
            continue
        else:
            w = _prefix_word(p, op)
            if w is None:
                raise ValueError(f"equation of {x} is not in Greibach normal form")
            out.append((p.action.label, w))
    return one, out


def _fresh(taken: set[str], prefix: str, start: int = 0) -> tuple[str, int]:
    i = start
    while f"{prefix}{i}" in taken:
        i += 1
    return f"{prefix}{i}", i + 1


def to_gnf(spec: Spec) -> Spec:
    """Rewrite every equation into (signal) Greibach normal form.

    Equations already in normal form are kept verbatim. Other right-hand
    sides are replaced by their head normal form; every non-identifier factor
    of a summand tail gets a fresh identifier defined by that factor.

    Raises:
        UnguardedError: if the specification is not guarded.
    """
    require_guarded(spec)
    if is_gnf(spec):
        return spec
    op = _seq_op(spec)
    taken = set(spec.idents)
    counter = 0
    factor_ident: dict[ProcExpr, str] = {}
    pending: list[tuple[str, ProcExpr]] = []
    eqs: dict[str, ProcExpr] = {}
    check = _is_signal_gnf if spec.has_conditions() else is_gnf_expr

    for x in spec.idents:
        pending.append((x, spec[x]))
    henv = HnfEngine(spec)
    while pending:
        x, body = pending.pop(0)
        if x in spec.equations and check(body, op):
            eqs[x] = body
            continue
        h = henv.hnf(body)
        summands = []
        for phi, a, tail in h.summands:
            word = []
            for f in _factors(tail, op):
                if isinstance(f, Ident):
                    word.append(f.name)
                    continue
                name = factor_ident.get(f)
                if name is None:
                    name, counter = _fresh(taken, "F", counter)
                    taken.add(name)
                    factor_ident[f] = name
                    pending.append((name, f))
                word.append(name)
            summands.append((phi, a, seq_word(word, spec.mode)))
        eqs[x] = Hnf(tuple(summands), h.psi, h.chi).to_expr()
    ordered = {x: eqs[x] for x in list(spec.idents) + [n for n in eqs if n not in spec.equations]}
    return spec.replace(equations=ordered)


# --------------------------------------------------------------------------
# Acceptance irredundant Greibach normal form


def _word_expr(word: Word, mode: str) -> ProcExpr:
    return seq_word(word, mode)


def _rebuild(spec: Spec, x: str, one: bool, summands: list[tuple[str, Word]]) -> ProcExpr:
    from .core import Action

    parts: list[ProcExpr] = [Prefix(Action(a), _word_expr(w, spec.mode)) for a, w in summands]
    if one:
        parts = [ACCEPT] + parts
    return big_choice(parts)


def _inline_trivial(spec: Spec) -> Spec:
    """Remove identifiers defined as exactly 1 from words; cut words after 0."""
    ones = {x for x in spec.idents if isinstance(spec[x], Accept)}
    zeros = {x for x in spec.idents if isinstance(spec[x], Deadlock)}
    if not ones and not zeros:
        return spec
    eqs = {}
    for x in spec.idents:
        one, summ = gnf_words(spec, x)
        if isinstance(spec[x], (Accept, Deadlock)):
            eqs[x] = spec[x]
            continue
        new = []
        for a, w in summ:
            out: list[str] = []
            for y in w:
                if y in ones:
                    continue
                out.append(y)
                if y in zeros:
                    break
            new.append((a, tuple(out)))
        eqs[x] = _rebuild(spec, x, one, new)
    return spec.replace(equations=eqs)


def strip_name(x: str) -> str:
    return f"{x}#na"


def to_aignf(spec: Spec, validate_depth: int = 8) -> Spec:
    """Transform a plain sequencing specification into AIGNF.

    Accepting identifiers in front of a non-accepting position are replaced by
    acceptance-stripped variants whose words are stripped throughout. The
    result is validated: every original identifier must stay k-bisimilar to
    its counterpart and every explored word must be acceptance irredundant.

    Raises:
        UnguardedError: if the specification is not guarded.
        ValueError: for specifications with conditions or in ``seq`` mode,
            or if validation fails.
    """
    require_guarded(spec)
    if spec.mode != "seqc" or spec.has_conditions():
        raise ValueError("to_aignf covers plain sequencing specifications")
    g = _inline_trivial(to_gnf(spec))
    cls = classify(g)
    variants: dict[str, str] = {}
    taken = set(g.idents)

    def stripped(y: str) -> str:
        if y in cls.hereditary:
            return y
        name = variants.get(y)
        if name is None:
            name = strip_name(y)
            while name in taken:
                name += "'"
            taken.add(name)
            variants[y] = name
        return name

    def fix(w: Word) -> Word:
        last = max((i for i, y in enumerate(w) if y in cls.nonaccepting), default=None)
        if last is None:
            return w
        return tuple(stripped(y) for y in w[:last]) + w[last:]

    eqs: dict[str, ProcExpr] = {}
    for x in g.idents:
        if isinstance(g[x], (Accept, Deadlock)):
            eqs[x] = g[x]
            continue
        one, summ = gnf_words(g, x)
        eqs[x] = _rebuild(g, x, one, [(a, fix(w)) for a, w in summ])
    done: set[str] = set()
    while len(done) < len(variants):
        for y, name in list(variants.items()):
            if name in done:
                continue
            done.add(name)
            _, summ = gnf_words(g, y)
            eqs[name] = _rebuild(g, name, False, [(a, tuple(stripped(z) for z in w)) for a, w in summ])
    out = g.replace(equations=eqs)
    validate_aignf(spec, out, validate_depth)
    return out


def validate_aignf(original: Spec, out: Spec, k: int = 10) -> None:
    """Check behaviour preservation and reachable acceptance irredundancy.

    Raises:
        ValueError: if a check fails.
    """
    _validate_preserves(original, out, k)
    cls = classify(out)
    for x in original.idents:
        lts = explore(out, Bounds(max_depth=k, max_states=20000), root=Ident(x))
        for key in lts.keys:
            w = _word_of(key)
            if w is None or not is_acceptance_irredundant(w, cls):
                raise ValueError(f"reachable state {key} is not an acceptance irredundant word")


def _validate_preserves(original: Spec, out: Spec, k: int) -> None:
    from .bisim import k_bisimilar

    for x in original.idents:
        b = Bounds(max_depth=k, max_states=20000)
        l1 = explore(original, b, root=Ident(x))
        l2 = explore(out, b, root=Ident(x))
        kk = min(k, l1.exact_depth, l2.exact_depth)
        v = k_bisimilar(l1, l2, kk)
        if not v.equivalent:
            raise ValueError(f"transformation changed the behaviour of {x} (distinguished within {kk} steps)")


def _word_of(e: ProcExpr) -> Word | None:
    out: list[str] = []

    def go(t: ProcExpr) -> bool:
        if isinstance(t, (Seqc, SeqLegacy)):
            return go(t.left) and go(t.right)
        if isinstance(t, Ident):
            out.append(t.name)
            return True
        return isinstance(t, Accept)

    return tuple(out) if go(e) else None


def is_aignf(spec: Spec) -> bool:
    if spec.has_conditions() or not is_gnf(spec):
        return False
    cls = classify(spec)
    for x in spec.idents:
        _, summ = gnf_words(spec, x)
        if not all(is_acceptance_irredundant(w, cls) for _, w in summ):
            return False
    return True


# --------------------------------------------------------------------------
# Separation


def dag_name(x: str) -> str:
    return f"{x}#dag"


def _reachable_idents(spec: Spec, roots) -> set[str]:
    seen = set(roots)
    todo = list(seen)
    while todo:
        x = todo.pop()
        for y in free_idents(spec[x]):
            if y not in seen:
                seen.add(y)
                todo.append(y)
    return seen


def separate(spec: Spec) -> tuple[Spec, frozenset[str]]:
    """Add variants so that the non-accepting identifiers separate acceptance.

    Every non-accepting occurrence except the last one in a word is replaced
    by its ``#dag`` variant, whose words use variants throughout. Variants
    that no original identifier can reach are left out.

    Returns:
        The new specification and the separating set (the original
        non-accepting identifiers).

    Raises:
        ValueError: if the input is not in AIGNF.
    """
    if not is_aignf(spec):
        raise ValueError("separate expects a specification in AIGNF")
    cls = classify(spec)
    nt = cls.nonaccepting
    if not nt:
        return spec, frozenset()
    taken = set(spec.idents)
    names: dict[str, str] = {}
    for y in spec.idents:
        if y in nt:
            n = dag_name(y)
            while n in taken:
                n += "'"
            taken.add(n)
            names[y] = n

    def dagger(w: Word) -> Word:
        last = max((i for i, y in enumerate(w) if y in nt), default=None)
        if last is None:
            return w
        return tuple(names.get(y, y) for y in w[:last]) + w[last:]

    def ddagger(w: Word) -> Word:
        return tuple(names.get(y, y) for y in w)

    eqs: dict[str, ProcExpr] = {}
    for x in spec.idents:
        if isinstance(spec[x], (Accept, Deadlock)):
            eqs[x] = spec[x]
            continue
        one, summ = gnf_words(spec, x)
        eqs[x] = _rebuild(spec, x, one, [(a, dagger(w)) for a, w in summ])
    for y, n in names.items():
        if isinstance(spec[y], Deadlock):
            eqs[n] = spec[y]
            continue
        one, summ = gnf_words(spec, y)
        eqs[n] = _rebuild(spec, n, one, [(a, ddagger(w)) for a, w in summ])
    full = spec.replace(equations=eqs)
    keep = _reachable_idents(full, spec.idents)
    out = spec.replace(equations={x: e for x, e in eqs.items() if x in keep})
    return out, frozenset(nt)


def separation_holds(spec: Spec, sep: frozenset[str], roots=None, depth: int = 8) -> bool:
    """Along explored transitions, separated sources have separated targets."""
    cls = classify(spec)
    for x in roots or spec.idents:
        lts = explore(spec, Bounds(max_depth=depth, max_states=20000), root=Ident(x))
        words = [_word_of(k) for k in lts.keys]
        for s, _, t in lts.transitions:
            ws, wt = words[s], words[t]
            if ws is None or wt is None:
                return False
            if is_separated(ws, cls, sep) and not is_separated(wt, cls, sep):
                return False
    return True
