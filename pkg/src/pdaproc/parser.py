"""Concrete syntax: parsing and printing of specs, PDAs and process graphs."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .core import (
    ACCEPT,
    DEADLOCK,
    TAU_LABEL,
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
    actions_of,
    format_prop,
    free_idents,
)
from .pda import Pda, Transition

RESERVED = {"spec", "mode", "vars", "init", "alphabet", "NA", "true", "false", "seq", "seqc"}


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    start: int
    end: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


class ParseError(ValueError):
    """A syntax or static-semantics error with its source location."""

    def __init__(self, message: str, span: SourceSpan | None = None):
        self.message = message
        self.span = span
        super().__init__(f"{span}: {message}" if span else message)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    span: SourceSpan


_SPEC_TOKENS = [
    ("ws", r"[ \t\r\n]+|//[^\n]*"),
    ("seql", r"\.seq(?![A-Za-z0-9_#'])|·"),
    ("bottom", r"_\|_"),
    ("ident", r"[A-Za-z_][A-Za-z0-9_#']*"),
    ("num", r"[0-9]+"),
    ("arrow", r"->"),
    ("signal", r"\^\^"),
    ("sym", r"[+;.(){}\[\]=,!&|]"),
]
_SPEC_RE = re.compile("|".join(f"(?P<{k}>{p})" for k, p in _SPEC_TOKENS))


def _tokenize(text: str, regex: re.Pattern) -> list[Token]:
    toks: list[Token] = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = regex.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", SourceSpan(line, col, pos, pos + 1))
        kind, s = m.lastgroup, m.group()
        if kind != "ws":
            k = "sym" if kind == "sym" else kind
            toks.append(Token(k, s, SourceSpan(line, col, pos, m.end())))
        nl = s.count("\n")
        if nl:
            line += nl
            col = len(s) - s.rfind("\n")
        else:
            col += len(s)
        pos = m.end()
    toks.append(Token("eof", "", SourceSpan(line, col, pos, pos)))
    return toks


class _Cursor:
    def __init__(self, toks: list[Token]):
        self.toks = toks
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind != "eof" and t.text == text

    def eat(self, text: str) -> Token:
        if not self.at(text):
            self.fail(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        return self.next()

    def next(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def ident(self, what: str = "identifier") -> Token:
        t = self.tok
        if t.kind != "ident" or t.text in RESERVED:
            self.fail(f"expected {what}, found {t.text or 'end of input'!r}")
        return self.next()

    def fail(self, msg: str, tok: Token | None = None):
        raise ParseError(msg, (tok or self.tok).span)


class _SpecParser:
    def __init__(self, text: str):
        self.c = _Cursor(_tokenize(text, _SPEC_RE))
        self.mode = "seqc"
        self.vars: tuple[str, ...] = ()
        self.alphabet: tuple[str, ...] | None = None
        self.ident_spans: dict[str, SourceSpan] = {}
        self.action_spans: list[tuple[str, SourceSpan]] = []

    # -- header -----------------------------------------------------------
    def spec(self) -> Spec:
        c = self.c
        c.eat("spec")
        name = c.ident("spec name").text
        c.eat("{")
        init_tok = None
        while c.tok.text in ("mode", "vars", "alphabet", "init") and c.peek().text != "=":
            kw = c.next().text
            if kw == "mode":
                t = c.next()
                if t.text not in ("seq", "seqc"):
                    c.fail("mode must be seq or seqc", t)
                self.mode = t.text
            elif kw == "vars":
                self.vars = tuple(self._name_list())
            elif kw == "alphabet":
                self.alphabet = tuple(self._name_list())
            else:
                init_tok = c.ident()
            c.eat(";")
        equations: dict[str, ProcExpr] = {}
        while not c.at("}"):
            t = c.ident()
            if t.text in equations:
                c.fail(f"duplicate equation for {t.text}", t)
            c.eat("=")
            equations[t.text] = self.expr()
        c.eat("}")
        if c.tok.kind != "eof":
            c.fail("trailing input after spec")
        if not equations:
            c.fail("spec has no equations")
        for x, sp in self.ident_spans.items():
            if x not in equations:
                raise ParseError(f"undefined identifier {x}", sp)
        if init_tok is None:
            init = next(iter(equations))
        else:
            init = init_tok.text
            if init not in equations:
                raise ParseError(f"undefined initial identifier {init}", init_tok.span)
        if self.alphabet is not None:
            for a, sp in self.action_spans:
                if a != TAU_LABEL and a not in self.alphabet:
                    raise ParseError(f"undeclared action {a}", sp)
        return Spec(equations, init, self.mode, self.vars, self.alphabet or (), name)

    def _name_list(self) -> list[str]:
        names = [self.c.ident().text]
        while self.c.at(","):
            self.c.next()
            names.append(self.c.ident().text)
        return names

    # -- expressions ------------------------------------------------------
    def expr(self) -> ProcExpr:
        e = self.gexpr()
        while self.c.at("+"):
            self.c.next()
            e = Choice(e, self.gexpr())
        return e

    def gexpr(self) -> ProcExpr:
        c = self.c
        if c.at("["):
            c.next()
            p = self.prop()
            c.eat("]")
            if c.tok.kind == "arrow":
                c.next()
                return Guard(p, self.gexpr())
            if c.tok.kind == "signal":
                c.next()
                return Signal(p, self.gexpr())
            c.fail("expected '->' or '^^' after condition")
        return self.sexpr()

    def sexpr(self) -> ProcExpr:
        c = self.c
        e = self.pexpr()
        while c.at(";") or c.tok.kind == "seql":
            t = c.next()
            rhs = self.pexpr()
            if t.kind == "seql":
                if self.mode != "seq":
                    c.fail("sequential composition '·' is only allowed in seq mode", t)
                e = SeqLegacy(e, rhs)
            else:
                e = Seqc(e, rhs)
        return e

    def pexpr(self) -> ProcExpr:
        c = self.c
        t = c.tok
        if t.kind == "ident" and c.peek().text == "." and t.text not in RESERVED:
            c.next()
            c.next()
            self.action_spans.append((t.text, t.span))
            return Prefix(Action(t.text), self.pexpr())
        return self.atom()

    def atom(self) -> ProcExpr:
        c = self.c
        t = c.tok
        if t.kind == "num":
            c.next()
            if t.text == "0":
                return DEADLOCK
            if t.text == "1":
                return ACCEPT
            c.fail(f"unexpected number {t.text}", t)
        if t.kind == "bottom":
            c.next()
            return DEADLOCK
        if t.text == "NA" and t.kind == "ident":
            c.next()
            c.eat("(")
            e = self.expr()
            c.eat(")")
            return Na(e)
        if c.at("("):
            c.next()
            e = self.expr()
            c.eat(")")
            return e
        if t.kind == "ident" and t.text not in RESERVED:
            c.next()
            self.ident_spans.setdefault(t.text, t.span)
            return Ident(t.text)
        c.fail(f"expected a process expression, found {t.text or 'end of input'!r}")

    # -- propositions -----------------------------------------------------
    def prop(self) -> Prop:
        p = self.pand()
        while self.c.at("|"):
            self.c.next()
            p = p | self.pand()
        return p

    def pand(self) -> Prop:
        p = self.pnot()
        while self.c.at("&"):
            self.c.next()
            p = p & self.pnot()
        return p

    def pnot(self) -> Prop:
        c = self.c
        t = c.tok
        if c.at("!"):
            c.next()
            return ~self.pnot()
        if c.at("("):
            c.next()
            p = self.prop()
            c.eat(")")
            return p
        if t.kind == "ident" and t.text == "true":
            c.next()
            return Prop.true(self.vars)
        if t.kind == "ident" and t.text == "false":
            c.next()
            return Prop.false(self.vars)
        if t.kind == "ident":
            if t.text not in self.vars:
                c.fail(f"unknown propositional variable {t.text}", t)
            c.next()
            return Prop.var(self.vars, t.text)
        c.fail(f"expected a proposition, found {t.text or 'end of input'!r}")


def parse_spec(text: str) -> Spec:
    """Parse a specification.

    Raises:
        ParseError: on syntax errors, undefined identifiers, ``·`` in seqc
            mode, unknown variables or undeclared actions.
    """
    return _SpecParser(text).spec()


def parse_expr(text: str, vars: tuple[str, ...] = (), mode: str = "seqc") -> ProcExpr:
    """Parse a single process expression (identifiers are not checked)."""
    p = _SpecParser(text)
    p.vars = tuple(vars)
    p.mode = mode
    e = p.expr()
    if p.c.tok.kind != "eof":
        p.c.fail("trailing input after expression")
    return e


# --------------------------------------------------------------------------
# PDAs

_PDA_RE = re.compile(
    r"(?P<ws>[ \t\r]+|//[^\n]*)|(?P<nl>\n)|(?P<arrowl>--)(?=[^-])|(?P<arrowr>\]-->)"
    r"|(?P<ident>[A-Za-z0-9_#'$@~]+)|(?P<sym>[{};\[/])"
)


def _pda_lines(text: str) -> list[list[Token]]:
    lines: list[list[Token]] = [[]]
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _PDA_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", SourceSpan(line, col, pos, pos + 1))
        kind, s = m.lastgroup, m.group()
        span = SourceSpan(line, col, pos, m.end())
        if kind == "nl":
            lines.append([])
            line, col = line + 1, 1
        else:
            if kind != "ws":
                lines[-1].append(Token(kind, s, span))
            col += len(s)
        pos = m.end()
    return [ln for ln in lines if ln]


def parse_pda(text: str) -> Pda:
    """Parse a PDA in the line-oriented ``pda NAME { ... }`` format."""
    lines = _pda_lines(text)
    if not lines or lines[0][0].text != "pda":
        raise ParseError("expected 'pda NAME {'", lines[0][0].span if lines else None)
    head = lines[0]
    if len(head) != 3 or head[2].text != "{":
        raise ParseError("expected 'pda NAME {'", head[0].span)
    name = head[1].text
    if lines[-1][0].text != "}" or len(lines[-1]) != 1:
        raise ParseError("expected closing '}' on its own line", lines[-1][0].span)
    decl: dict[str, list[str]] = {}
    raw: list[tuple[list[Token], SourceSpan]] = []
    for ln in lines[1:-1]:
        kw = ln[0].text
        if kw in ("states", "init", "final", "data", "alphabet") and (len(ln) == 1 or ln[1].kind != "arrowl"):
            if ln[-1].text != ";":
                raise ParseError(f"'{kw}' declaration must end with ';'", ln[-1].span)
            if kw in decl:
                raise ParseError(f"duplicate '{kw}' declaration", ln[0].span)
            decl[kw] = [t.text for t in ln[1:-1]]
        else:
            raw.append((ln, ln[0].span))
    if "states" not in decl or "init" not in decl:
        raise ParseError("PDA must declare states and init", head[0].span)
    if len(decl["init"]) != 1:
        raise ParseError("exactly one initial state expected", head[0].span)
    states = tuple(decl["states"])
    data = tuple(decl.get("data", ()))
    alphabet = decl.get("alphabet")
    trans: list[Transition] = []
    used: list[str] = []
    for ln, sp in raw:
        t = _transition(ln, sp)
        for s in (t.src, t.dst):
            if s not in states:
                raise ParseError(f"undeclared state {s}", sp)
        for d in ((t.pop,) if t.pop else ()) + t.push:
            if d not in data:
                raise ParseError(f"undeclared datum {d}", sp)
        a = t.action.label
        if a != TAU_LABEL:
            if alphabet is not None and a not in alphabet:
                raise ParseError(f"undeclared action {a}", sp)
            if a not in used:
                used.append(a)
        trans.append(t)
    init = decl["init"][0]
    if init not in states:
        raise ParseError(f"undeclared initial state {init}", head[0].span)
    finals = decl.get("final", [])
    for f in finals:
        if f not in states:
            raise ParseError(f"undeclared final state {f}", head[0].span)
    return Pda(states, tuple(alphabet) if alphabet is not None else tuple(used), data, tuple(trans),
               init, frozenset(finals), name)


def _transition(ln: list[Token], sp: SourceSpan) -> Transition:
    # s -- a [ d / x* ]--> t
    texts = [t.text for t in ln]
    try:
        src = texts[0]
        assert ln[1].kind == "arrowl"
        act = texts[2]
        assert texts[3] == "["
        pop = texts[4]
        assert texts[5] == "/"
        j = texts.index("]-->", 6)
        push = texts[6:j]
        (dst,) = texts[j + 1:]
    except (AssertionError, ValueError, IndexError):
        raise ParseError("malformed transition, expected 's --a[d/x]--> t'", sp) from None
    if push == ["eps"]:
        push = []
    if "eps" in push:
        raise ParseError("'eps' must be the whole push word", sp)
    return Transition(src, Action(act), None if pop == "eps" else pop, tuple(push), dst)


# --------------------------------------------------------------------------
# Printing

_CHOICE, _COND, _SEQ, _PREFIX = 0, 1, 2, 3


def format_expr(e: ProcExpr) -> str:
    """Print an expression so that :func:`parse_expr` reads it back."""
    return _fmt(e, 0)


def _fmt(e: ProcExpr, ctx: int) -> str:
    if isinstance(e, Deadlock):
        return "0"
    if isinstance(e, Accept):
        return "1"
    if isinstance(e, Ident):
        return e.name
    if isinstance(e, Na):
        return f"NA({_fmt(e.body, 0)})"
    if isinstance(e, Prefix):
        s = f"{e.action}.{_fmt(e.body, _PREFIX)}"
        level = _PREFIX
    elif isinstance(e, Choice):
        s = f"{_fmt(e.left, _CHOICE)} + {_fmt(e.right, _COND)}"
        level = _CHOICE
    elif isinstance(e, (Seqc, SeqLegacy)):
        op = ";" if isinstance(e, Seqc) else " · "
        s = f"{_fmt(e.left, _SEQ)}{op}{_fmt(e.right, _PREFIX)}"
        level = _SEQ
    elif isinstance(e, Guard):
        s = f"[{format_prop(e.cond)}] -> {_fmt(e.body, _COND)}"
        level = _COND
    elif isinstance(e, Signal):
        s = f"[{format_prop(e.sig)}]^^ {_fmt(e.body, _COND)}"
        level = _COND
    else:
        raise TypeError(f"not a process expression: {e!r}")
    return f"({s})" if ctx > level else s


def format_spec(spec: Spec) -> str:
    lines = [f"spec {spec.name} {{", f"  mode {spec.mode};"]
    if spec.vars:
        lines.append(f"  vars {', '.join(spec.vars)};")
    if spec.alphabet:
        lines.append(f"  alphabet {', '.join(spec.alphabet)};")
    lines.append(f"  init {spec.init};")
    for x, body in spec.equations.items():
        lines.append(f"  {x} = {format_expr(body)}")
    lines.append("}")
    return "\n".join(lines) + "\n"


def format_pda(pda: Pda) -> str:
    lines = [f"pda {pda.name} {{", f"  states {' '.join(pda.states)};", f"  init {pda.init};"]
    finals = [s for s in pda.states if s in pda.finals]
    lines.append(f"  final {' '.join(finals)};" if finals else "  final;")
    lines.append(f"  data {' '.join(pda.data)};" if pda.data else "  data;")
    lines.append(f"  alphabet {' '.join(pda.alphabet)};" if pda.alphabet else "  alphabet;")
    lines.extend(f"  {t}" for t in pda.transitions)
    lines.append("}")
    return "\n".join(lines) + "\n"


def spec_actions(spec: Spec) -> set[str]:
    return {a.label for body in spec.equations.values() for a in actions_of(body)}


def print_lts(lts, format: str = "aut") -> str:
    """Render an explored graph in extended Aldebaran, DOT or plain text format."""
    if format == "aut":
        out = [f"des ({lts.root},{len(lts.transitions)},{len(lts.labels)})"]
        out += [f'({s},"{a}",{t})' for s, a, t in lts.transitions]
        out.append("accepting: " + ",".join(map(str, sorted(lts.accepting))))
        out.append("frontier: " + ",".join(map(str, sorted(lts.frontier))))
        return "\n".join(out) + "\n"
    if format == "dot":
        out = ["digraph lts {", "  rankdir=LR;", "  node [shape=circle];",
               "  __root [shape=point];", f"  __root -> {lts.root};"]
        for i, lab in enumerate(lts.labels):
            shape = "doublecircle" if i in lts.accepting else "circle"
            style = ", style=dashed" if i in lts.frontier else ""
            esc = lab.replace("\\", "\\\\").replace('"', '\\"')
            out.append(f'  {i} [label="{esc}", shape={shape}{style}];')
        out += [f'  {s} -> {t} [label="{a}"];' for s, a, t in lts.transitions]
        out.append("}")
        return "\n".join(out) + "\n"
    if format == "text":
        out = [f"root {lts.root}"]
        for i, lab in enumerate(lts.labels):
            flags = (" accepting" if i in lts.accepting else "") + (" frontier" if i in lts.frontier else "")
            out.append(f"state {i}: {lab}{flags}")
        out += [f"{s} -{a}-> {t}" for s, a, t in lts.transitions]
        return "\n".join(out) + "\n"
    raise ValueError(f"unknown LTS format {format!r}")


def parse_aut(text: str):
    """Read back the extended Aldebaran format written by :func:`print_lts`."""
    from .semantics import Lts

    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    m = re.fullmatch(r"des \((\d+),(\d+),(\d+)\)", lines[0])
    if not m:
        raise ParseError("missing 'des' header")
    root, ntrans, nstates = map(int, m.groups())
    trans, acc, front = [], set(), set()
    for ln in lines[1:]:
        tm = re.fullmatch(r'\((\d+),"([^"]*)",(\d+)\)', ln)
        if tm:
            trans.append((int(tm.group(1)), Action(tm.group(2)), int(tm.group(3))))
        elif ln.startswith("accepting:"):
            acc = {int(x) for x in ln[10:].split(",") if x.strip()}
        elif ln.startswith("frontier:"):
            front = {int(x) for x in ln[9:].split(",") if x.strip()}
        else:
            raise ParseError(f"unrecognized line {ln!r}")
    if len(trans) != ntrans:
        raise ParseError("transition count does not match header")
    labels = [str(i) for i in range(nstates)]
    return Lts(labels, list(range(nstates)), root, trans, frozenset(acc), frozenset(front))


__all__ = [
    "ParseError",
    "SourceSpan",
    "format_expr",
    "format_pda",
    "format_spec",
    "parse_aut",
    "parse_expr",
    "parse_pda",
    "parse_spec",
    "print_lts",
    "free_idents",
]
