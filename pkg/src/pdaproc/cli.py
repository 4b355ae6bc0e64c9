"""Command-line front end.

Exit codes: 0 on success or equivalence, 1 when processes are distinguished
or a specification is unguarded, 2 on usage, input or format errors.
"""

from __future__ import annotations

import argparse
import difflib
import json
import sys
from pathlib import Path

from . import corpus, repro
from .bisim import (
    bounded_compare,
    format_witness,
    partition_refine,
    replay,
    stateless_bisimilar,
    witness_from_dict,
    witness_to_dict,
)
from .convert import onestate_pda_to_spec, pda_to_signal_spec, signal_spec_to_pda, spec_to_pda
from .core import Ident, Spec
from .normal import separate, to_aignf, to_gnf
from .parser import ParseError, format_pda, format_spec, parse_expr, parse_pda, parse_spec, print_lts
from .pda import Pda
from .rewrite import AXIOM_IDS, axiom_instances, axioms_for, check_axiom, hnf_derivation, reduce_hnf
from .semantics import Bounds, UnguardedError, check_guarded, explore

OK, DISTINGUISHED, USAGE = 0, 1, 2


class CliError(Exception):
    """An input problem reported with exit code 2."""


# --------------------------------------------------------------------------
# Input and output helpers


def load(path: str) -> Spec | Pda:
    """Read a spec or PDA; ``corpus:NAME`` reads a bundled example."""
    if path.startswith("corpus:"):
        name = path[len("corpus:"):]
        if name not in corpus.names():
            raise CliError(f"no corpus entry {name!r}; available: {', '.join(corpus.names())}")
        text = corpus.text(name)
    else:
        try:
            text = Path(path).read_text()
        except OSError as e:
            raise CliError(f"cannot read {path}: {e.strerror}") from e
    first = text.lstrip().split(None, 1)[:1]
    kind = "pda" if path.endswith(".pda") or first == ["pda"] else "spec"
    return parse_pda(text) if kind == "pda" else parse_spec(text)


def load_spec(path: str) -> Spec:
    x = load(path)
    if not isinstance(x, Spec):
        raise CliError(f"{path} is a PDA; a specification is needed")
    return x


def load_pda(path: str) -> Pda:
    x = load(path)
    if not isinstance(x, Pda):
        raise CliError(f"{path} is a specification; a PDA is needed")
    return x


def emit(args, text: str) -> None:
    if getattr(args, "out", None):
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def semantics_for(x, choice: str) -> str:
    if choice != "auto":
        return choice
    return "derived" if isinstance(x, Spec) and x.has_conditions() else "plain"


def bounds(args) -> Bounds:
    return Bounds(args.depth, args.max_states)


# --------------------------------------------------------------------------
# Commands


def cmd_check_guarded(args) -> int:
    g = check_guarded(load_spec(args.file))
    if g.ok:
        print("guarded")
        return OK
    print(f"unguarded: cycle [{' '.join(g.cycle)}]")
    return DISTINGUISHED


def cmd_lts(args) -> int:
    src = load(args.file)
    lts = explore(src, bounds(args), semantics=semantics_for(src, args.semantics))
    emit(args, print_lts(lts, args.format))
    return OK


def cmd_gnf(args) -> int:
    emit(args, format_spec(to_gnf(load_spec(args.file))))
    return OK


def cmd_aignf(args) -> int:
    emit(args, format_spec(to_aignf(load_spec(args.file))))
    return OK


def cmd_separate(args) -> int:
    out, sep = separate(to_aignf(load_spec(args.file)))
    emit(args, f"// P_sep = {{{', '.join(sorted(sep))}}}\n" + format_spec(out))
    return OK


def cmd_hnf(args) -> int:
    spec = load_spec(args.file)
    expr = parse_expr(args.expr, spec.vars, spec.mode) if args.expr else Ident(spec.init)
    d = hnf_derivation(spec, expr)
    h = reduce_hnf(spec, d.result) if args.reduce else d.result
    lines = [d.format()] if args.trace else []
    lines.append(str(h))
    emit(args, "\n".join(lines) + "\n")
    return OK


def cmd_convert(args) -> int:
    if args.construction == "onestate":
        out = format_spec(onestate_pda_to_spec(load_pda(args.file)))
    elif args.construction == "to-pda":
        out = format_pda(spec_to_pda(load_spec(args.file)))
    elif args.construction == "to-signal-spec":
        out = format_spec(pda_to_signal_spec(load_pda(args.file)))
    else:
        out = format_pda(signal_spec_to_pda(load_spec(args.file)))
    emit(args, out)
    return OK


def _compare(args):
    left, right = load(args.left), load(args.right)
    return bounded_compare(left, right, args.depth, args.max_states,
                           semantics_for(left, args.semantics), semantics_for(right, args.semantics))


def cmd_bisim_k(args) -> int:
    v, l1, l2 = _compare(args)
    if v.equivalent:
        print(f"equivalent up to depth {v.k}")
        return OK
    print(f"distinguished within depth {v.k}")
    print(format_witness(v.witness, l1, l2))
    print(f"witness replay: {'ok' if replay(v.witness, l1, l2) else 'FAILED'}")
    if args.witness_out:
        Path(args.witness_out).write_text(json.dumps(witness_to_dict(v.witness), indent=1) + "\n")
    return DISTINGUISHED


def cmd_bisim_replay(args) -> int:
    try:
        w = witness_from_dict(json.loads(Path(args.witness).read_text()))
    except (OSError, json.JSONDecodeError, ValueError) as e:
        raise CliError(f"cannot read witness {args.witness}: {e}") from e
    _, l1, l2 = _compare(args)
    if replay(w, l1, l2):
        print("witness replays: the roots are distinguished")
        return DISTINGUISHED
    print("witness does not replay on these graphs")
    return USAGE


def cmd_bisim_stateless(args) -> int:
    if args.spec:
        spec = load_spec(args.spec)
    else:
        vars = tuple(v for v in args.vars.split(",") if v)
        spec = Spec({"S": parse_expr("1")}, "S", mode=args.mode, vars=vars if args.mode == "seqc" else ())
    p = parse_expr(args.left_expr, spec.vars, spec.mode)
    q = parse_expr(args.right_expr, spec.vars, spec.mode)
    v = stateless_bisimilar(spec, p, q)
    if v.bisimilar:
        print("stateless bisimilar")
        return OK
    where = f" under {v.valuation}" if v.valuation is not None else ""
    print(f"not stateless bisimilar: {v.reason}{where}")
    return DISTINGUISHED


def cmd_bisim_minimize(args) -> int:
    src = load(args.file)
    lts = explore(src, bounds(args), semantics=semantics_for(src, args.semantics))
    if lts.frontier:
        raise CliError(f"graph is infinite or larger than the bounds (depth {args.depth}); cannot minimize")
    q, _ = partition_refine(lts)
    emit(args, print_lts(q, args.format))
    return OK


def cmd_axioms_list(args) -> int:
    for a in axioms_for(args.mode):
        rule = axiom_instances(a, args.mode)
        side = f"   if {rule.side_text}" if rule.side_text else ""
        print(f"{a:4} {rule.pattern}{side}")
    return OK


def cmd_axioms_soundness(args) -> int:
    ids = args.axiom or axioms_for(args.mode)
    bad = False
    for a in ids:
        if a not in AXIOM_IDS:
            raise CliError(f"unknown axiom {a}")
        try:
            r = check_axiom(a, args.mode, n=args.n, seed=args.seed, allow_unsound=args.allow_unsound)
        except KeyError as e:
            raise CliError(str(e.args[0])) from e
        passed = r.checked - len(r.failures)
        print(f"{a:4} {args.mode:4} {passed}/{r.checked} pass, {r.rejected} rejected by side condition "
              f"({r.unconditioned_failures} of those differ)")
        bad |= not r.sound
    return DISTINGUISHED if bad else OK


def cmd_repro(args) -> int:
    targets = list(repro.TARGETS) if args.id == "all" else [args.id]
    for t in targets:
        if t not in repro.TARGETS:
            raise CliError(f"unknown repro id {t!r}; choose from {', '.join(repro.TARGETS)} or all")
    status = OK
    for t in targets:
        out = repro.render(t)
        if args.regen:
            repro.golden_path(t).write_text(out)
            print(f"wrote {repro.golden_path(t)}")
            continue
        sys.stdout.write(out)
        if args.check:
            gold = repro.golden(t)
            if gold != out:
                status = DISTINGUISHED
                sys.stderr.writelines(difflib.unified_diff(gold.splitlines(True), out.splitlines(True),
                                                           f"golden/{repro.golden_name(t)}", "output"))
    return status


# --------------------------------------------------------------------------
# Argument parsing


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="pdaproc", description="Pushdown automata and sequential process specifications.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--depth", type=int, default=12, help="exploration radius / bisimulation depth (default 12)")
    common.add_argument("--max-states", type=int, default=50000, help="state budget per graph (default 50000)")
    common.add_argument("--format", choices=("aut", "dot", "text"), default="aut")
    common.add_argument("--out", help="write the result to PATH instead of standard output")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized suites")
    common.add_argument("--semantics", choices=("auto", "plain", "derived"), default="auto",
                        help="graph semantics for specifications (auto: derived iff conditions occur)")
    sub = top.add_subparsers(dest="command", required=True)

    def cmd(name, func, parent=sub, **kw):
        p = parent.add_parser(name, parents=[common], **kw)
        p.set_defaults(func=func)
        return p

    cmd("check-guarded", cmd_check_guarded, help="reject unguarded recursion").add_argument("file")
    cmd("lts", cmd_lts, help="explore a process graph").add_argument("file")
    cmd("gnf", cmd_gnf, help="Greibach normal form").add_argument("file")
    cmd("aignf", cmd_aignf, help="acceptance irredundant GNF").add_argument("file")
    cmd("separate", cmd_separate, help="separate non-acceptance from acceptance").add_argument("file")
    p = cmd("hnf", cmd_hnf, help="head normal form of a term")
    p.add_argument("file")
    p.add_argument("--expr", help="term to normalize (default: the initial identifier)")
    p.add_argument("--reduce", action="store_true", help="print the reduced head normal form")
    p.add_argument("--trace", action="store_true", help="print the derivation steps")
    p = cmd("convert", cmd_convert, help="the four constructions")
    p.add_argument("construction", choices=("onestate", "to-pda", "to-signal-spec", "signal-to-pda"))
    p.add_argument("file")

    bis = sub.add_parser("bisim", help="bisimulation checks").add_subparsers(dest="mode_", required=True)
    p = cmd("k", cmd_bisim_k, bis, help="bounded bisimilarity of two specs or PDAs")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--witness-out", help="save a distinguishing witness as JSON")
    p = cmd("replay", cmd_bisim_replay, bis, help="replay a saved witness")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("witness")
    p = cmd("stateless", cmd_bisim_stateless, bis, help="stateless bisimilarity of two terms")
    p.add_argument("left_expr")
    p.add_argument("right_expr")
    p.add_argument("--spec", help="specification providing identifiers and variables")
    p.add_argument("--vars", default="", help="comma separated variables when no --spec is given")
    p.add_argument("--mode", choices=("seq", "seqc"), default="seqc")
    cmd("minimize", cmd_bisim_minimize, bis, help="minimize a finite graph").add_argument("file")

    ax = sub.add_parser("axioms", help="the equational theory").add_subparsers(dest="mode_", required=True)
    p = cmd("list", cmd_axioms_list, ax)
    p.add_argument("--mode", choices=("seq", "seqc"), default="seqc")
    p = cmd("soundness", cmd_axioms_soundness, ax, help="check axioms on random instances")
    p.add_argument("--mode", choices=("seq", "seqc"), default="seqc")
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--axiom", action="append", help="axiom to check (repeatable; default all)")
    p.add_argument("--allow-unsound", action="store_true", help="also accept A4 in seqc mode")

    p = cmd("repro", cmd_repro, help="reproduce a worked example")
    p.add_argument("id", help=f"one of {', '.join(repro.TARGETS)}, or all")
    p.add_argument("--check", action="store_true", help="compare with the golden file (exit 1 on mismatch)")
    p.add_argument("--regen", action="store_true", help="rewrite the golden file")
    return top


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UnguardedError as e:
        print(f"unguarded: cycle [{' '.join(e.cycle)}]", file=sys.stderr)
        return DISTINGUISHED
    except (CliError, ParseError, ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
