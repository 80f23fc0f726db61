"""Command-line front end: ``ttsec {parse,typecheck,run,erase,check}``.

Exit status is 0 on success, 1 when a program is rejected or a check
fails, and 2 for usage errors.  Diagnostics go to standard error.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional

from . import harness
from . import typechecker as tc
from .erasure import OpenLabelError, erase_config, erase_typed
from .evaluator import ERASED, Configuration, EvalError, Fuel, Machine, Store
from .lattice import ALGEBRAS, LatticeError, get_algebra, parse_label
from .parser import ParseError, Program, parse_program, parse_store, pretty
from .syntax import DIO, HOLE

DEFAULT_LATTICE = "two_point"


class UsageError(Exception):
    pass


class NotRunnable(Exception):
    """The program is well typed but not a computation."""


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--lattice", choices=sorted(ALGEBRAS),
                        help=f"label lattice (default {DEFAULT_LATTICE}; "
                             "a #lattice directive must agree)")
    common.add_argument("--ambient", metavar="LABEL",
                        help="label of the top-level computation")
    common.add_argument("--attacker", metavar="LABEL", help="attacker level")
    common.add_argument("--fuel", type=int, default=10 ** 6, metavar="N",
                        help="evaluation step budget")
    common.add_argument("--seed", type=int, default=0, metavar="N")
    common.add_argument("--count", type=int, default=100, metavar="N")
    common.add_argument("--trace", action="store_true",
                        help="print one line per reduction step")
    common.add_argument("--ascii", action="store_true",
                        help="print _hole_ and plug_hole instead of • and plug•")

    p = argparse.ArgumentParser(prog="ttsec",
                                description="Workbench for a dependently typed "
                                            "information-flow calculus.")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("parse", parents=[common], help="parse and pretty-print")
    sp.add_argument("file")
    sp.add_argument("--ast", action="store_true", help="print the syntax tree")

    sp = sub.add_parser("typecheck", parents=[common], help="print the inferred type")
    sp.add_argument("file")

    sp = sub.add_parser("run", parents=[common], help="evaluate to a final configuration")
    sp.add_argument("file")
    sp.add_argument("--store", metavar="SEGMENTS",
                    help="initial store, e.g. 'H=[9]; L=[1]' (overrides #store)")

    sp = sub.add_parser("erase", parents=[common], help="erase above --attacker")
    sp.add_argument("file")
    sp.add_argument("--store", metavar="SEGMENTS")

    sp = sub.add_parser("check", parents=[common], help="run metatheory checks")
    sp.add_argument("--property", choices=sorted(harness.PROPERTIES) + ["all"],
                    default="all")
    sp.add_argument("--depth", type=int, default=4)
    sp.add_argument("--format", choices=("line", "table"), default="line")
    return p


# -- helpers ------------------------------------------------------------------

def _label(text: Optional[str], alg, flag: str):
    if text is None:
        return None
    try:
        return parse_label(text, alg)
    except LatticeError as e:
        raise UsageError(f"{flag}: {e}") from None


def _load(args) -> Program:
    try:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise UsageError(f"cannot read {args.file}: {e.strerror}") from None
    prog = parse_program(text, default_lattice=args.lattice or DEFAULT_LATTICE,
                         path=args.file)
    if args.lattice and prog.algebra.name != args.lattice:
        raise UsageError(f"{args.file} declares lattice {prog.algebra.name}, "
                         f"not {args.lattice}")
    store_text = getattr(args, "store", None)
    if store_text:
        prog.store.update(parse_store(store_text, prog.algebra))
    return prog


def _context(prog: Program, ambient, store: Optional[Store] = None) -> tc.Context:
    typing = store.typing() if store is not None else {}
    return tc.Context(prog.algebra, ambient=ambient, store_typing=typing)


def _configuration(prog: Program, ambient) -> Configuration:
    store = Store.from_values(prog.algebra, prog.store)
    typed = tc.elaborate(_context(prog, ambient, store), prog.term)
    return Configuration.typed_of(store, typed)


def _render(c: Configuration, ascii: bool) -> str:
    lines = []
    if c.store.segments:
        segs = "; ".join(
            f"{lab} = " + (pretty(HOLE, ascii) if cells is ERASED else
                           "[" + ", ".join(pretty(x.term, ascii) for x in cells) + "]")
            for lab, cells in c.store.segments)
        lines.append(f"#store {segs}")
    lines.append(pretty(c.term, ascii))
    return "\n".join(lines)


# -- commands -------------------------------------------------------------------

def cmd_parse(args, out) -> int:
    prog = _load(args)
    print(repr(prog.term) if args.ast else pretty(prog.term, args.ascii), file=out)
    return 0


def cmd_typecheck(args, out) -> int:
    prog = _load(args)
    ambient = _label(args.ambient, prog.algebra, "--ambient")
    store = Store.from_values(prog.algebra, prog.store)
    ty = tc.infer(_context(prog, ambient, store), prog.term)
    print(pretty(ty, args.ascii), file=out)
    return 0


def cmd_run(args, out) -> int:
    prog = _load(args)
    ambient = _label(args.ambient, prog.algebra, "--ambient")
    c = _configuration(prog, ambient)
    if not isinstance(c.ty, DIO):
        raise NotRunnable(f"type {pretty(c.ty)} is not a computation")
    log: Optional[list] = [] if args.trace else None
    final = Machine(prog.algebra, Fuel(args.fuel), trace=log).run(c)
    for entry in log or ():
        print(entry.line(), file=out)
    print(_render(final, args.ascii), file=out)
    return 0


def cmd_erase(args, out) -> int:
    prog = _load(args)
    if args.attacker is None:
        raise UsageError("erase needs --attacker")
    alg = prog.algebra
    attacker = _label(args.attacker, alg, "--attacker")
    ambient = _label(args.ambient, alg, "--ambient")
    c = _configuration(prog, ambient)
    if isinstance(c.ty, DIO):
        print(_render(erase_config(alg, attacker, c), args.ascii), file=out)
    else:
        print(pretty(erase_typed(alg, attacker, c.typed).term, args.ascii), file=out)
    return 0


def cmd_check(args, out) -> int:
    alg = get_algebra(args.lattice or DEFAULT_LATTICE)
    attacker = _label(args.attacker, alg, "--attacker")
    names = sorted(harness.PROPERTIES) if args.property == "all" else [args.property]
    failed = False
    for name in names:
        kw = dict(seed=args.seed, depth=args.depth, fuel=args.fuel)
        if attacker is not None and name in ("simulation", "pini", "erase_subst"):
            kw["attackers"] = [attacker]
        rep = harness.PROPERTIES[name](alg.name, args.count, **kw)
        print(rep.line() if args.format == "line" else rep.table(), file=out)
        failed |= not rep.ok
    return 1 if failed else 0


COMMANDS = {
    "parse": cmd_parse,
    "typecheck": cmd_typecheck,
    "run": cmd_run,
    "erase": cmd_erase,
    "check": cmd_check,
}


def main(argv: Optional[list] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    path = getattr(args, "file", "<input>")
    try:
        return COMMANDS[args.command](args, out)
    except UsageError as e:
        print(f"ttsec: {e}", file=err)
        return 2
    except ParseError as e:
        print(f"{path}:{e.line}:{e.col}: syntax error: {e.msg}", file=err)
    except tc.TypingError as e:
        print(e.diagnostic(path), file=err)
    except (EvalError, OpenLabelError, LatticeError, harness.GenerationError,
            NotRunnable) as e:
        print(f"{path}: {type(e).__name__}: {e}", file=err)
    return 1


if __name__ == "__main__":
    sys.exit(main())
