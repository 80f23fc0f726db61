"""Concrete syntax: tokenizer, recursive-descent parser and pretty-printer.

Surface grammar (loosest binding first)::

    expr   ::= fun binders => expr | forall binders . expr
             | if expr then expr else expr | bind
    bind   ::= arrow (>>= tail)*              -- left associative
    arrow  ::= app (-> tail)?
    tail   ::= fun ... | forall ... | if ... | arrow
    app    ::= head atom*
    head   ::= pure a | unlabel a | label a | plug a | plug• a | readRef a
             | writeRef a a | newRef@a a | DIO a a | Labeled a a | Ref a a
             | MkDIO a | MkLabeled a | MkRef@a (n | •) | atom
    atom   ::= int | string | true | false | () | • | label-literal | ident
             | Type | Int | Bool | Unit | Str | Label | add | concat | join
             | ( expr )

A source file is a block of ``#lattice`` / ``#store`` directives followed by
one term.  ``--`` starts a line comment.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Optional

from . import lattice
from .lattice import LabelAlgebra, LatticeError
from .syntax import (
    App, Bind, BoolLit, BoolT, Const, DIO, DIOVal, Forall, Hole, If, IntLit,
    IntT, LabelLit, LabelOp, LabelT, LabeledT, LabeledVal, Lam, NewRef, Plug,
    PlugHole, Pure, ReadRef, RefT, RefVal, StrLit, StrT, Term, TypeU, UnitLit,
    UnitT, Unlabel, Var, WriteRef, free_vars, uniquify_binders,
)


class ParseError(Exception):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {msg}")
        self.msg = msg
        self.line = line
        self.col = col


class UnknownLabel(ParseError):
    pass


# -- tokens ----------------------------------------------------------------

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+|--[^\n]*)
  | (?P<label>(?:U|A|PC)\(\s*(?:(?i:bot|top)|\d+)\s*(?:,\s*(?:(?i:bot|top)|\d+)\s*)?\))
  | (?P<str>"(?:[^"\\\n]|\\.)*")
  | (?P<int>-?\d+)
  | (?P<unit>\(\s*\))
  | (?P<op>>>=|=>|->|→|⇒|[()\[\]:,.;=@λ∀•])
  | (?P<ident>plug•|[^\W\d][\w']*)
""", re.VERBOSE)

_OP_ALIASES = {"→": "->", "⇒": "=>", "λ": "fun", "∀": "forall"}
_IDENT_ALIASES = {"_hole_": "•", "plug_hole": "plug•", "String": "Str"}

KEYWORDS = {
    "fun", "forall", "if", "then", "else", "pure", "unlabel", "label", "plug",
    "plug•", "readRef", "writeRef", "newRef", "DIO", "Labeled", "Ref", "MkDIO",
    "MkLabeled", "MkRef", "true", "false", "Type", "Int", "Bool", "Unit",
    "Str", "Label", "add", "concat", "join", "L", "H",
}

_UNARY = {"pure": Pure, "unlabel": Unlabel, "label": LabelOp, "plug": Plug,
          "plug•": PlugHole, "readRef": ReadRef, "MkDIO": DIOVal,
          "MkLabeled": LabeledVal}
_BINARY = {"writeRef": WriteRef, "DIO": DIO, "Labeled": LabeledT, "Ref": RefT}
_ATOMS = {"true": BoolLit(True), "false": BoolLit(False), "Type": TypeU(),
          "Int": IntT(), "Bool": BoolT(), "Unit": UnitT(), "Str": StrT(),
          "Label": LabelT(), "add": Const("add"), "concat": Const("concat"),
          "join": Const("join")}


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str, line0: int = 1) -> list:
    toks = []
    pos, line, line_start = 0, line0, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}",
                             line, pos - line_start + 1)
        kind = m.lastgroup
        s = m.group()
        col = pos - line_start + 1
        if kind == "op":
            s = _OP_ALIASES.get(s, s)
            if s in ("fun", "forall"):
                kind = "ident"
        if kind == "ident":
            s = _IDENT_ALIASES.get(s, s)
            if s == "•":
                kind = "op"
        if kind != "ws":
            toks.append(Token(kind, s, line, col))
        nl = s.count("\n") if kind == "ws" else 0
        if nl:
            line += nl
            line_start = pos + m.group().rfind("\n") + 1
        pos = m.end()
    toks.append(Token("eof", "", line, pos - line_start + 1))
    return toks


# -- parser ----------------------------------------------------------------

class _Parser:
    def __init__(self, toks: list, alg: Optional[LabelAlgebra]):
        self.toks = toks
        self.i = 0
        self.alg = alg

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, msg: str, tok: Optional[Token] = None):
        tok = tok or self.tok
        raise ParseError(msg, tok.line, tok.col)

    def at(self, *texts: str) -> bool:
        t = self.tok
        return t.kind in ("op", "ident") and t.text in texts

    @staticmethod
    def mark(node: Term, tok: Token) -> Term:
        return node if node.pos is not None else node.at((tok.line, tok.col))

    def next(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        return self.next()

    # expr -----------------------------------------------------------------

    def expr(self) -> Term:
        if self.at("fun"):
            return self.lam()
        if self.at("forall"):
            return self.forall()
        if self.at("if"):
            return self.ite()
        return self.bind()

    def tail(self) -> Term:
        if self.at("fun", "forall", "if"):
            return self.expr()
        return self.arrow()

    def bind(self) -> Term:
        start = self.tok
        t = self.arrow()
        while self.at(">>="):
            self.next()
            t = self.mark(Bind(t, self.tail()), start)
        return t

    def arrow(self) -> Term:
        start = self.tok
        t = self.app()
        if self.at("->"):
            self.next()
            return self.mark(Forall("_", t, self.tail()), start)
        return t

    def ite(self) -> Term:
        start = self.tok
        self.expect("if")
        c = self.expr()
        self.expect("then")
        a = self.expr()
        self.expect("else")
        return self.mark(If(c, a, self.expr()), start)

    def binders(self, stop: str) -> list:
        out = []
        if self.tok.kind == "ident" and not self.at(*KEYWORDS):
            # bare form: x, y : T
            names = self.names()
            self.expect(":")
            ann = self.expr()
            return [(n, ann) for n in names]
        while self.at("("):
            self.next()
            names = self.names()
            self.expect(":")
            ann = self.expr()
            self.expect(")")
            out += [(n, ann) for n in names]
        if not out:
            self.error("expected a binder")
        return out

    def names(self) -> list:
        names = [self.ident()]
        while True:
            if self.at(","):
                self.next()
                names.append(self.ident())
            elif self.tok.kind == "ident" and not self.at(*KEYWORDS):
                names.append(self.ident())
            else:
                return names

    def ident(self) -> str:
        t = self.tok
        if t.kind != "ident" or t.text in KEYWORDS:
            self.error(f"expected a variable name, found {t.text!r}")
        self.next()
        return t.text

    def lam(self) -> Term:
        start = self.expect("fun")
        bs = self.binders("=>")
        self.expect("=>")
        body = self.expr()
        for n, ann in reversed(bs):
            body = self.mark(Lam(n, ann, body), start)
        return body

    def forall(self) -> Term:
        start = self.expect("forall")
        bs = self.binders(".")
        self.expect(".")
        body = self.expr()
        for n, ann in reversed(bs):
            body = self.mark(Forall(n, ann, body), start)
        return body

    # application ------------------------------------------------------------

    def app(self) -> Term:
        start = self.tok
        t = self.head()
        while self.starts_atom():
            t = self.mark(App(t, self.atom()), start)
        return t

    def starts_atom(self) -> bool:
        t = self.tok
        if t.kind in ("int", "str", "unit", "label"):
            return True
        if t.kind == "op":
            return t.text in ("(", "•")
        if t.kind == "ident":
            return t.text not in KEYWORDS or t.text in _ATOMS or t.text in ("L", "H")
        return False

    def head(self) -> Term:
        start = self.tok
        return self.mark(self._head(), start)

    def _head(self) -> Term:
        t = self.tok
        if t.kind == "ident":
            if t.text in _UNARY:
                self.next()
                return _UNARY[t.text](self.atom())
            if t.text in _BINARY:
                self.next()
                a = self.atom()
                return _BINARY[t.text](a, self.atom())
            if t.text == "newRef":
                self.next()
                self.expect("@")
                lab = self.atom()
                return NewRef(lab, self.atom())
            if t.text == "MkRef":
                self.next()
                self.expect("@")
                lab = self.atom()
                if self.at("•"):
                    self.next()
                    return RefVal(lab, None)
                n = self.tok
                if n.kind != "int" or int(n.text) < 0:
                    self.error("expected a reference index")
                self.next()
                return RefVal(lab, int(n.text))
        return self.atom()

    def atom(self) -> Term:
        start = self.tok
        return self.mark(self._atom(), start)

    def _atom(self) -> Term:
        t = self.tok
        if t.kind == "int":
            self.next()
            return IntLit(int(t.text))
        if t.kind == "str":
            self.next()
            return StrLit(json.loads(t.text))
        if t.kind == "unit":
            self.next()
            return UnitLit()
        if t.kind == "label" or (t.kind == "ident" and t.text in ("L", "H")):
            self.next()
            return LabelLit(self.label(t))
        if t.kind == "op" and t.text == "•":
            self.next()
            return Hole()
        if t.kind == "op" and t.text == "(":
            self.next()
            e = self.expr()
            self.expect(")")
            return e
        if t.kind == "ident":
            if t.text in _ATOMS:
                self.next()
                return _ATOMS[t.text]
            return Var(self.ident())
        self.error(f"unexpected {t.text or 'end of input'!r}")

    def label(self, t: Token):
        try:
            lab = lattice.parse_label(t.text)
        except LatticeError as e:
            raise ParseError(str(e), t.line, t.col) from None
        if self.alg is not None and not self.alg.member(lab):
            raise UnknownLabel(
                f"label {t.text} is not in the {self.alg.name} lattice",
                t.line, t.col)
        return lab

    def eof(self):
        if self.tok.kind != "eof":
            self.error(f"unexpected {self.tok.text!r} after term")


def parse(text: str, alg: Optional[LabelAlgebra] = None, *, line0: int = 1) -> Term:
    """Parse one term; binder names come back pairwise distinct."""
    p = _Parser(tokenize(text, line0), alg)
    t = p.expr()
    p.eof()
    return uniquify_binders(t)


# -- source files ----------------------------------------------------------

@dataclass
class Program:
    term: Term
    algebra: LabelAlgebra
    store: dict = field(default_factory=dict)  # label -> list[Term]
    path: Optional[str] = None


def parse_store(text: str, alg: LabelAlgebra, line0: int = 1) -> dict:
    """Parse ``H = [5, 7]; L = [1]`` into ``{label: [terms]}``."""
    p = _Parser(tokenize(text, line0), alg)
    out: dict = {}
    while p.tok.kind != "eof":
        t = p.tok
        if not (t.kind == "label" or t.text in ("L", "H")):
            p.error("expected a store label")
        p.next()
        lab = p.label(t)
        p.expect("=")
        p.expect("[")
        cells = []
        if not p.at("]"):
            cells.append(uniquify_binders(p.expr()))
            while p.at(","):
                p.next()
                cells.append(uniquify_binders(p.expr()))
        p.expect("]")
        if lab in out:
            p.error(f"segment {t.text} given twice", t)
        out[lab] = cells
        if p.at(";"):
            p.next()
    return out


def parse_program(text: str, default_lattice: Optional[str] = None,
                  path: Optional[str] = None) -> Program:
    lattice_name = None
    store_lines = []
    body_lines = []
    lines = text.split("\n")
    body_start = len(lines) + 1
    for no, line in enumerate(lines, 1):
        s = line.strip()
        if not body_lines and s.startswith("#lattice"):
            if lattice_name is not None:
                raise ParseError("more than one #lattice directive", no, 1)
            parts = s.split()
            if len(parts) != 2:
                raise ParseError("usage: #lattice two_point|compartment", no, 1)
            lattice_name = parts[1]
        elif not body_lines and s.startswith("#store"):
            store_lines.append((no, line[line.index("#store") + 6:]))
        elif not body_lines and (not s or s.startswith("--")):
            continue
        else:
            if not body_lines:
                body_start = no
            body_lines.append(line)
    name = lattice_name or default_lattice
    if name is None:
        raise ParseError("missing #lattice directive", 1, 1)
    try:
        alg = lattice.get_algebra(name)
    except LatticeError as e:
        raise ParseError(str(e), 1, 1) from None
    store: dict = {}
    for no, s in store_lines:
        for lab, cells in parse_store(s, alg, no).items():
            if lab in store:
                raise ParseError("store segment given twice", no, 1)
            store[lab] = cells
    if not body_lines:
        raise ParseError("no term after directives", len(lines), 1)
    term = parse("\n".join(body_lines), alg, line0=body_start)
    return Program(term, alg, store, path)


# -- pretty-printer --------------------------------------------------------

# Printing contexts, from loosest to tightest.
TOP, BIND_L, BIND_R, ARROW_L, ARROW_R, APP_FN, ATOM = range(7)

_TAIL_OK = (TOP, BIND_R, ARROW_R)


def pretty(t: Term, ascii: bool = False) -> str:
    return _Printer(ascii).pp(t, TOP)


class _Printer:
    def __init__(self, ascii: bool):
        self.hole = "_hole_" if ascii else "•"
        self.plug_hole = "plug_hole" if ascii else "plug•"

    def paren(self, s: str, ok: bool) -> str:
        return s if ok else f"({s})"

    def pp(self, t: Term, ctx: int, last: bool = True) -> str:
        """``last`` is False when more tokens follow, so a trailing binder
        form (fun, forall, if) would swallow them."""
        tail = ctx in _TAIL_OK and last
        match t:
            case Lam():
                groups = []
                while isinstance(t, Lam):
                    groups.append(f"({t.name} : {self.pp(t.ann, TOP)})")
                    t = t.body
                s = f"fun {' '.join(groups)} => {self.pp(t, TOP)}"
                return self.paren(s, tail)
            case Forall(n, ann, body) if n not in free_vars(body):
                ok = ctx in (TOP, BIND_L, BIND_R, ARROW_R)
                s = (f"{self.pp(ann, ARROW_L)} -> "
                     f"{self.pp(body, ARROW_R, last or not ok)}")
                return self.paren(s, ok)
            case Forall():
                groups = []
                while isinstance(t, Forall) and t.name in free_vars(t.body):
                    groups.append(f"({t.name} : {self.pp(t.ann, TOP)})")
                    t = t.body
                s = f"forall {' '.join(groups)} . {self.pp(t, TOP)}"
                return self.paren(s, tail)
            case If(c, a, b):
                s = (f"if {self.pp(c, TOP)} then {self.pp(a, TOP)} "
                     f"else {self.pp(b, TOP)}")
                return self.paren(s, tail)
            case Bind(m, k):
                ok = ctx in (TOP, BIND_L)
                s = (f"{self.pp(m, BIND_L, False)} >>= "
                     f"{self.pp(k, BIND_R, last or not ok)}")
                return self.paren(s, ok)
            case App(f, a):
                s = f"{self.pp(f, APP_FN)} {self.pp(a, ATOM)}"
                return self.paren(s, ctx != ATOM)
            case _:
                s, is_atom = self.node(t)
                return s if is_atom else self.paren(s, ctx != ATOM)

    def node(self, t: Term):
        """Render a non-binder node; returns (text, is_atom)."""
        a = lambda u: self.pp(u, ATOM)
        match t:
            case IntLit(v):
                return str(v), True
            case BoolLit(v):
                return ("true" if v else "false"), True
            case UnitLit():
                return "()", True
            case StrLit(v):
                return json.dumps(v, ensure_ascii=False), True
            case Const(n):
                return n, True
            case Var(n):
                return n, True
            case TypeU():
                return "Type", True
            case IntT():
                return "Int", True
            case BoolT():
                return "Bool", True
            case UnitT():
                return "Unit", True
            case StrT():
                return "Str", True
            case LabelT():
                return "Label", True
            case LabelLit(lab):
                return str(lab), True
            case Hole():
                return self.hole, True
            case DIO(l, ty):
                return f"DIO {a(l)} {a(ty)}", False
            case LabeledT(l, ty):
                return f"Labeled {a(l)} {a(ty)}", False
            case RefT(l, ty):
                return f"Ref {a(l)} {a(ty)}", False
            case Pure(u):
                return f"pure {a(u)}", False
            case DIOVal(u):
                return f"MkDIO {a(u)}", False
            case LabeledVal(u):
                return f"MkLabeled {a(u)}", False
            case RefVal(l, n):
                return f"MkRef@{a(l)} {self.hole if n is None else n}", False
            case LabelOp(u):
                return f"label {a(u)}", False
            case Unlabel(u):
                return f"unlabel {a(u)}", False
            case Plug(u):
                return f"plug {a(u)}", False
            case PlugHole(u):
                return f"{self.plug_hole} {a(u)}", False
            case NewRef(l, u):
                return f"newRef@{a(l)} {a(u)}", False
            case ReadRef(u):
                return f"readRef {a(u)}", False
            case WriteRef(r, v):
                return f"writeRef {a(r)} {a(v)}", False
        raise TypeError(f"cannot print {t!r}")
