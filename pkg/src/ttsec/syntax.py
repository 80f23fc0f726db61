"""Abstract syntax of the calculus and its erased extension.

Terms and types share one syntax.  Every node is an immutable dataclass; the
names of its sub-term fields are listed in ``KIDS`` so generic traversals
(substitution, alpha-equivalence, erasure) do not need a case per node.
Binders (``Lam``, ``Forall``) scope their ``name`` over ``body`` only.
"""

from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass
from typing import Callable, Hashable, Optional


class Term:
    KIDS: tuple = ()
    __slots__ = ()

    def kids(self) -> tuple:
        return tuple(getattr(self, k) for k in self.KIDS)

    def with_kids(self, kids) -> "Term":
        if not self.KIDS:
            return self
        return dataclasses.replace(self, **dict(zip(self.KIDS, kids)))

    def map(self, f: Callable[["Term"], "Term"]) -> "Term":
        if not self.KIDS:
            return self
        return self.with_kids([f(k) for k in self.kids()])

    def __str__(self) -> str:
        from .parser import pretty

        return pretty(self)

    def at(self, pos) -> "Term":
        """Copy of this node carrying source position ``pos``."""
        return dataclasses.replace(self, pos=pos)


def _node(*kids):
    def wrap(cls):
        # Source position (line, col); ignored by equality and hashing.
        cls.__annotations__["pos"] = "Optional[tuple]"
        cls.pos = dataclasses.field(default=None, compare=False, repr=False,
                                    kw_only=True)
        cls = dataclass(frozen=True)(cls)
        cls.KIDS = kids
        return cls

    return wrap


# -- constants -------------------------------------------------------------

@_node()
class IntLit(Term):
    value: int


@_node()
class BoolLit(Term):
    value: bool


@_node()
class UnitLit(Term):
    pass


@_node()
class StrLit(Term):
    value: str


CONSTANTS = ("add", "concat", "join")


@_node()
class Const(Term):
    """A primitive constant: ``add``, ``concat`` or ``join``."""

    name: str

    def __post_init__(self):
        if self.name not in CONSTANTS:
            raise ValueError(f"unknown constant {self.name!r}")


# -- core calculus ---------------------------------------------------------

@_node()
class Var(Term):
    name: str


@_node("ann", "body")
class Lam(Term):
    name: str
    ann: Term
    body: Term


@_node("ann", "body")
class Forall(Term):
    name: str
    ann: Term
    body: Term


@_node("fn", "arg")
class App(Term):
    fn: Term
    arg: Term


@_node("cond", "then", "orelse")
class If(Term):
    cond: Term
    then: Term
    orelse: Term


# -- type constructors -----------------------------------------------------

@_node()
class TypeU(Term):
    pass


@_node()
class IntT(Term):
    pass


@_node()
class BoolT(Term):
    pass


@_node()
class UnitT(Term):
    pass


@_node()
class StrT(Term):
    pass


@_node()
class LabelT(Term):
    pass


@_node("label", "ty")
class DIO(Term):
    label: Term
    ty: Term


@_node("label", "ty")
class LabeledT(Term):
    label: Term
    ty: Term


@_node("label", "ty")
class RefT(Term):
    label: Term
    ty: Term


@_node()
class LabelLit(Term):
    label: Hashable


# -- security primitives ---------------------------------------------------

@_node("t")
class Pure(Term):
    t: Term


@_node("t")
class DIOVal(Term):
    t: Term


@_node("t")
class LabeledVal(Term):
    t: Term


@_node("label")
class RefVal(Term):
    """A reference into the segment of ``label``; ``index`` None is the erased index."""

    label: Term
    index: Optional[int]


@_node("m", "k")
class Bind(Term):
    m: Term
    k: Term


@_node("t")
class LabelOp(Term):
    t: Term


@_node("t")
class Unlabel(Term):
    t: Term


@_node("t")
class Plug(Term):
    t: Term


@_node("label", "t")
class NewRef(Term):
    label: Term
    t: Term


@_node("t")
class ReadRef(Term):
    t: Term


@_node("ref", "val")
class WriteRef(Term):
    ref: Term
    val: Term


# -- erased extension ------------------------------------------------------

@_node()
class Hole(Term):
    pass


@_node("t")
class PlugHole(Term):
    t: Term


@_node()
class Flex(Term):
    """Placeholder for a label the checker has not fixed yet.  Never escapes
    the type checker."""


HOLE = Hole()
TYPE = TypeU()
INT = IntT()
BOOL = BoolT()
UNIT = UnitT()
STR = StrT()
LABEL = LabelT()
UNIT_VAL = UnitLit()
TRUE = BoolLit(True)
FALSE = BoolLit(False)
FLEX = Flex()

BINDERS = (Lam, Forall)


def arrow(dom: Term, cod: Term) -> Forall:
    """Non-dependent function space ``dom -> cod``."""
    return Forall("_", dom, cod)


def apps(f: Term, *args: Term) -> Term:
    for a in args:
        f = App(f, a)
    return f


def spine(t: Term) -> tuple:
    """Split ``f a1 ... an`` into ``(f, [a1, ..., an])``."""
    args = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fn
    return t, args[::-1]


# -- variables -------------------------------------------------------------

def free_vars(t: Term) -> frozenset:
    out: set = set()
    _fv(t, frozenset(), out)
    return frozenset(out)


def _fv(t: Term, bound: frozenset, out: set) -> None:
    match t:
        case Var(n):
            if n not in bound:
                out.add(n)
        case Lam(n, ann, body) | Forall(n, ann, body):
            _fv(ann, bound, out)
            _fv(body, bound | {n}, out)
        case _:
            for k in t.kids():
                _fv(k, bound, out)


def occurs_free(x: str, t: Term) -> bool:
    return x in free_vars(t)


def binder_names(t: Term) -> set:
    out = set()

    def walk(u):
        if isinstance(u, BINDERS):
            out.add(u.name)
        for k in u.kids():
            walk(k)

    walk(t)
    return out


_TRAILING_DIGITS = re.compile(r"\d+$")


def fresh(base: str, avoid) -> str:
    """A variant of ``base`` not in ``avoid``: ``y`` -> ``y1``, ``y2``, ..."""
    if base not in avoid:
        return base
    stem = _TRAILING_DIGITS.sub("", base) or "x"
    k = 1
    while f"{stem}{k}" in avoid:
        k += 1
    return f"{stem}{k}"


def subst(t: Term, v: Term, x: str) -> Term:
    """Capture-avoiding ``t[v/x]``."""
    return _subst(t, v, x, free_vars(v))


def _subst(t: Term, v: Term, x: str, fv: frozenset) -> Term:
    match t:
        case Var(n):
            return v if n == x else t
        case Lam(n, ann, body) | Forall(n, ann, body):
            ann2 = _subst(ann, v, x, fv)
            if n == x:
                return dataclasses.replace(t, ann=ann2)
            if n in fv:
                body_fv = free_vars(body)
                if x not in body_fv:
                    return dataclasses.replace(t, ann=ann2)
                new = fresh(n, fv | body_fv | {x})
                body = _subst(body, Var(new), n, frozenset({new}))
                n = new
            return dataclasses.replace(t, name=n, ann=ann2,
                                       body=_subst(body, v, x, fv))
        case _ if not t.KIDS:
            return t
        case _:
            return t.map(lambda k: _subst(k, v, x, fv))


def rename(t: Term, old: str, new: str) -> Term:
    return subst(t, Var(new), old)


def alpha_eq(a: Term, b: Term) -> bool:
    """Equality up to consistent renaming of bound variables."""
    return _alpha(a, b, {}, {}, 0)


def _alpha(a: Term, b: Term, ea: dict, eb: dict, depth: int) -> bool:
    if a is b and not ea and not eb:
        return True
    if type(a) is not type(b):
        return False
    match a:
        case Var(n):
            la, lb = ea.get(n), eb.get(b.name)
            if la is None and lb is None:
                return n == b.name
            return la == lb
        case Lam(n, ann, body) | Forall(n, ann, body):
            if not _alpha(ann, b.ann, ea, eb, depth):
                return False
            ea2 = {**ea, n: depth}
            eb2 = {**eb, b.name: depth}
            return _alpha(body, b.body, ea2, eb2, depth + 1)
        case _ if not a.KIDS:
            return a == b
        case RefVal(lab, idx):
            return idx == b.index and _alpha(lab, b.label, ea, eb, depth)
        case _:
            return all(_alpha(x, y, ea, eb, depth)
                       for x, y in zip(a.kids(), b.kids()))


def size(t: Term) -> int:
    return 1 + sum(size(k) for k in t.kids())


def contains(t: Term, pred: Callable[[Term], bool]) -> bool:
    if pred(t):
        return True
    return any(contains(k, pred) for k in t.kids())


def uniquify_binders(t: Term, taken: Optional[set] = None) -> Term:
    """Rename binders so that every binder in ``t`` has a distinct name that
    also differs from the free variables of ``t``."""
    used = set(free_vars(t)) if taken is None else set(taken)
    return _uniq(t, used)


def _uniq(t: Term, used: set) -> Term:
    match t:
        case Lam(n, ann, body) | Forall(n, ann, body):
            ann2 = _uniq(ann, used)
            new = fresh(n, used)
            used.add(new)
            if new != n:
                body = rename(body, n, new)
            return dataclasses.replace(t, name=new, ann=ann2,
                                       body=_uniq(body, used))
        case _ if not t.KIDS:
            return t
        case _:
            return t.map(lambda k: _uniq(k, used))


# -- elaborated terms ------------------------------------------------------

@dataclass(frozen=True)
class TypedTerm:
    """A term node annotated with its normal-form type.

    ``kids`` are the typed children, aligned with ``term.kids()``.
    """

    term: Term
    ty: Term
    kids: tuple = ()

    def kid(self, field: str) -> "TypedTerm":
        return self.kids[self.term.KIDS.index(field)]

    def nodes(self):
        yield self
        for k in self.kids:
            yield from k.nodes()

    def __str__(self) -> str:
        return f"{self.term} : {self.ty}"


def subst_typed(tt: TypedTerm, v: TypedTerm, x: str) -> TypedTerm:
    """``tt[v/x]`` on a typing derivation.

    Occurrences of ``x`` take ``v``'s derivation; every other node keeps its
    own, with ``v`` substituted into its type.  Unlike re-elaborating the
    result, this keeps the label choices made in ``tt`` and ``v``.
    """
    return _subst_typed(tt, v, x, free_vars(v.term))


def _subst_typed(tt: TypedTerm, v: TypedTerm, x: str, fv: frozenset) -> TypedTerm:
    t = tt.term
    ty = _subst(tt.ty, v.term, x, fv) if x in free_vars(tt.ty) else tt.ty
    if isinstance(t, Var):
        if t.name == x:
            return TypedTerm(v.term, ty, v.kids)
        return tt if ty is tt.ty else TypedTerm(t, ty, ())
    if not tt.kids:
        return tt if ty is tt.ty else TypedTerm(t, ty, ())
    if isinstance(t, (Lam, Forall)):
        tann, tbody = tt.kids
        tann = _subst_typed(tann, v, x, fv)
        n = t.name
        if n != x:
            if n in fv:
                new = fresh(n, fv | free_vars(tbody.term) | {x})
                tbody = _subst_typed(tbody, TypedTerm(Var(new), tann.term), n,
                                     frozenset({new}))
                n = new
            tbody = _subst_typed(tbody, v, x, fv)
        term = dataclasses.replace(t, name=n, ann=tann.term, body=tbody.term)
        return TypedTerm(term, ty, (tann, tbody))
    kids = tuple(_subst_typed(k, v, x, fv) for k in tt.kids)
    return TypedTerm(t.with_kids([k.term for k in kids]), ty, kids)
