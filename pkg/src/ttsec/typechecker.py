"""Bidirectional type checker and elaborator.

``synth`` guesses a type for a term.  Monadic forms whose label is not fixed
by the term itself (``pure``, ``label``, ``plug``, ...) synthesize the
placeholder ``FLEX`` in that position.  ``check`` is authoritative: it takes
an expected type in normal form, validates every premise of the matching
rule including flow side conditions, and returns a ``TypedTerm``.

``infer`` = synthesize, replace leftover placeholders with the ambient label,
then check against the result.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Hashable, Mapping, Optional

from .lattice import LabelAlgebra
from .syntax import (
    BOOL, FLEX, HOLE, INT, LABEL, STR, TRUE, FALSE, TYPE, UNIT, App, Bind,
    BoolLit, BoolT, Const, DIO, DIOVal, Flex, Forall, Hole, If, IntLit, IntT,
    LabelLit, LabelOp, LabelT, LabeledT, LabeledVal, Lam, NewRef, Plug,
    PlugHole, Pure, ReadRef, RefT, RefVal, StrLit, StrT, Term, TypedTerm,
    TypeU, UnitLit, UnitT, Unlabel, Var, WriteRef, alpha_eq, arrow, free_vars,
    fresh, rename, subst,
)

DEFAULT_NORM_FUEL = 10 ** 5

KINDS = ("mismatch", "unbound variable", "flow violation", "not-a-function",
         "fuel exhausted", "unresolved label")


class TypingError(Exception):
    """A rejected term.  ``kind`` is one of ``KINDS``."""

    def __init__(self, kind: str, message: str, term: Optional[Term] = None,
                 expected: Optional[Term] = None, actual: Optional[Term] = None):
        assert kind in KINDS, kind
        super().__init__(message)
        self.kind = kind
        self.message = message
        self.term = term
        self.expected = expected
        self.actual = actual
        self.pos = term.pos if term is not None else None

    def diagnostic(self, path: str = "<input>") -> str:
        line, col = self.pos or (0, 0)
        return f"{path}:{line}:{col}: {self.kind}: {self.message}"

    def __str__(self) -> str:
        return f"{self.kind}: {self.message}"


class _CannotSynth(TypingError):
    """Synthesis has no answer (e.g. for ``•``); callers may fall back."""


@dataclass(frozen=True)
class Context:
    """Typing context: bindings, If-assumptions and the active algebra.

    ``store_typing`` maps ``(label, index)`` to the cell type and is used to
    type run-time references.  ``ambient`` is the label substituted for
    labels the term leaves open (defaults to the algebra's bottom).
    """

    alg: LabelAlgebra
    bindings: Mapping[str, Term] = field(default_factory=dict)
    assumptions: tuple = ()
    ambient: Optional[Hashable] = None
    store_typing: Mapping = field(default_factory=dict)
    fuel: int = DEFAULT_NORM_FUEL

    def extend(self, name: str, ty: Term) -> "Context":
        b = dict(self.bindings)
        b[name] = ty
        return dataclasses.replace(self, bindings=b)

    def assume(self, lhs: Term, rhs: Term) -> "Context":
        return dataclasses.replace(self, assumptions=self.assumptions + ((lhs, rhs),))

    def lookup(self, name: str) -> Optional[Term]:
        return self.bindings.get(name)

    def ambient_label(self) -> Term:
        lab = self.ambient if self.ambient is not None else self.alg.bottom()
        return LabelLit(lab)

    def names(self) -> set:
        return set(self.bindings)


def empty_context(alg: LabelAlgebra, **kw) -> Context:
    return Context(alg, **kw)


# -- labels ------------------------------------------------------------------

def join_term(a: Term, b: Term) -> Term:
    return App(App(Const("join"), a), b)


def split_join(t: Term):
    match t:
        case App(App(Const("join"), a), b):
            return a, b
    return None


def label_value(t: Term):
    """The lattice element of a closed label term in normal form, else None."""
    return t.label if isinstance(t, LabelLit) else None


# -- normalization -----------------------------------------------------------

class _Normalizer:
    def __init__(self, ctx: Context):
        self.alg = ctx.alg
        self.fuel = ctx.fuel

    def spend(self, t: Term):
        self.fuel -= 1
        if self.fuel < 0:
            raise TypingError("fuel exhausted",
                              "normalization did not finish within its fuel", t)

    def delta(self, f: Term, a: Term) -> Optional[Term]:
        match f, a:
            case App(Const("add"), IntLit(x)), IntLit(y):
                return IntLit(x + y)
            case App(Const("concat"), StrLit(x)), StrLit(y):
                return StrLit(x + y)
            case App(Const("join"), LabelLit(x)), LabelLit(y):
                return LabelLit(self.alg.join(x, y))
        return None

    def nf(self, t: Term) -> Term:
        match t:
            case App(f, a):
                f2 = self.nf(f)
                if isinstance(f2, Lam):
                    self.spend(t)
                    return self.nf(subst(f2.body, a, f2.name))
                a2 = self.nf(a)
                r = self.delta(f2, a2)
                if r is not None:
                    self.spend(t)
                    return r
                return App(f2, a2)
            case If(c, a, b):
                c2 = self.nf(c)
                if isinstance(c2, BoolLit):
                    self.spend(t)
                    return self.nf(a if c2.value else b)
                return If(c2, self.nf(a), self.nf(b))
            case Pure(s):
                self.spend(t)
                return DIOVal(self.nf(s))
            case LabelOp(s):
                self.spend(t)
                return LabeledVal(self.nf(s))
            case Unlabel(s):
                s2 = self.nf(s)
                if isinstance(s2, LabeledVal):
                    self.spend(t)
                    return DIOVal(s2.t)
                return Unlabel(s2)
            case Bind(m, k):
                m2 = self.nf(m)
                if isinstance(m2, DIOVal):
                    self.spend(t)
                    return self.nf(App(k, m2.t))
                return Bind(m2, self.nf(k))
            case PlugHole():
                self.spend(t)
                return DIOVal(LabeledVal(HOLE))
            case Lam(n, ann, body) | Forall(n, ann, body):
                return type(t)(n, self.nf(ann), self.nf(body))
            case _ if not t.KIDS:
                return t
            case _:
                return t.map(self.nf)


def normalize(ctx: Context, t: Term) -> Term:
    """Full leftmost-outermost normal form, reducing under binders."""
    return _Normalizer(ctx).nf(t)


def _rewrite(t: Term, lhs: Term, rhs: Term) -> Term:
    if alpha_eq(t, lhs):
        return rhs
    if not t.KIDS:
        return t
    if isinstance(t, (Lam, Forall)) and t.name in free_vars(lhs):
        return dataclasses.replace(t, ann=_rewrite(t.ann, lhs, rhs))
    return t.map(lambda k: _rewrite(k, lhs, rhs))


def convertible(ctx: Context, a: Term, b: Term) -> bool:
    na, nb = normalize(ctx, a), normalize(ctx, b)
    if alpha_eq(na, nb):
        return True
    if not ctx.assumptions:
        return False
    for lhs, rhs in ctx.assumptions:
        na, nb = _rewrite(na, lhs, rhs), _rewrite(nb, lhs, rhs)
    return alpha_eq(normalize(ctx, na), normalize(ctx, nb))


def cumul(ctx: Context, a: Term, b: Term) -> bool:
    na, nb = normalize(ctx, a), normalize(ctx, b)
    if isinstance(na, Forall) and isinstance(nb, Forall):
        if not convertible(ctx, na.ann, nb.ann):
            return False
        x = fresh(na.name, ctx.names() | free_vars(na) | free_vars(nb))
        body_a = rename(na.body, na.name, x)
        body_b = rename(nb.body, nb.name, x)
        return cumul(ctx.extend(x, na.ann), body_a, body_b)
    return convertible(ctx, na, nb)


def flow(ctx: Context, l1: Term, l2: Term) -> bool:
    """Conservative decision of ``l1 ⊑ l2`` on possibly open label terms."""
    a, b = normalize(ctx, l1), normalize(ctx, l2)
    return _flow(ctx, a, b)


def _flow(ctx: Context, a: Term, b: Term) -> bool:
    va, vb = label_value(a), label_value(b)
    if va is not None and vb is not None:
        return bool(ctx.alg.dec_leq(va, vb))
    if alpha_eq(a, b):
        return True
    if ctx.alg.bounded and va == ctx.alg.bottom():
        return True
    ja = split_join(a)
    if ja is not None:
        return _flow(ctx, ja[0], b) and _flow(ctx, ja[1], b)
    jb = split_join(b)
    if jb is not None:
        return _flow(ctx, a, jb[0]) or _flow(ctx, a, jb[1])
    return False


# -- helpers over types with placeholders ---------------------------------

def has_flex(t: Term) -> bool:
    if isinstance(t, Flex):
        return True
    return any(has_flex(k) for k in t.kids())


def resolve(t: Term, label: Term) -> Term:
    """Replace every placeholder in ``t`` by ``label``."""
    if isinstance(t, Flex):
        return label
    if not t.KIDS:
        return t
    return t.map(lambda k: resolve(k, label))


def fill_flex(s: Term, e: Term) -> Term:
    """Fill placeholders in ``s`` from the matching positions of ``e``."""
    if isinstance(s, Flex):
        return e
    if not has_flex(s) or type(s) is not type(e):
        return s
    if isinstance(s, (Lam, Forall)):
        return type(s)(s.name, fill_flex(s.ann, e.ann),
                       fill_flex(s.body, rename(e.body, e.name, s.name)))
    return s.with_kids([fill_flex(x, y) for x, y in zip(s.kids(), e.kids())])


_CONST_TYPES = {
    "add": arrow(INT, arrow(INT, INT)),
    "concat": arrow(STR, arrow(STR, STR)),
    "join": arrow(LABEL, arrow(LABEL, LABEL)),
}


# -- the checker ---------------------------------------------------------------

class Checker:
    def __init__(self, ctx: Context):
        self.root = ctx

    # shape helpers -------------------------------------------------------

    def nf(self, ctx: Context, t: Term) -> Term:
        return normalize(ctx, t)

    def expect(self, ctx: Context, ty: Term, cls, t: Term, what: str):
        n = self.nf(ctx, ty)
        if not isinstance(n, cls):
            raise TypingError("mismatch", f"expected {what}, got {n} for {t}", t,
                              actual=n)
        return n

    def combine(self, ctx: Context, a: Term, b: Term) -> Term:
        if isinstance(a, Flex):
            return b
        if isinstance(b, Flex):
            return a
        if flow(ctx, a, b):
            return self.nf(ctx, b)
        if flow(ctx, b, a):
            return self.nf(ctx, a)
        return self.nf(ctx, join_term(a, b))

    def merge(self, ctx: Context, a: Term, b: Term, t: Term) -> Term:
        if isinstance(a, Flex):
            return b
        if isinstance(b, Flex):
            return a
        if type(a) is type(b) and isinstance(a, (DIO, LabeledT, RefT)):
            return type(a)(self.combine(ctx, a.label, b.label),
                           self.merge(ctx, a.ty, b.ty, t))
        if not has_flex(a) and not has_flex(b) and convertible(ctx, a, b):
            return a
        raise TypingError("mismatch", f"branches have types {a} and {b}", t,
                          expected=a, actual=b)

    def bind_var(self, ctx: Context, name: str, ty: Term, body: Term):
        """Extend ``ctx`` with ``name``, renaming it if already bound."""
        if name in ctx.bindings:
            new = fresh(name, ctx.names() | free_vars(body))
            body = rename(body, name, new)
            name = new
        return ctx.extend(name, ty), name, body

    def label_of_literal(self, t: Term):
        self.root.alg.check(t.label)

    # synthesis -----------------------------------------------------------

    def synth(self, ctx: Context, t: Term) -> Term:
        try:
            return self._synth(ctx, t)
        except TypingError as e:
            if e.pos is None:
                e.pos = t.pos
            raise

    def _synth(self, ctx: Context, t: Term) -> Term:
        match t:
            case Var(n):
                ty = ctx.lookup(n)
                if ty is None:
                    raise TypingError("unbound variable", f"unbound variable {n}", t)
                return ty
            case IntLit():
                return INT
            case BoolLit():
                return BOOL
            case UnitLit():
                return UNIT
            case StrLit():
                return STR
            case LabelLit(lab):
                if not ctx.alg.member(lab):
                    raise TypingError("mismatch", f"{lab} is not a label of the "
                                      f"{ctx.alg.name} lattice", t)
                return LABEL
            case Const(n):
                return _CONST_TYPES[n]
            case TypeU() | IntT() | BoolT() | UnitT() | StrT() | LabelT():
                return TYPE
            case DIO() | LabeledT() | RefT() | Forall():
                self.check(ctx, t, TYPE)
                return TYPE
            case Lam(n, ann, body):
                self.check(ctx, ann, TYPE)
                a = self.nf(ctx, ann)
                ctx2, n, body = self.bind_var(ctx, n, a, body)
                return Forall(n, a, self.synth(ctx2, body))
            case App(f, a):
                ft = self.nf(ctx, self.synth(ctx, f))
                if not isinstance(ft, Forall):
                    raise TypingError("not-a-function",
                                      f"{f} has type {ft}, not a function type", t,
                                      actual=ft)
                return self.nf(ctx, subst(ft.body, a, ft.name))
            case If(c, a, b):
                self.check(ctx, c, BOOL)
                cn = self.nf(ctx, c)
                ta = self.synth(ctx.assume(cn, TRUE), a)
                tb = self.synth(ctx.assume(cn, FALSE), b)
                return self.merge(ctx, ta, tb, t)
            case Pure(s) | DIOVal(s):
                return DIO(FLEX, self.synth(ctx, s))
            case LabeledVal(s) | LabelOp(s):
                return LabeledT(FLEX, self.synth(ctx, s))
            case Unlabel(s):
                lt = self.expect(ctx, self.synth(ctx, s), LabeledT, s, "a labeled value")
                return DIO(lt.label, lt.ty)
            case Bind(m, k):
                mt = self.expect(ctx, self.synth(ctx, m), DIO, m, "a computation")
                kt = self.expect(ctx, self.synth(ctx, k), Forall, k, "a continuation")
                cod = self.expect(ctx, kt.body, DIO, k, "a computation result")
                if kt.name in free_vars(cod):
                    raise TypingError("mismatch", "continuation type depends on "
                                      "its argument", k, actual=kt)
                return DIO(self.combine(ctx, mt.label, cod.label), cod.ty)
            case Plug(s) | PlugHole(s):
                st = self.expect(ctx, self.synth(ctx, s), DIO, s, "a computation")
                return DIO(FLEX, LabeledT(st.label, st.ty))
            case NewRef(l, s):
                self.check(ctx, l, LABEL)
                st = self.expect(ctx, self.synth(ctx, s), LabeledT, s, "a labeled value")
                return DIO(FLEX, RefT(self.nf(ctx, l), st.ty))
            case ReadRef(r):
                rt = self.expect(ctx, self.synth(ctx, r), RefT, r, "a reference")
                return DIO(FLEX, LabeledT(rt.label, rt.ty))
            case WriteRef(r, _):
                self.expect(ctx, self.synth(ctx, r), RefT, r, "a reference")
                return DIO(FLEX, UNIT)
            case RefVal(l, n):
                self.check(ctx, l, LABEL)
                ln = self.nf(ctx, l)
                if n is None:
                    return RefT(ln, HOLE)
                cell = ctx.store_typing.get((label_value(ln), n))
                if cell is None:
                    raise TypingError("mismatch", f"no store cell {n} at {ln}", t)
                return RefT(ln, cell)
            case Hole():
                raise _CannotSynth("mismatch", "cannot infer the type of •", t)
        raise TypingError("mismatch", f"cannot type {t}", t)

    # checking ------------------------------------------------------------

    def check(self, ctx: Context, t: Term, ty: Term) -> TypedTerm:
        try:
            return self._check(ctx, t, self.nf(ctx, ty))
        except TypingError as e:
            if e.pos is None:
                e.pos = t.pos
            raise

    def _try_synth(self, ctx: Context, t: Term) -> Optional[Term]:
        try:
            return self.nf(ctx, self.synth(ctx, t))
        except _CannotSynth:
            return None

    def flow_or_fail(self, ctx: Context, l1: Term, l2: Term, t: Term):
        if not flow(ctx, l1, l2):
            raise TypingError("flow violation",
                              f"{self.nf(ctx, l1)} does not flow to "
                              f"{self.nf(ctx, l2)} in {t}", t,
                              expected=l2, actual=l1)

    def _check(self, ctx: Context, t: Term, T: Term) -> TypedTerm:
        match t:
            case Lam(n, ann, body):
                ft = self.expect(ctx, T, Forall, t, "a function type")
                ta = self.check(ctx, ann, TYPE)
                if not convertible(ctx, ann, ft.ann):
                    raise TypingError("mismatch", f"binder {n} annotated {ann}, "
                                      f"expected {ft.ann}", t,
                                      expected=ft.ann, actual=ann)
                ctx2, n2, body2 = self.bind_var(ctx, n, self.nf(ctx, ann), body)
                cod = rename(ft.body, ft.name, n2)
                tb = self.check(ctx2, body2, cod)
                node = t if n2 == n else dataclasses.replace(t, name=n2, body=body2)
                return TypedTerm(node, Forall(n2, ft.ann, cod), (ta, tb))
            case If(c, a, b):
                tc = self.check(ctx, c, BOOL)
                cn = self.nf(ctx, c)
                tt = self.check(ctx.assume(cn, TRUE), a, T)
                tf = self.check(ctx.assume(cn, FALSE), b, T)
                return TypedTerm(t, T, (tc, tt, tf))
            case Pure(s) | DIOVal(s):
                dt = self.expect(ctx, T, DIO, t, "a computation type")
                self.check(ctx, dt.label, LABEL)
                return TypedTerm(t, T, (self.check(ctx, s, dt.ty),))
            case LabeledVal(s) | LabelOp(s):
                lt = self.expect(ctx, T, LabeledT, t, "a labeled type")
                self.check(ctx, lt.label, LABEL)
                return TypedTerm(t, T, (self.check(ctx, s, lt.ty),))
            case Unlabel(s):
                dt = self.expect(ctx, T, DIO, t, "a computation type")
                st = self._try_synth(ctx, s)
                low = dt.label
                if isinstance(st, LabeledT) and not isinstance(st.label, Flex):
                    low = st.label
                ts = self.check(ctx, s, LabeledT(low, dt.ty))
                self.flow_or_fail(ctx, low, dt.label, t)
                return TypedTerm(t, T, (ts,))
            case Bind(m, k):
                dt = self.expect(ctx, T, DIO, t, "a computation type")
                S = self.bind_domain(ctx, m, k)
                tm = self.check(ctx, m, DIO(dt.label, S))
                tk = self.check(ctx, k, arrow(S, T))
                return TypedTerm(t, T, (tm, tk))
            case Plug(s) | PlugHole(s):
                dt = self.expect(ctx, T, DIO, t, "a computation type")
                lt = self.expect(ctx, dt.ty, LabeledT, t, "a labeled result type")
                ts = self.check(ctx, s, DIO(lt.label, lt.ty))
                self.flow_or_fail(ctx, dt.label, lt.label, t)
                return TypedTerm(t, T, (ts,))
            case NewRef(l, s):
                dt = self.expect(ctx, T, DIO, t, "a computation type")
                rt = self.expect(ctx, dt.ty, RefT, t, "a reference result type")
                tl = self.check(ctx, l, LABEL)
                if not convertible(ctx, l, rt.label):
                    raise TypingError("mismatch", f"reference label {l} does not "
                                      f"match {rt.label}", t,
                                      expected=rt.label, actual=l)
                mid = self.mid_label(ctx, s, rt.label)
                ts = self.check(ctx, s, LabeledT(mid, rt.ty))
                self.flow_or_fail(ctx, dt.label, mid, t)
                self.flow_or_fail(ctx, mid, rt.label, t)
                return TypedTerm(t, T, (tl, ts))
            case WriteRef(r, v):
                dt = self.expect(ctx, T, DIO, t, "a computation type")
                if not convertible(ctx, dt.ty, UNIT):
                    raise TypingError("mismatch", f"writeRef returns Unit, not {dt.ty}",
                                      t, expected=dt.ty, actual=UNIT)
                rt = self._try_synth(ctx, r)
                if not isinstance(rt, RefT):
                    vt = self._try_synth(ctx, v)
                    if rt is None and isinstance(vt, LabeledT) and not has_flex(vt.ty):
                        raise TypingError("unresolved label",
                                          f"cannot determine the reference type of {r}", t)
                    raise TypingError("mismatch", f"{r} is not a reference", t,
                                      actual=rt)
                if isinstance(rt.ty, Hole):
                    # an erased reference fixes no cell type; the value does
                    vt = self._try_synth(ctx, v)
                    if isinstance(vt, LabeledT) and not has_flex(vt.ty):
                        rt = RefT(rt.label, vt.ty)
                tr = self.check(ctx, r, rt)
                mid = self.mid_label(ctx, v, rt.label)
                tv = self.check(ctx, v, LabeledT(mid, rt.ty))
                self.flow_or_fail(ctx, dt.label, mid, t)
                self.flow_or_fail(ctx, mid, rt.label, t)
                return TypedTerm(t, T, (tr, tv))
            case ReadRef(r):
                dt = self.expect(ctx, T, DIO, t, "a computation type")
                lt = self.expect(ctx, dt.ty, LabeledT, t, "a labeled result type")
                tr = self.check(ctx, r, RefT(lt.label, lt.ty))
                self.flow_or_fail(ctx, dt.label, lt.label, t)
                return TypedTerm(t, T, (tr,))
            case RefVal(l, n):
                rt = self.expect(ctx, T, RefT, t, "a reference type")
                tl = self.check(ctx, l, LABEL)
                if not convertible(ctx, l, rt.label):
                    raise TypingError("mismatch", f"reference label {l} does not "
                                      f"match {rt.label}", t,
                                      expected=rt.label, actual=l)
                if n is not None:
                    lv = label_value(self.nf(ctx, l))
                    cell = ctx.store_typing.get((lv, n))
                    if cell is None:
                        raise TypingError("mismatch", f"no store cell {n} at {l}", t)
                    if not convertible(ctx, cell, rt.ty):
                        raise TypingError("mismatch", f"cell {n} at {l} holds {cell}, "
                                          f"not {rt.ty}", t, expected=rt.ty, actual=cell)
                return TypedTerm(t, T, (tl,))
            case Hole():
                return TypedTerm(t, T, ())
            case App(Lam(x, ann, _) as f, a) if x not in free_vars(T):
                # a redex: the body is checked against T directly, so labels it
                # leaves open are fixed by the context rather than by synthesis
                try:
                    tann = self.nf(ctx, ann)
                    ta = self.check(ctx, a, tann)
                    tf = self.check(ctx, f, Forall(x, tann, T))
                    return TypedTerm(t, T, (tf, ta))
                except TypingError:
                    return self.check_app(ctx, t, f, a, T)
            case App(f, a):
                return self.check_app(ctx, t, f, a, T)
            case Forall(n, ann, body):
                ta = self.check(ctx, ann, TYPE)
                ctx2, n2, body2 = self.bind_var(ctx, n, self.nf(ctx, ann), body)
                tb = self.check(ctx2, body2, TYPE)
                self.conv_or_fail(ctx, TYPE, T, t)
                node = t if n2 == n else dataclasses.replace(t, name=n2, body=body2)
                return TypedTerm(node, T, (ta, tb))
            case DIO(l, ty) | LabeledT(l, ty) | RefT(l, ty):
                tl = self.check(ctx, l, LABEL)
                tt = self.check(ctx, ty, TYPE)
                self.conv_or_fail(ctx, TYPE, T, t)
                return TypedTerm(t, T, (tl, tt))
        # leaves: variables, literals, constants, base types, labels
        actual = self.synth(ctx, t)
        if has_flex(actual):
            actual = resolve(fill_flex(actual, T), ctx.ambient_label())
        self.conv_or_fail(ctx, actual, T, t)
        return TypedTerm(t, T, ())

    def check_app(self, ctx: Context, t: Term, f: Term, a: Term, T: Term) -> TypedTerm:
        ft = self.nf(ctx, self.synth(ctx, f))
        if not isinstance(ft, Forall):
            raise TypingError("not-a-function",
                              f"{f} has type {ft}, not a function type", t,
                              actual=ft)
        if has_flex(ft):
            cod = self.nf(ctx, subst(ft.body, a, ft.name))
            if has_flex(cod):
                filled = fill_flex(cod, T)
                ft = Forall(ft.name, ft.ann,
                            self.unsubst(ft.body, filled, ft.name))
            ft = resolve(ft, ctx.ambient_label())
        tf = self.check(ctx, f, ft)
        ta = self.check(ctx, a, ft.ann)
        actual = self.nf(ctx, subst(ft.body, a, ft.name))
        self.conv_or_fail(ctx, actual, T, t)
        return TypedTerm(t, T, (tf, ta))

    def conv_or_fail(self, ctx: Context, actual: Term, T: Term, t: Term):
        if not cumul(ctx, actual, T):
            raise TypingError("mismatch",
                              f"{t} has type {self.nf(ctx, actual)}, expected {T}",
                              t, expected=T, actual=actual)

    def unsubst(self, body: Term, filled: Term, name: str) -> Term:
        """Fill placeholders of ``body`` (which mentions ``name``) using
        ``filled``, an instance of ``body`` after substitution."""
        return fill_flex(body, filled)

    def bind_domain(self, ctx: Context, m: Term, k: Term) -> Term:
        if isinstance(k, Lam):
            return self.nf(ctx, k.ann)
        kt = self._try_synth(ctx, k)
        if isinstance(kt, Forall) and not has_flex(kt.ann):
            return kt.ann
        mt = self._try_synth(ctx, m)
        if isinstance(mt, DIO):
            return resolve(mt.ty, ctx.ambient_label())
        raise TypingError("mismatch", "cannot determine the type bound by >>=",
                          Bind(m, k))

    def mid_label(self, ctx: Context, s: Term, high: Term) -> Term:
        st = self._try_synth(ctx, s)
        if isinstance(st, LabeledT) and not isinstance(st.label, Flex):
            return st.label
        return high

    # entry points ----------------------------------------------------------

    def infer_type(self, ctx: Context, t: Term) -> Term:
        ty = self.nf(ctx, self.synth(ctx, t))
        if isinstance(ty, DIO) and ctx.ambient is not None:
            # a top-level computation runs at the ambient label
            ty = DIO(ctx.ambient_label(), ty.ty)
        return self.nf(ctx, resolve(ty, ctx.ambient_label()))

    def elaborate(self, ctx: Context, t: Term) -> TypedTerm:
        return self.check(ctx, t, self.infer_type(ctx, t))


def infer(ctx: Context, t: Term) -> Term:
    """The normal-form type of ``t``, validated by a full check.

    With ``ctx.ambient`` set, a computation is typed at that label.
    """
    return elaborate(ctx, t).ty


def elaborate(ctx: Context, t: Term) -> TypedTerm:
    return Checker(ctx).elaborate(ctx, t)


def check(ctx: Context, t: Term, ty: Term) -> TypedTerm:
    return Checker(ctx).check(ctx, t, ty)


def store_typing(store) -> dict:
    """``(label, index) -> type`` for every typed cell of ``store``."""
    out = {}
    for lab, cells in store.items():
        if isinstance(cells, list):
            for i, c in enumerate(cells):
                if c.ty is not None:
                    out[lab, i] = c.ty
    return out
