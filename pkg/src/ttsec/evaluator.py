"""Small-step and big-step evaluation.

Pure reduction is call-by-value.  Every term with no applicable rule is a
value, except ``•``, which always steps to itself.  Congruence rules treat a
``•`` argument as a value and do not descend into it, so ``•`` only ever
steps at the root.

Monadic steps run over a ``Store`` of labeled segments.  The step functions
work on plain terms.  Typed configurations are re-elaborated after each
step, which gives later steps (and erasure) the types they need.
"""

from __future__ import annotations

import dataclasses
import hashlib
from dataclasses import dataclass, field
from typing import Hashable, Optional

from .lattice import LabelAlgebra
from .syntax import (
    HOLE, UNIT_VAL, App, Bind, BoolLit, Const, DIO, DIOVal, Forall, Hole, If,
    IntLit, LabelLit, LabelOp, LabeledT, LabeledVal, Lam, NewRef, Plug,
    PlugHole, Pure, ReadRef, RefT, RefVal, StrLit, Term, TypedTerm, Unlabel,
    UNIT, WriteRef, alpha_eq, subst, subst_typed,
)
from . import typechecker as tc

DEFAULT_FUEL = 10 ** 6


class EvalError(Exception):
    pass


class StuckTerm(EvalError):
    """Neither a value nor reducible: signals a checker or evaluator bug."""


class FuelExhausted(EvalError):
    pass


class InvalidReference(EvalError):
    pass


class PreservationError(EvalError):
    """A reduct no longer checks against the configuration type."""

    def __init__(self, msg: str, term: Term, cause: Exception):
        super().__init__(msg)
        self.term = term
        self.cause = cause


class Fuel:
    """A shared step budget; nested runs draw from the same counter."""

    def __init__(self, steps: int = DEFAULT_FUEL):
        self.left = steps

    def spend(self):
        if self.left <= 0:
            raise FuelExhausted("evaluation ran out of fuel")
        self.left -= 1


# -- pure reduction ------------------------------------------------------------

_CANONICAL = (IntLit, BoolLit, StrLit, LabelLit, DIOVal, LabeledVal, RefVal,
              Pure, LabelOp)


def _delta(f: Term, a: Term, alg: LabelAlgebra) -> Optional[Term]:
    match f, a:
        case App(Const("add"), IntLit(x)), IntLit(y):
            return IntLit(x + y)
        case App(Const("concat"), StrLit(x)), StrLit(y):
            return StrLit(x + y)
        case App(Const("join"), LabelLit(x)), LabelLit(y):
            return LabelLit(alg.join(x, y))
    return None


def _inner(t: Term, alg: LabelAlgebra) -> Optional[tuple]:
    # A premise position: ``•`` counts as a value here.
    if isinstance(t, Hole):
        return None
    return pure_step_rule(t, alg)


_TY_RULE = {DIO: "DIO", LabeledT: "Labeled", RefT: "Ref"}


def pure_step_rule(t: Term, alg: LabelAlgebra) -> Optional[tuple]:
    """``(rule name, reduct)`` for the unique applicable rule, or None."""
    match t:
        case Hole():
            return "Hole", HOLE
        case App(f, a):
            r = _inner(f, alg)
            if r:
                return "App1", App(r[1], a)
            r = _inner(a, alg)
            if r:
                return "App2", App(f, r[1])
            if isinstance(f, Lam):
                return "Beta", subst(f.body, a, f.name)
            d = _delta(f, a, alg)
            if d is not None:
                return "Delta", d
            if isinstance(f, _CANONICAL):
                raise StuckTerm(f"cannot apply {f}")
            return None
        case If(c, a, b):
            r = _inner(c, alg)
            if r:
                return "If1", If(r[1], a, b)
            if isinstance(c, BoolLit):
                return ("If2", a) if c.value else ("If3", b)
            if isinstance(c, _CANONICAL):
                raise StuckTerm(f"if on non-boolean {c}")
            return None
        case Bind(m, k):
            if isinstance(m, DIOVal):
                return "Bind1", App(k, m.t)
            return None
        case Pure(s):
            r = _inner(s, alg)
            if r:
                return "Pure1", Pure(r[1])
            return "Pure2", DIOVal(s)
        case LabelOp(s):
            r = _inner(s, alg)
            if r:
                return "Label1", LabelOp(r[1])
            return "Label2", LabeledVal(s)
        case Unlabel(s):
            r = _inner(s, alg)
            if r:
                return "Unlabel1", Unlabel(r[1])
            if isinstance(s, LabeledVal):
                return "Unlabel2", Pure(s.t)
            if isinstance(s, _CANONICAL):
                raise StuckTerm(f"unlabel of {s}")
            return None
        case NewRef(l, s):
            r = _inner(l, alg)
            if r:
                return "NewL", NewRef(r[1], s)
            r = _inner(s, alg)
            if r:
                return "New1", NewRef(l, r[1])
            return None
        case WriteRef(ref, v):
            r = _inner(ref, alg)
            if r:
                return "Write1", WriteRef(r[1], v)
            r = _inner(v, alg)
            if r:
                return "Write2", WriteRef(ref, r[1])
            return None
        case ReadRef(s):
            r = _inner(s, alg)
            if r:
                return "Read1", ReadRef(r[1])
            return None
        case DIO(l, ty) | LabeledT(l, ty) | RefT(l, ty):
            name = _TY_RULE[type(t)]
            r = _inner(l, alg)
            if r:
                return f"{name}1", type(t)(r[1], ty)
            r = _inner(ty, alg)
            if r:
                return f"{name}2", type(t)(l, r[1])
            return None
        case Forall(n, ann, body):
            r = _inner(ann, alg)
            if r:
                return "Forall1", Forall(n, r[1], body)
            r = _inner(body, alg)
            if r:
                return "Forall2", Forall(n, ann, r[1])
            return None
        case PlugHole():
            return "PlugHole", Pure(LabeledVal(HOLE))
    return None


def _mk(tt: TypedTerm, kids) -> TypedTerm:
    kids = tuple(kids)
    return TypedTerm(tt.term.with_kids([k.term for k in kids]), tt.ty, kids)


def _retype(tt: TypedTerm, ty: Term) -> TypedTerm:
    return TypedTerm(tt.term, ty, tt.kids)


def _typed_inner(tt: TypedTerm, alg: LabelAlgebra) -> Optional[tuple]:
    if isinstance(tt.term, Hole):
        return None
    return typed_step_rule(tt, alg)


def _labeled_hole(ty: Term) -> TypedTerm:
    """``pure (MkLabeled •)`` at computation type ``ty``."""
    lt = ty.ty if isinstance(ty, DIO) else None
    inner = TypedTerm(HOLE, lt.ty if isinstance(lt, LabeledT) else HOLE)
    lv = TypedTerm(LabeledVal(HOLE), lt if lt is not None else HOLE, (inner,))
    return TypedTerm(Pure(lv.term), ty, (lv,))


def typed_step_rule(tt: TypedTerm, alg: LabelAlgebra) -> Optional[tuple]:
    """``pure_step_rule`` on a derivation: ``(rule, typed reduct)`` or None.

    The reduct's derivation is assembled from the pieces of ``tt`` so that
    labels chosen during elaboration survive the step.
    """
    t = tt.term
    ks = tt.kids

    def cong(i: int, name: str):
        r = _typed_inner(ks[i], alg)
        if r is None:
            return None
        kids = list(ks)
        kids[i] = r[1]
        return name, _mk(tt, kids)

    match t:
        case Hole():
            return "Hole", tt
        case App(f, a):
            r = cong(0, "App1") or cong(1, "App2")
            if r:
                return r
            if isinstance(f, Lam):
                body = ks[0].kids[1]
                return "Beta", _retype(subst_typed(body, ks[1], f.name), tt.ty)
            d = _delta(f, a, alg)
            if d is not None:
                return "Delta", TypedTerm(d, tt.ty)
            if isinstance(f, _CANONICAL):
                raise StuckTerm(f"cannot apply {f}")
            return None
        case If(c, _, _):
            r = cong(0, "If1")
            if r:
                return r
            if isinstance(c, BoolLit):
                return ("If2", _retype(ks[1], tt.ty)) if c.value else \
                    ("If3", _retype(ks[2], tt.ty))
            if isinstance(c, _CANONICAL):
                raise StuckTerm(f"if on non-boolean {c}")
            return None
        case Bind(DIOVal(v), k):
            tv = ks[0].kids[0]
            return "Bind1", TypedTerm(App(k, v), tt.ty, (ks[1], tv))
        case Bind():
            return None
        case Pure(s):
            return cong(0, "Pure1") or ("Pure2", TypedTerm(DIOVal(s), tt.ty, ks))
        case LabelOp(s):
            return cong(0, "Label1") or ("Label2", TypedTerm(LabeledVal(s), tt.ty, ks))
        case Unlabel(s):
            r = cong(0, "Unlabel1")
            if r:
                return r
            if isinstance(s, LabeledVal):
                tv = ks[0].kids[0]
                return "Unlabel2", TypedTerm(Pure(tv.term), tt.ty, (tv,))
            if isinstance(s, _CANONICAL):
                raise StuckTerm(f"unlabel of {s}")
            return None
        case NewRef():
            return cong(0, "NewL") or cong(1, "New1")
        case WriteRef():
            return cong(0, "Write1") or cong(1, "Write2")
        case ReadRef():
            return cong(0, "Read1")
        case DIO() | LabeledT() | RefT():
            name = _TY_RULE[type(t)]
            return cong(0, f"{name}1") or cong(1, f"{name}2")
        case Forall():
            return cong(0, "Forall1") or cong(1, "Forall2")
        case PlugHole():
            return "PlugHole", _labeled_hole(tt.ty)
    return None


def pure_step(t: Term, alg: LabelAlgebra) -> Optional[Term]:
    r = pure_step_rule(t, alg)
    return None if r is None else r[1]


def is_value(t: Term, alg: LabelAlgebra) -> bool:
    return pure_step_rule(t, alg) is None


# -- independent rule enumeration (for determinacy checks) -----------------

def _val(t: Term, alg) -> bool:
    return isinstance(t, Hole) or not pure_successors(t, alg)


def pure_successors(t: Term, alg: LabelAlgebra) -> list:
    """Every ``(rule, reduct)`` derivable for ``t``, each rule tried on its own."""
    out = []

    def cong(name, sub, build):
        if isinstance(sub, Hole):
            return
        for _, s2 in pure_successors(sub, alg):
            out.append((name, build(s2)))

    match t:
        case Hole():
            out.append(("Hole", HOLE))
        case App(f, a):
            cong("App1", f, lambda x: App(x, a))
            if _val(f, alg):
                cong("App2", a, lambda x: App(f, x))
            if isinstance(f, Lam) and _val(a, alg):
                out.append(("Beta", subst(f.body, a, f.name)))
            d = _delta(f, a, alg)
            if d is not None:
                out.append(("Delta", d))
        case If(c, a, b):
            cong("If1", c, lambda x: If(x, a, b))
            if c == BoolLit(True):
                out.append(("If2", a))
            if c == BoolLit(False):
                out.append(("If3", b))
        case Bind(m, k):
            if isinstance(m, DIOVal):
                out.append(("Bind1", App(k, m.t)))
        case Pure(s):
            cong("Pure1", s, Pure)
            if _val(s, alg):
                out.append(("Pure2", DIOVal(s)))
        case LabelOp(s):
            cong("Label1", s, LabelOp)
            if _val(s, alg):
                out.append(("Label2", LabeledVal(s)))
        case Unlabel(s):
            cong("Unlabel1", s, Unlabel)
            if isinstance(s, LabeledVal):
                out.append(("Unlabel2", Pure(s.t)))
        case NewRef(l, s):
            cong("NewL", l, lambda x: NewRef(x, s))
            if _val(l, alg):
                cong("New1", s, lambda x: NewRef(l, x))
        case WriteRef(r, v):
            cong("Write1", r, lambda x: WriteRef(x, v))
            if _val(r, alg):
                cong("Write2", v, lambda x: WriteRef(r, x))
        case ReadRef(s):
            cong("Read1", s, ReadRef)
        case DIO(l, ty) | LabeledT(l, ty) | RefT(l, ty):
            cong("Ty1", l, lambda x: type(t)(x, ty))
            if _val(l, alg):
                cong("Ty2", ty, lambda x: type(t)(l, x))
        case Forall(n, ann, body):
            cong("Forall1", ann, lambda x: Forall(n, x, body))
            if _val(ann, alg):
                cong("Forall2", body, lambda x: Forall(n, ann, x))
        case PlugHole():
            out.append(("PlugHole", Pure(LabeledVal(HOLE))))
    return out


# -- stores ----------------------------------------------------------------------

class _Erased:
    def __repr__(self) -> str:
        return "ERASED"


ERASED = _Erased()


@dataclass(frozen=True)
class Cell:
    term: Term
    ty: Optional[Term] = None
    typed: Optional[TypedTerm] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Store:
    """Compartmentalized store: one segment per label.

    A segment is a tuple of cells or ``ERASED``.  In an erased store
    (``attacker`` set) segments not below the attacker default to ``ERASED``;
    otherwise a missing segment is empty.  Stores are immutable; updates
    return new stores.
    """

    alg: LabelAlgebra
    segments: tuple = ()  # sorted (label, cells) pairs
    attacker: Optional[Hashable] = None

    @staticmethod
    def of(alg: LabelAlgebra, segs: Optional[dict] = None,
           attacker: Optional[Hashable] = None) -> "Store":
        s = Store(alg, (), attacker)
        for lab, cells in (segs or {}).items():
            s = s.with_segment(lab, cells if cells is ERASED else tuple(cells))
        return s

    @staticmethod
    def from_values(alg: LabelAlgebra, segs: dict) -> "Store":
        """A store from closed initializer values, each elaborated in order
        against the cells allocated before it."""
        s = Store(alg)
        for lab, values in segs.items():
            alg.check(lab)
            for v in values:
                ctx = tc.Context(alg, store_typing=s.typing())
                typed = tc.elaborate(ctx, v)
                s, _ = s.allocate(lab, Cell(v, typed.ty, typed))
        return s

    def as_dict(self) -> dict:
        return dict(self.segments)

    def default(self, label):
        if self.attacker is not None and not self.alg.leq(label, self.attacker):
            return ERASED
        return ()

    def segment(self, label):
        self.alg.check(label)
        for lab, cells in self.segments:
            if lab == label:
                return cells
        return self.default(label)

    def with_segment(self, label, cells) -> "Store":
        self.alg.check(label)
        rest = [(lab, c) for lab, c in self.segments if lab != label]
        rest.append((label, cells))
        rest.sort(key=lambda p: str(p[0]))
        return dataclasses.replace(self, segments=tuple(rest))

    def labels(self) -> list:
        return [lab for lab, _ in self.segments]

    def items(self):
        return [(lab, list(c) if c is not ERASED else c) for lab, c in self.segments]

    def allocate(self, label, cell: Cell):
        """Append ``cell``; returns ``(store, index)`` (index None if erased)."""
        seg = self.segment(label)
        if seg is ERASED:
            return self, None
        return self.with_segment(label, seg + (cell,)), len(seg)

    def write(self, label, index: Optional[int], term: Term,
              typed: Optional[TypedTerm] = None) -> "Store":
        seg = self.segment(label)
        if seg is ERASED or index is None:
            return self
        if not 0 <= index < len(seg):
            raise InvalidReference(f"reference {index} out of bounds at {label}")
        cells = list(seg)
        cells[index] = Cell(term, cells[index].ty, typed)
        return self.with_segment(label, tuple(cells))

    def read(self, label, index: Optional[int]) -> Term:
        return self.read_cell(label, index).term

    def read_cell(self, label, index: Optional[int]) -> Cell:
        seg = self.segment(label)
        if seg is ERASED or index is None:
            return Cell(HOLE)
        if not 0 <= index < len(seg):
            raise InvalidReference(f"reference {index} out of bounds at {label}")
        return seg[index]

    def cell_derivation(self, cell: Cell) -> Optional[TypedTerm]:
        """The cell's derivation; values stored by the initial store are
        elaborated on demand."""
        if cell.typed is not None or cell.ty is None:
            return cell.typed
        ctx = tc.Context(self.alg, store_typing=self.typing())
        return tc.check(ctx, cell.term, cell.ty)

    def typing(self) -> dict:
        return tc.store_typing(self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Store):
            return NotImplemented
        labs = {lab for lab, _ in self.segments} | {lab for lab, _ in other.segments}
        for lab in labs:
            a, b = self.segment(lab), other.segment(lab)
            if a is ERASED or b is ERASED:
                if a is not b:
                    return False
                continue
            if len(a) != len(b) or not all(alpha_eq(x.term, y.term)
                                           for x, y in zip(a, b)):
                return False
        return True

    def __hash__(self) -> int:
        return hash(tuple(lab for lab, _ in self.segments))

    def render(self) -> str:
        parts = []
        for lab, cells in self.segments:
            if cells is ERASED:
                parts.append(f"{lab} = •")
            else:
                parts.append(f"{lab} = [{', '.join(str(c.term) for c in cells)}]")
        return "; ".join(parts)

    def digest(self) -> str:
        sizes = ",".join(f"{lab}:{'•' if c is ERASED else len(c)}"
                         for lab, c in self.segments)
        h = hashlib.sha1(self.render().encode()).hexdigest()[:8]
        return f"{sizes or '-'}#{h}"


@dataclass(frozen=True)
class Configuration:
    """A store and a monadic term.

    Run-time configurations carry ``typed`` (the elaborated term, whose type
    is the configuration type ``ty``).  Erased configurations may carry only
    the term.
    """

    store: Store
    term: Term
    ty: Optional[Term] = None
    typed: Optional[TypedTerm] = None

    @staticmethod
    def typed_of(store: Store, typed: TypedTerm) -> "Configuration":
        return Configuration(store, typed.term, typed.ty, typed)

    def render(self) -> str:
        return f"⟨{self.store.render() or '∅'} ⊢ {self.term}⟩"


@dataclass(frozen=True)
class TraceEntry:
    rule: str
    head: str
    digest: str
    depth: int = 0

    def line(self) -> str:
        return f"{'  ' * self.depth}{self.rule} | {self.head} | {self.digest}"


MONADIC_RULES = ("Bind2", "Plug", "New2", "Write3", "Read2")


# -- the machine ---------------------------------------------------------------

class Machine:
    """Monadic stepping with a shared fuel budget and optional tracing.

    When a configuration carries a derivation, each step builds the reduct's
    derivation from it (``typed_step_rule``).  With ``recheck`` the reduct is
    also elaborated from scratch, which is the type-preservation check.
    """

    def __init__(self, alg: LabelAlgebra, fuel: Optional[Fuel] = None,
                 trace: Optional[list] = None, recheck: bool = True,
                 norm_fuel: int = tc.DEFAULT_NORM_FUEL):
        self.alg = alg
        self.fuel = fuel or Fuel()
        self.trace = trace
        self.recheck = recheck
        self.norm_fuel = norm_fuel
        self.depth = 0

    def step_term(self, store: Store, t: Term, typed: Optional[TypedTerm] = None):
        """One monadic step: ``(rule path, store, term, typed)`` or None.

        ``typed`` in the result is None when no derivation was given.
        """
        if typed is not None:
            r = typed_step_rule(typed, self.alg)
            if r is not None:
                return f"Lift/{r[0]}", store, r[1].term, r[1]
        else:
            r = pure_step_rule(t, self.alg)
            if r is not None:
                return f"Lift/{r[0]}", store, r[1], None
        if isinstance(t, Bind):
            sub = self.step_term(store, t.m, typed.kids[0] if typed else None)
            if sub is None:
                return None
            rule, store2, m2, tm2 = sub
            t2 = Bind(m2, t.k)
            tt2 = TypedTerm(t2, typed.ty, (tm2, typed.kids[1])) if typed else None
            return f"Bind2/{rule}", store2, t2, tt2
        return self.prim(store, t, typed)

    def prim(self, store: Store, t: Term, typed: Optional[TypedTerm]):
        """The store-level rules: Plug, New2, Write3, Read2 (and its erased
        variant on ``readRef •``)."""
        ty = typed.ty if typed else None
        match t:
            case Plug(s):
                inner = typed.kids[0] if typed else None
                self.depth += 1
                try:
                    store2, v, tv = self.run_term(store, s, inner)
                finally:
                    self.depth -= 1
                if not isinstance(v, DIOVal):
                    raise StuckTerm(f"plugged computation ended in {v}")
                out = Pure(LabeledVal(v.t))
                tout = None
                if typed is not None:
                    lab = TypedTerm(out.t, ty.ty, (tv.kids[0],))
                    tout = TypedTerm(out, ty, (lab,))
                return "Plug", store2, out, tout
            case NewRef(LabelLit(lab), LabeledVal(v)):
                cell = Cell(v)
                tl = None
                if typed is not None:
                    tl, ts = typed.kids
                    cell = Cell(v, ts.ty.ty, ts.kids[0])
                store2, n = store.allocate(lab, cell)
                out = Pure(RefVal(LabelLit(lab), n))
                tout = None
                if typed is not None:
                    ref = TypedTerm(out.t, ty.ty, (tl,))
                    tout = TypedTerm(out, ty, (ref,))
                return "New2", store2, out, tout
            case WriteRef(RefVal(LabelLit(lab), n), LabeledVal(v)):
                tv = typed.kids[1].kids[0] if typed else None
                out = Pure(UNIT_VAL)
                tout = TypedTerm(out, ty, (TypedTerm(UNIT_VAL, UNIT),)) if typed else None
                return "Write3", store.write(lab, n, v, tv), out, tout
            case ReadRef(RefVal(LabelLit(lab), n)):
                cell = store.read_cell(lab, n)
                out = Pure(LabeledVal(cell.term))
                tout = None
                if typed is not None:
                    tc_ = store.cell_derivation(cell) if n is not None else None
                    if tc_ is None:
                        tc_ = TypedTerm(cell.term, ty.ty.ty)
                    lab_t = TypedTerm(out.t, ty.ty, (_retype(tc_, ty.ty.ty),))
                    tout = TypedTerm(out, ty, (lab_t,))
                return "Read2", store, out, tout
            case ReadRef(Hole()):
                tout = _labeled_hole(ty) if typed else None
                return "ReadHole", store, Pure(LabeledVal(HOLE)), tout
        return None

    def run_term(self, store: Store, t: Term, typed: Optional[TypedTerm] = None):
        """Iterate steps until a value; returns ``(store, value, typed)``."""
        while True:
            r = self.step_term(store, t, typed)
            if r is None:
                return store, t, typed
            self.fuel.spend()
            rule, store, t, typed = r
            self.log(rule, t, store)
            if typed is not None:
                self.recheck_reduct(store, typed)

    def log(self, rule: str, t: Term, store: Store):
        if self.trace is not None:
            self.trace.append(TraceEntry(rule, head_of(t), store.digest(), self.depth))

    def recheck_reduct(self, store: Store, typed: TypedTerm):
        if self.recheck:
            self.elaborate(store, typed.term, typed.ty)

    def elaborate(self, store: Store, t: Term, ty: Term) -> Optional[TypedTerm]:
        ctx = tc.Context(self.alg, store_typing=store.typing(), fuel=self.norm_fuel)
        try:
            return tc.check(ctx, t, ty)
        except tc.TypingError as e:
            raise PreservationError(f"reduct {t} does not check against {ty}: {e}",
                                    t, e) from e

    # configurations ----------------------------------------------------------

    def step(self, c: Configuration):
        """``(rule path, successor)`` or None when ``c`` is final."""
        r = self.step_term(c.store, c.term, c.typed)
        if r is None:
            return None
        self.fuel.spend()
        rule, store, t, typed = r
        self.log(rule, t, store)
        if typed is not None:
            self.recheck_reduct(store, typed)
        return rule, Configuration(store, t, c.ty, typed)

    def run(self, c: Configuration) -> Configuration:
        while True:
            r = self.step(c)
            if r is None:
                return c
            c = r[1]


def head_of(t: Term) -> str:
    return type(t).__name__


def monadic_step(c: Configuration, alg: LabelAlgebra,
                 fuel: Optional[Fuel] = None) -> Optional[Configuration]:
    r = Machine(alg, fuel).step(c)
    return None if r is None else r[1]


def big_step(c: Configuration, alg: LabelAlgebra, fuel: int = DEFAULT_FUEL,
             trace: Optional[list] = None) -> Configuration:
    return Machine(alg, Fuel(fuel), trace).run(c)


def rules_in(path: str) -> list:
    return path.split("/")


def monadic_successors(c: Configuration, alg: LabelAlgebra,
                       fuel: Optional[Fuel] = None) -> list:
    """Enumerate every monadic rule instance applicable to ``c`` separately.

    Returns ``(rule, store, term)`` triples.  The nested run of a Plug uses
    the ordinary machine, whose own determinacy is checked step by step.
    """
    m = Machine(alg, fuel or Fuel(), recheck=False)

    def go(store: Store, t: Term, typed) -> list:
        out = [(f"Lift/{r}", store, t2) for r, t2 in pure_successors(t, alg)]
        if isinstance(t, Bind):
            for rule, s2, m2 in go(store, t.m, typed.kids[0] if typed else None):
                out.append((f"Bind2/{rule}", s2, Bind(m2, t.k)))
        r = m.prim(store, t, typed)
        if r is not None:
            out.append(r[:3])
        return out

    return go(c.store, c.term, c.typed)
