"""Attacker-indexed erasure of typed terms, stores and configurations.

Erasure is type-directed: whether a node collapses to ``•`` depends on the
label in its (normal-form) type.  ``erase_typed`` returns a ``TypedTerm`` so
that erased terms keep their types and can be erased again.  Types contain no
secret data and are left unchanged.
"""

from __future__ import annotations

from typing import Hashable

from .evaluator import ERASED, Cell, Configuration, Store
from .lattice import LabelAlgebra
from .syntax import (
    HOLE, Bind, DIO, DIOVal, Hole, If, App, LabelLit, LabelOp, LabeledT,
    LabeledVal, NewRef, Plug, PlugHole, Pure, ReadRef, RefT, RefVal, Term,
    TypedTerm, Unlabel, WriteRef, alpha_eq,
)


class OpenLabelError(Exception):
    """A label needed by erasure is not a closed literal."""


class Eraser:
    def __init__(self, alg: LabelAlgebra, attacker: Hashable):
        alg.check(attacker)
        self.alg = alg
        self.attacker = attacker

    def secret(self, label: Term, where: Term) -> bool:
        if not isinstance(label, LabelLit):
            raise OpenLabelError(f"label {label} in {where} is not closed")
        return not self.alg.leq(label.label, self.attacker)

    def hole(self, ty: Term) -> TypedTerm:
        return TypedTerm(HOLE, ty, ())

    def dio_secret(self, tt: TypedTerm) -> bool:
        ty = tt.ty
        return isinstance(ty, DIO) and self.secret(ty.label, tt.term)

    def node(self, tt: TypedTerm, kids) -> TypedTerm:
        kids = tuple(kids)
        term = tt.term.with_kids([k.term for k in kids])
        return TypedTerm(term, tt.ty, kids)

    def homo(self, tt: TypedTerm) -> TypedTerm:
        return self.node(tt, [self.erase(k) for k in tt.kids])

    def erase(self, tt: TypedTerm) -> TypedTerm:
        t, ty = tt.term, tt.ty
        match t:
            case Hole():
                return tt
            case App() | If() | Pure() | DIOVal() | Bind() | Unlabel() | \
                    NewRef() | WriteRef():
                if self.dio_secret(tt):
                    return self.hole(ty)
                return self.homo(tt)
            case LabeledVal() | LabelOp():
                lt = self._shape(ty, LabeledT, t)
                if self.secret(lt.label, t):
                    return self.node(tt, [self.hole(tt.kids[0].ty)])
                return self.homo(tt)
            case RefVal(l, _):
                rt = self._shape(ty, RefT, t)
                if self.secret(rt.label, t):
                    return TypedTerm(RefVal(l, None), ty, tt.kids)
                return tt
            case ReadRef():
                if self.dio_secret(tt):
                    return self.hole(ty)
                lt = self._shape(ty.ty, LabeledT, t)
                if self.secret(lt.label, t):
                    return self.node(tt, [self.hole(tt.kids[0].ty)])
                return self.homo(tt)
            case Plug() | PlugHole():
                if self.dio_secret(tt):
                    return self.hole(ty)
                lt = self._shape(ty.ty, LabeledT, t)
                inner = self.erase(tt.kids[0])
                if isinstance(t, Plug) and not self.secret(lt.label, t):
                    return self.node(tt, [inner])
                return TypedTerm(PlugHole(inner.term), ty, (inner,))
        if not tt.kids:
            return tt
        return self.homo(tt)

    @staticmethod
    def _shape(ty: Term, cls, t: Term):
        if not isinstance(ty, cls):
            raise OpenLabelError(f"{t} has type {ty}, expected {cls.__name__}")
        return ty


def erase_typed(alg: LabelAlgebra, attacker, tt: TypedTerm) -> TypedTerm:
    return Eraser(alg, attacker).erase(tt)


def erase_term(alg: LabelAlgebra, attacker, tt: TypedTerm) -> Term:
    return erase_typed(alg, attacker, tt).term


def _erase_cell(e: Eraser, store: Store, cell: Cell) -> Cell:
    if not cell.term.KIDS or cell.ty is None:
        return cell
    typed = e.erase(store.cell_derivation(cell))
    return Cell(typed.term, cell.ty, typed)


def erase_store(alg: LabelAlgebra, attacker, store: Store) -> Store:
    e = Eraser(alg, attacker)
    segs = {}
    for lab, cells in store.items():
        if cells is ERASED or not alg.leq(lab, attacker):
            segs[lab] = ERASED
        else:
            segs[lab] = [_erase_cell(e, store, c) for c in cells]
    return Store.of(alg, segs, attacker)


def erase_config(alg: LabelAlgebra, attacker, c: Configuration) -> Configuration:
    if c.typed is None:
        raise OpenLabelError("erasure needs an elaborated configuration")
    e = Eraser(alg, attacker)
    store = erase_store(alg, attacker, c.store)
    ty = c.typed.ty
    if not isinstance(ty, DIO):
        raise OpenLabelError(f"configuration type {ty} is not a computation")
    if e.secret(ty.label, c.term):
        typed = e.hole(ty)
    else:
        typed = e.erase(c.typed)
    return Configuration(store, typed.term, ty, typed)


def structurally_equal(c1: Configuration, c2: Configuration) -> bool:
    return alpha_eq(c1.term, c2.term) and c1.store == c2.store


def low_equiv(alg: LabelAlgebra, attacker, c1: Configuration,
              c2: Configuration) -> bool:
    return structurally_equal(erase_config(alg, attacker, c1),
                              erase_config(alg, attacker, c2))
