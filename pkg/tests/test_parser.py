from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ttsec.harness import GenSpec, generate
from ttsec.lattice import COMPARTMENT, TWO_POINT, A, Nat
from ttsec.parser import ParseError, UnknownLabel, parse, parse_program, parse_store, pretty
from ttsec.syntax import (
    HOLE, App, Bind, Hole, IntLit, LabelLit, NewRef, PlugHole, RefVal, StrLit,
    Var, alpha_eq,
)

from .conftest import CORPUS, H


@pytest.mark.parametrize("src", [
    "fun (x : Int) => x",
    "forall (a : Type) . a -> a",
    "if true then 1 else 2",
    "newRef@H 3",
    "MkRef@H 0",
    "MkRef@H •",
    "plug (pure 1)",
    "plug• (pure 1)",
    "writeRef r 1",
    "join L H",
    "\"hi\"",
    "()",
    "DIO L (Labeled H Int)",
    "readRef r >>= fun (s : Labeled H Int) => pure 42",
])
def test_pretty_is_canonical(src):
    assert pretty(parse(src, TWO_POINT)) == src


def test_application_is_left_associative():
    assert parse("f a b") == App(App(Var("f"), Var("a")), Var("b"))


def test_arrow_is_right_associative():
    assert alpha_eq(parse("Int -> Int -> Int"), parse("Int -> (Int -> Int)"))


def test_bind_is_left_associative():
    t = parse("m >>= k1 >>= k2")
    assert isinstance(t, Bind) and isinstance(t.m, Bind)


def test_unicode_and_ascii_aliases():
    assert parse("λ (x : Int) ⇒ x") == parse("fun (x : Int) => x")
    assert parse("∀ (a : Type) . a → a") == parse("forall (a : Type) . a -> a")
    assert parse("_hole_") == HOLE == Hole()
    assert isinstance(parse("plug_hole (pure 1)"), PlugHole)
    assert pretty(parse("plug• •"), ascii=True) == "plug_hole _hole_"
    assert parse("String") == parse("Str")


def test_multi_binder_sugar():
    assert parse("fun (x : Int) (y : Int) => x") == \
        parse("fun (x : Int) => fun (y : Int) => x")


def test_comments_and_strings():
    assert parse("-- note\n\"a\\\"b\" -- trailing") == StrLit('a"b')
    assert parse('"ü"') == StrLit("ü")


def test_compartment_labels():
    t = parse("newRef@A(1,2) 3", COMPARTMENT)
    assert t == NewRef(LabelLit(A(Nat(1), Nat(2))), IntLit(3))
    assert pretty(t) == "newRef@A(1,2) 3"
    assert parse("MkRef@H •", TWO_POINT) == RefVal(LabelLit(H), None)


@pytest.mark.parametrize("src,line,col", [
    ("fun (x : Int => x", 1, 14),
    ("1 +", 1, 3),
    ("add 1\n  )", 2, 3),
    ("MkRef@H x", 1, 9),
    ("", 1, 1),
])
def test_parse_errors_carry_positions(src, line, col):
    with pytest.raises(ParseError) as ei:
        parse(src, TWO_POINT)
    assert (ei.value.line, ei.value.col) == (line, col)


def test_label_outside_lattice():
    with pytest.raises(UnknownLabel):
        parse("newRef@A(1,2) 3", TWO_POINT)
    with pytest.raises(UnknownLabel):
        parse("pure H", COMPARTMENT)


def test_parse_program_directives():
    prog = parse_program((CORPUS / "read_pure42.ttsec").read_text())
    assert prog.algebra is TWO_POINT
    assert prog.store == {H: [IntLit(7)]}
    assert isinstance(prog.term, Bind)


def test_parse_program_default_lattice():
    prog = parse_program("newRef@U(1) 3", default_lattice="compartment")
    assert prog.algebra is COMPARTMENT


def test_parse_store():
    assert parse_store("H=[9]; L=[1, 2]", TWO_POINT) == {
        H: [IntLit(9)], TWO_POINT.bottom(): [IntLit(1), IntLit(2)]}


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 20), st.sampled_from(["two_point", "compartment"]))
def test_round_trip_generated(seed, lattice):
    t = generate(GenSpec(seed=seed, depth=4, lattice=lattice, secrets=1)).term
    alg = TWO_POINT if lattice == "two_point" else COMPARTMENT
    assert alpha_eq(parse(pretty(t), alg), t)
    assert alpha_eq(parse(pretty(t, ascii=True), alg), t)
