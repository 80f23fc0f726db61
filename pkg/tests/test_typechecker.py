from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ttsec import typechecker as tc
from ttsec.harness import GenSpec, generate
from ttsec.parser import parse_program, pretty
from ttsec.syntax import alpha_eq

from .conftest import CORPUS, H, L
from .util import ctx, store, term


def infer(src, segs=None, ambient=None):
    s = store(segs)
    return pretty(tc.infer(ctx(store=s, ambient=ambient), term(src)))


def check(src, ty, segs=None, ambient=None):
    s = store(segs)
    return tc.check(ctx(store=s, ambient=ambient), term(src), term(ty))


@pytest.mark.parametrize("src,ty", [
    ("add 1 2", "Int"),
    ("concat \"a\" \"b\"", "Str"),
    ("join L H", "Label"),
    ("label 3", "Labeled L Int"),
    ("plug (pure 3)", "DIO L (Labeled L Int)"),
    ("newRef@H (MkLabeled 3)", "DIO L (Ref H Int)"),
    ("(fun (A : Type) (x : A) => x) Int 3", "Int"),
    ("fun (x : Labeled H Int) => unlabel x", "Labeled H Int -> DIO H Int"),
    ("pure (add 1 2)", "DIO L Int"),
])
def test_infer(src, ty):
    assert infer(src) == ty


def test_infer_against_store():
    segs = {H: ["7"]}
    assert infer("readRef (MkRef@H 0)", segs) == "DIO L (Labeled H Int)"
    assert infer("writeRef (MkRef@H 0) (MkLabeled 5)", segs) == "DIO L Unit"


def test_concat_corpus_type():
    prog = parse_program((CORPUS / "concat.ttsec").read_text())
    ty = tc.infer(tc.Context(prog.algebra), prog.term)
    expected = term("forall (l : Label) (l' : Label) . "
                    "Labeled l Str -> Labeled l' Str -> DIO (join l l') Str")
    assert alpha_eq(ty, expected)


@pytest.mark.parametrize("src,ty,kind", [
    ("(fun (x : Labeled H Int) => unlabel x) (MkLabeled 3)", "DIO L Int", "mismatch"),
    ("fun (x : Labeled H Int) => plug (unlabel x)",
     "Labeled H Int -> DIO L (Labeled L Int)", "flow violation"),
    ("newRef@L (MkLabeled 3)", "DIO H (Ref L Int)", "flow violation"),
    ("1", "Bool", "mismatch"),
])
def test_rejected(src, ty, kind):
    with pytest.raises(tc.TypingError) as ei:
        check(src, ty)
    assert ei.value.kind == kind


def test_write_down_is_rejected():
    src = ("fun (x : Labeled H Int) => unlabel x >>= fun (y : Int) => "
           "writeRef (MkRef@L 0) (MkLabeled y)")
    with pytest.raises(tc.TypingError) as ei:
        check(src, "Labeled H Int -> DIO H Unit", {L: ["1"]})
    assert ei.value.kind == "flow violation"
    assert ei.value.pos == (1, 59)


def test_plug_keeps_the_secret_label():
    check("fun (x : Labeled H Int) => plug (unlabel x)",
          "Labeled H Int -> DIO L (Labeled H Int)")


def test_label_polymorphism():
    check("fun (l : Label) (x : Labeled l Int) => unlabel x",
          "forall (l : Label) . Labeled l Int -> DIO l Int")


@pytest.mark.parametrize("src,kind", [
    ("y", "unbound variable"),
    ("fun (x : Int) => x 3", "not-a-function"),
    ("if true then 1 else \"a\"", "mismatch"),
])
def test_synthesis_errors(src, kind):
    with pytest.raises(tc.TypingError) as ei:
        infer(src)
    assert ei.value.kind == kind
    assert ei.value.diagnostic("f.ttsec").startswith("f.ttsec:1:")


def test_normalize_and_conversion():
    c = ctx()
    assert tc.normalize(c, term("(fun (x : Int) => add x 1) 2")) == term("3")
    assert tc.normalize(c, term("join L H")) == term("H")
    assert tc.normalize(c, term("if true then Int else Bool")) == term("Int")
    assert tc.convertible(c, term("(fun (a : Type) => a) Int"), term("Int"))
    assert tc.flow(c, term("L"), term("H"))
    assert not tc.flow(c, term("H"), term("L"))


def test_elaboration_annotates_every_node():
    tt = check("fun (x : Labeled H Int) => unlabel x", "Labeled H Int -> DIO H Int")
    assert all(n.ty is not None for n in tt.nodes())
    assert pretty(tt.kid("body").ty) == "DIO H Int"


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 20), st.sampled_from(["two_point", "compartment"]))
def test_generated_terms_recheck_at_their_type(seed, lattice):
    sample = generate(GenSpec(seed=seed, depth=4, lattice=lattice, secrets=1))
    c = tc.Context(sample.alg, store_typing=sample.store.typing())
    for name, ty in sample.holes:
        c = c.extend(name, ty)
    again = tc.check(c, sample.term, sample.ty)
    assert tc.convertible(c, again.ty, sample.ty)
    assert tc.check(c, again.term, again.ty).ty == again.ty
