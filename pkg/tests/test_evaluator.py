from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ttsec.evaluator import (
    ERASED, Cell, Configuration, Fuel, FuelExhausted, InvalidReference,
    Machine, Store, big_step, is_value, pure_step, pure_step_rule,
    typed_step_rule,
)
from ttsec.harness import GenSpec, close, generate, random_fills
from ttsec.lattice import TWO_POINT
from ttsec.parser import pretty
from ttsec.syntax import HOLE, IntLit, alpha_eq

from .conftest import H, L
from .util import config, store, term


def run(src, segs=None):
    log: list = []
    final = Machine(TWO_POINT, Fuel(1000), trace=log).run(config(src, segs))
    return final, [e.rule for e in log]


@pytest.mark.parametrize("src,rule,out", [
    ("(fun (x : Int) => add x 1) 2", "Beta", "add 2 1"),
    ("add 2 1", "Delta", "3"),
    ("concat \"a\" \"b\"", "Delta", "\"ab\""),
    ("join L H", "Delta", "H"),
    ("if false then 1 else 2", "If3", "2"),
    ("pure 3", "Pure2", "MkDIO 3"),
    ("label 3", "Label2", "MkLabeled 3"),
    ("unlabel (MkLabeled 4)", "Unlabel2", "pure 4"),
    ("MkDIO 3 >>= f", "Bind1", "f 3"),
    ("plug• (pure 3)", "PlugHole", "pure (MkLabeled •)"),
])
def test_pure_rules(src, rule, out):
    r = pure_step_rule(term(src), TWO_POINT)
    assert r is not None and r[0] == rule
    assert alpha_eq(r[1], term(out))


@pytest.mark.parametrize("src", ["3", "MkDIO 3", "MkLabeled 3", "MkRef@H 0",
                                 "fun (x : Int) => add 1 2", "Int -> Int"])
def test_values(src):
    assert is_value(term(src), TWO_POINT)
    assert pure_step(term(src), TWO_POINT) is None


def test_hole_steps_to_itself():
    assert pure_step_rule(HOLE, TWO_POINT) == ("Hole", HOLE)


def test_new_then_read():
    final, rules = run("newRef@H (MkLabeled 3) >>= fun (r : Ref H Int) => readRef r",
                       {H: ["7"]})
    assert final.store.render() == "H = [7, 3]"
    assert pretty(final.term) == "MkDIO (MkLabeled 3)"
    assert rules[0] == "Bind2/New2" and "Read2" in rules


def test_write_then_read():
    final, rules = run("writeRef (MkRef@H 0) (MkLabeled 5) >>= "
                       "fun (u : Unit) => readRef (MkRef@H 0)", {H: ["7"]})
    assert final.store.render() == "H = [5]"
    assert pretty(final.term) == "MkDIO (MkLabeled 5)"
    assert rules[0] == "Bind2/Write3"


def test_plug_runs_inner_computation():
    final, rules = run("plug (pure 3)")
    assert pretty(final.term) == "MkDIO (MkLabeled 3)"
    assert rules == ["Lift/Pure2", "Plug", "Lift/Pure2"]


def test_unlabel():
    final, rules = run("unlabel (MkLabeled 4)")
    assert pretty(final.term) == "MkDIO 4"
    assert rules == ["Lift/Unlabel2", "Lift/Pure2"]


def test_concat_corpus_application():
    from .conftest import CORPUS

    src = (CORPUS / "concat.ttsec").read_text().split("\n", 1)[1]
    final, _ = run(f"({src}) L H (MkLabeled \"ab\") (MkLabeled \"cd\")")
    assert pretty(final.term) == 'MkDIO "abcd"'


def test_fuel_is_shared_and_enforced():
    c = config("pure (add 1 (add 2 3))")
    with pytest.raises(FuelExhausted):
        Machine(TWO_POINT, Fuel(1)).run(c)
    assert pretty(big_step(c, TWO_POINT).term) == "MkDIO 6"


def test_out_of_bounds_reference():
    s = store({H: ["7"]})
    with pytest.raises(InvalidReference):
        s.read(H, 3)
    with pytest.raises(InvalidReference):
        s.write(H, 1, IntLit(0))


def test_store_basics():
    s = Store.of(TWO_POINT)
    s, i = s.allocate(H, Cell(IntLit(1)))
    s, j = s.allocate(H, Cell(IntLit(2)))
    assert (i, j) == (0, 1)
    assert s.read(H, 1) == IntLit(2)
    assert s.segment(L) == ()
    assert s.write(H, 0, IntLit(9)).read(H, 0) == IntLit(9)
    assert s.read(H, 0) == IntLit(1)  # stores are persistent


def test_erased_segment_reads_hole_and_ignores_writes():
    s = Store.of(TWO_POINT, {H: ERASED})
    assert s.read(H, 0) == HOLE
    assert s.write(H, 0, IntLit(1)) == s
    assert s.allocate(H, Cell(IntLit(1))) == (s, None)


def _typed_agrees(tt, alg):
    while True:
        r = pure_step_rule(tt.term, alg)
        rt = typed_step_rule(tt, alg)
        if r is None:
            assert rt is None
            return
        assert rt[0] == r[0] and rt[1].term == r[1]
        tt = rt[1]


def test_typed_step_agrees_with_pure_step():
    c = config("(fun (x : Int) (y : Int) => if true then add x y else 0) 1 2")
    _typed_agrees(c.typed, TWO_POINT)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 20), st.sampled_from(["two_point", "compartment"]))
def test_typed_machine_matches_untyped_machine(seed, lattice):
    sample = generate(GenSpec(seed=seed, depth=4, lattice=lattice, secrets=2))
    import random
    c = close(sample, random_fills(sample, random.Random(seed)))
    a = Machine(sample.alg, Fuel(5000), recheck=False)
    b = Machine(sample.alg, Fuel(5000), recheck=False)
    plain = Configuration(c.store, c.term, c.ty)
    try:
        fa = a.run(c)
        fb = b.run(plain)
    except FuelExhausted:
        return
    assert alpha_eq(fa.term, fb.term)
    assert fa.store == fb.store
