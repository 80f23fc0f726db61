from __future__ import annotations

import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ttsec import lattice as lat
from ttsec.lattice import (
    COMPARTMENT, PC, TWO_POINT, A, Bot, Decision, MismatchedAlgebra, Nat, Top,
    U, UnboundedAlgebra, compartment_carrier, format_label, law_violations,
    parse_label,
)

from .conftest import H, L
from .order_oracle import closure, least_upper_bound, sample_ids

ids = st.sampled_from(sample_ids(3))
compartments = st.one_of(
    st.builds(U, ids), st.builds(A, ids, ids), st.builds(PC, ids, ids))


@pytest.fixture(scope="module")
def oracle():
    labels = compartment_carrier(sample_ids(3))
    return labels, closure(labels)


def test_two_point_join_and_order():
    assert TWO_POINT.join(L, H) == H
    assert TWO_POINT.join(H, H) == H
    assert TWO_POINT.leq(L, H) and not TWO_POINT.leq(H, L)
    assert TWO_POINT.dec_leq(L, H) is Decision.YES
    assert TWO_POINT.dec_leq(H, L) is Decision.NO
    assert TWO_POINT.bottom() == L


def test_compartment_examples(oracle):
    labels, order = oracle
    # the first is forced by U u below A u s
    assert COMPARTMENT.join(U(Nat(1)), A(Nat(1), Nat(2))) == A(Nat(1), Nat(2))
    # frozen from the brute-force search over the generated order
    assert COMPARTMENT.join(A(Nat(1), Nat(2)), A(Nat(3), Nat(2))) == A(Top(), Nat(2))
    assert least_upper_bound(order, labels, A(Nat(1), Nat(2)),
                             A(Nat(3), Nat(2))) == A(Top(), Nat(2))
    assert COMPARTMENT.leq(A(Nat(1), Nat(2)), PC(Nat(7), Nat(2)))
    assert not COMPARTMENT.leq(PC(Nat(1), Nat(2)), A(Nat(1), Nat(2)))
    assert (PC(Nat(1), Nat(2)), A(Nat(1), Nat(2))) not in order
    assert COMPARTMENT.dec_leq(U(Nat(2)), PC(Nat(5), Nat(9))) is Decision.YES


def test_compartment_bottom():
    bot = COMPARTMENT.bottom()
    assert bot == U(Bot())
    for x in compartment_carrier():
        assert COMPARTMENT.join(x, bot) == x
    assert COMPARTMENT.join(bot, bot) == bot


def test_join_is_least_upper_bound_of_generated_order(oracle):
    labels, order = oracle
    for x, y in itertools.product(labels, labels):
        assert COMPARTMENT.join(x, y) == least_upper_bound(order, labels, x, y), (x, y)


def test_leq_matches_generated_order(oracle):
    labels, order = oracle
    for x, y in itertools.product(labels, labels):
        assert COMPARTMENT.leq(x, y) == ((x, y) in order)


def test_defining_equations_hold():
    sample = sample_ids(3)
    for u, s in itertools.product(sample, sample):
        assert COMPARTMENT.leq(U(u), A(u, s))
        assert COMPARTMENT.leq(U(Bot()), U(u))
        assert COMPARTMENT.leq(U(u), U(Top()))
        for u2 in sample:
            assert COMPARTMENT.leq(A(u, s), PC(u2, s))


def test_id_join():
    assert lat.id_join(Nat(1), Nat(1)) == Nat(1)
    assert lat.id_join(Nat(1), Nat(2)) == Top()
    assert lat.id_join(Bot(), Nat(4)) == Nat(4)


def test_mismatched_algebra():
    with pytest.raises(MismatchedAlgebra):
        TWO_POINT.join(L, U(Bot()))
    with pytest.raises(MismatchedAlgebra):
        COMPARTMENT.leq(H, U(Bot()))
    with pytest.raises(MismatchedAlgebra):
        TWO_POINT.join("L", "H")


def test_unbounded_algebra():
    alg = lat.LabelAlgebra("free", lambda a, b: max(a, b),
                           lambda x: isinstance(x, int), lambda: [0, 1, 2])
    assert not alg.bounded
    with pytest.raises(UnboundedAlgebra):
        alg.bottom()
    assert list(law_violations(alg)) == []


def test_law_violations_reports_a_broken_join():
    broken = lat.LabelAlgebra("broken", lambda a, b: a, lambda x: x in (0, 1),
                              lambda: [0, 1])
    found = list(law_violations(broken))
    assert any(v.startswith("commutativity") for v in found)


def test_laws_hold_on_full_carrier():
    assert list(law_violations(COMPARTMENT, compartment_carrier())) == []
    assert list(law_violations(TWO_POINT)) == []


def test_carrier_size():
    # 5 ids: 5 U labels, 25 A labels, 25 PC labels
    assert len(compartment_carrier()) == 55
    assert len(set(compartment_carrier())) == 55


@pytest.mark.parametrize("text,label", [
    ("L", L), ("H", H), ("U(bot)", U(Bot())), ("U(3)", U(Nat(3))),
    ("A(1,2)", A(Nat(1), Nat(2))), ("PC(top,2)", PC(Top(), Nat(2))),
    ("pc(TOP, Bot)", PC(Top(), Bot())),
])
def test_parse_label(text, label):
    assert parse_label(text) == label
    assert parse_label(format_label(label)) == label


@pytest.mark.parametrize("text", ["l", "X", "U()", "A(1)", "Q(1,2)", "U(-1)"])
def test_parse_label_rejects(text):
    with pytest.raises(lat.LatticeError):
        parse_label(text)


def test_parse_label_checks_algebra():
    with pytest.raises(MismatchedAlgebra):
        parse_label("H", COMPARTMENT)


@given(compartments, compartments, compartments)
def test_semilattice_laws(x, y, z):
    j = COMPARTMENT.join
    assert j(x, j(y, z)) == j(j(x, y), z)
    assert j(x, y) == j(y, x)
    assert j(x, x) == x


@given(compartments, compartments, compartments)
def test_order_laws(x, y, z):
    leq = COMPARTMENT.leq
    assert leq(x, x)
    if leq(x, y) and leq(y, x):
        assert x == y
    if leq(x, y) and leq(y, z):
        assert leq(x, z)


@given(compartments, compartments)
def test_dec_leq_agrees_with_leq(x, y):
    assert (COMPARTMENT.dec_leq(x, y) is Decision.YES) == COMPARTMENT.leq(x, y)


@given(compartments, compartments)
def test_join_is_an_upper_bound(x, y):
    j = COMPARTMENT.join(x, y)
    assert COMPARTMENT.leq(x, j) and COMPARTMENT.leq(y, j)
