import pytest

from aspguide.core import GroundProgram, PartialAnswerSet, lit, neg, pos
from aspguide.propagate import (
    AtomLimitExceeded,
    enumerate_stable_models,
    expand,
    verify_stable,
)
from aspguide.textio import parse_program

from test_textio import P1_TEXT

P1 = parse_program(P1_TEXT)
EVEN = parse_program("p :- not q.\nq :- not p.\n")


def L(name, *args):
    return lit(name, *args)


def test_expand_not_p_on_p1_is_inconsistent():
    assert not expand(P1, PartialAnswerSet({neg(L("p"))})).consistent


def test_expand_p_on_p1_is_inconsistent():
    assert not expand(P1, PartialAnswerSet({pos(L("p"))})).consistent


def test_expand_u0_on_p1_derives_not_v0():
    res = expand(P1, PartialAnswerSet({pos(L("u", 0))}))
    assert res.consistent
    assert {pos(L("u", 0)), neg(L("v", 0)), pos(L("r")), pos(L("t", 0))} <= res.set.members


def test_expand_empty_program():
    res = expand(GroundProgram(), PartialAnswerSet())
    assert res.consistent and len(res.set) == 0


def test_expand_empty_set_on_p1_is_consistent():
    # without constraint back-propagation the failure of p/q is only found by search
    res = expand(P1)
    assert res.consistent
    assert {pos(L("r")), neg(L("s"))} <= res.set.members


def test_expand_is_monotone_and_idempotent():
    a = PartialAnswerSet({pos(L("u", 0))})
    once = expand(P1, a).set
    assert a.members <= once.members
    assert expand(P1, once).set == once


def test_cardinality_propagation():
    p = parse_program("1 {a, b, c} 1.\n")
    res = expand(p, PartialAnswerSet({pos(L("b"))}))
    assert {neg(L("a")), neg(L("c"))} <= res.set.members
    res = expand(p, PartialAnswerSet({neg(L("a")), neg(L("b"))}))
    assert pos(L("c")) in res.set.members


def test_strong_negation_conflict():
    p = parse_program("a.\n-a :- b.\nb.\n")
    assert not expand(p).consistent
    assert enumerate_stable_models(p) == set()


def test_verify_stable():
    assert verify_stable(EVEN, [L("p")])
    assert not verify_stable(EVEN, [L("p"), L("q")])
    assert not verify_stable(EVEN, [])
    for cand in ([], [L("p"), L("r")], [L("q"), L("r"), L("t", 0), L("u", 0)]):
        assert not verify_stable(P1, cand)


def test_positive_loops_are_not_self_supporting():
    p = parse_program("{a} :- b.\nb :- a.\n")
    assert enumerate_stable_models(p) == {frozenset()}
    assert not verify_stable(p, [L("a"), L("b")])


def test_enumerate_examples():
    assert enumerate_stable_models(EVEN) == {frozenset({L("p")}), frozenset({L("q")})}
    assert enumerate_stable_models(P1) == set()
    assert enumerate_stable_models(GroundProgram()) == {frozenset()}
    assert len(enumerate_stable_models(parse_program("1 {a(1), a(2), a(3)} 2.\n"))) == 6


def test_atom_limit():
    p = parse_program("".join(f"{{a({i})}}.\n" for i in range(17)))
    with pytest.raises(AtomLimitExceeded):
        enumerate_stable_models(p)
    assert len(enumerate_stable_models(p, atom_limit=17)) == 2 ** 17
