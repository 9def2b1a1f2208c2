import pytest

from aspguide.core import (
    Atom,
    CardinalityTest,
    DecisionSequence,
    ExtendedLiteral,
    GroundProgram,
    Inconsistent,
    Literal,
    PartialAnswerSet,
    Rule,
    choice,
    complement,
    is_complete,
    lit,
    neg,
    normal,
    pos,
)


def test_unnamed_atoms_are_recognised():
    assert Atom("__aux_12").unnamed
    assert not Atom("__aux_0").unnamed
    assert not Atom("aux_3").unnamed
    assert not Atom("__name", ("r1",)).unnamed


def test_literal_rendering_and_order():
    assert str(lit("at", 3, 1, 0)) == "at(3, 1, 0)"
    assert str(lit("p", neg=True)) == "-p"
    assert str(neg(lit("p"))) == "not p"
    assert sorted([lit("q"), lit("p", 1), lit("p")]) == [lit("p"), lit("p", 1), lit("q")]


def test_strong_negation_is_a_distinct_literal():
    a, na = lit("a"), lit("a", neg=True)
    assert a != na
    assert a.opposite == na and na.opposite == a


def test_complement_flips_default_negation():
    e = pos(lit("p"))
    assert complement(e) == ExtendedLiteral(lit("p"), True)
    assert complement(complement(e)) == e


def test_partial_answer_set_rejects_complementary_pairs():
    with pytest.raises(Inconsistent):
        PartialAnswerSet({pos(lit("p")), neg(lit("p"))})
    with pytest.raises(Inconsistent):
        PartialAnswerSet({pos(lit("a")), pos(lit("a", neg=True))})
    # not a together with not -a is fine
    PartialAnswerSet({neg(lit("a")), neg(lit("a", neg=True))})


def test_partial_answer_set_add_and_true_literals():
    b = PartialAnswerSet().add(pos(lit("p"))).add(neg(lit("q")))
    assert b.true_literals() == {lit("p")}
    assert len(b) == 2


def test_is_complete():
    p = GroundProgram((normal(lit("p"), neg(lit("q"))),))
    assert not is_complete(p, PartialAnswerSet({pos(lit("p"))}))
    assert is_complete(p, PartialAnswerSet({pos(lit("p")), neg(lit("q"))}))


def test_rule_validation():
    with pytest.raises(ValueError):
        Rule("normal", (), ())
    with pytest.raises(ValueError):
        Rule("constraint", (lit("p"),), ())
    with pytest.raises(ValueError):
        choice([lit("a")], 2, 1)
    with pytest.raises(ValueError):
        choice([lit("a")], 0, 2)
    with pytest.raises(ValueError):
        CardinalityTest(3, (pos(lit("a")),))
    assert choice([lit("a")], 1, 1).bounded
    assert not choice([lit("a")]).bounded


def test_signature_collects_every_atom():
    r = normal(lit("h"), CardinalityTest(1, (pos(lit("x")), neg(lit("y", neg=True)))))
    p = GroundProgram((r,))
    assert p.signature == {Atom("h"), Atom("x"), Atom("y")}


def test_bad_subclass_label():
    with pytest.raises(ValueError):
        GroundProgram((), "two words")


def test_decision_sequence():
    e1, e2 = pos(lit("p")), neg(lit("q"))
    d = DecisionSequence((e1, e2))
    assert d.level(e2) == 1
    assert d.level(pos(lit("q"))) is None
    with pytest.raises(ValueError):
        DecisionSequence((e1, e1))
