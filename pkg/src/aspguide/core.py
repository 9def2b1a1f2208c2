"""Domain types shared by the parser, the solver and the learner.

Everything here is immutable.  Identity is structural and ordering follows
the canonical text rendering, so iteration over atoms is deterministic.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

UNNAMED_RE = re.compile(r"__aux_[1-9][0-9]*\Z")
NAME_PREDICATE = "__name"

INF = math.inf


@dataclass(frozen=True)
class Fn:
    """Compound ground term such as ``move(3)``."""

    name: str
    args: tuple

    def __str__(self) -> str:
        return f"{self.name}({', '.join(render_term(a) for a in self.args)})"


Term = Union[int, str, Fn]


def render_term(t: Term) -> str:
    return str(t)


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple = ()

    def __post_init__(self):
        if not isinstance(self.args, tuple):
            object.__setattr__(self, "args", tuple(self.args))

    @property
    def unnamed(self) -> bool:
        """True for grounder-introduced atoms (``__aux_<n>``)."""
        return UNNAMED_RE.match(self.predicate) is not None

    @property
    def arity(self) -> int:
        return len(self.args)

    def __str__(self) -> str:
        if not self.args:
            return self.predicate
        return f"{self.predicate}({', '.join(render_term(a) for a in self.args)})"

    def __lt__(self, other: "Atom") -> bool:
        return str(self) < str(other)


@dataclass(frozen=True)
class Literal:
    atom: Atom
    strong_negation: bool = False

    def __str__(self) -> str:
        return ("-" if self.strong_negation else "") + str(self.atom)

    def __lt__(self, other: "Literal") -> bool:
        return str(self) < str(other)

    @property
    def opposite(self) -> "Literal":
        """The strong complement (a <-> -a)."""
        return Literal(self.atom, not self.strong_negation)


@dataclass(frozen=True)
class ExtendedLiteral:
    """A literal ``l`` or its default negation ``not l``."""

    literal: Literal
    default_negated: bool = False

    def __str__(self) -> str:
        return ("not " if self.default_negated else "") + str(self.literal)

    def __lt__(self, other: "ExtendedLiteral") -> bool:
        return sort_key(self) < sort_key(other)


def sort_key(e: ExtendedLiteral) -> tuple:
    return (str(e.literal), e.default_negated)


def complement(e: ExtendedLiteral) -> ExtendedLiteral:
    return ExtendedLiteral(e.literal, not e.default_negated)


def lit(text_or_atom, *args, neg: bool = False) -> Literal:
    """Convenience constructor: ``lit("u", 0)`` is the literal ``u(0)``."""
    if isinstance(text_or_atom, Atom):
        return Literal(text_or_atom, neg)
    return Literal(Atom(text_or_atom, tuple(args)), neg)


def pos(l: Literal) -> ExtendedLiteral:
    return ExtendedLiteral(l, False)


def neg(l: Literal) -> ExtendedLiteral:
    return ExtendedLiteral(l, True)


@dataclass(frozen=True)
class CardinalityTest:
    """Body element ``m {e1, ..., ek}``: true when at least m elements hold."""

    lower: int
    elements: tuple

    def __post_init__(self):
        if not isinstance(self.elements, tuple):
            object.__setattr__(self, "elements", tuple(self.elements))
        if not 0 <= self.lower <= len(self.elements):
            raise ValueError(
                f"cardinality bound {self.lower} outside 0..{len(self.elements)}"
            )


BodyElement = Union[ExtendedLiteral, CardinalityTest]

NORMAL = "normal"
CONSTRAINT = "constraint"
CHOICE = "choice"


@dataclass(frozen=True)
class Rule:
    kind: str
    head: tuple = ()
    body: tuple = ()
    lower: int = 0
    upper: float = INF

    def __post_init__(self):
        if not isinstance(self.head, tuple):
            object.__setattr__(self, "head", tuple(self.head))
        if not isinstance(self.body, tuple):
            object.__setattr__(self, "body", tuple(self.body))
        if self.kind == NORMAL:
            if len(self.head) != 1:
                raise ValueError("normal rules have exactly one head literal")
        elif self.kind == CONSTRAINT:
            if self.head:
                raise ValueError("constraints have no head")
        elif self.kind == CHOICE:
            if self.lower < 0 or self.lower > self.upper:
                raise ValueError(f"malformed bounds {self.lower}..{self.upper}")
            if self.upper != INF and self.upper > len(self.head):
                raise ValueError("upper bound exceeds number of head literals")
        else:
            raise ValueError(f"unknown rule kind {self.kind!r}")

    @property
    def bounded(self) -> bool:
        return self.kind == CHOICE and (self.lower > 0 or self.upper != INF)

    def literals(self) -> Iterable[Literal]:
        yield from self.head
        for b in self.body:
            if isinstance(b, CardinalityTest):
                for e in b.elements:
                    yield e.literal
            else:
                yield b.literal


def fact(l: Literal) -> Rule:
    return Rule(NORMAL, (l,))


def normal(head: Literal, *body: BodyElement) -> Rule:
    return Rule(NORMAL, (head,), body)


def constraint(*body: BodyElement) -> Rule:
    return Rule(CONSTRAINT, (), body)


def choice(heads, lower: int = 0, upper: float = INF, body=()) -> Rule:
    return Rule(CHOICE, tuple(heads), tuple(body), lower, upper)


SUBCLASS_RE = re.compile(r"\S+\Z")


@dataclass(frozen=True)
class GroundProgram:
    rules: tuple = ()
    subclass: Optional[str] = None
    signature: frozenset = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if not isinstance(self.rules, tuple):
            object.__setattr__(self, "rules", tuple(self.rules))
        if self.subclass is not None and not SUBCLASS_RE.match(self.subclass):
            raise ValueError(f"bad subclass label {self.subclass!r}")
        atoms = {l.atom for r in self.rules for l in r.literals()}
        object.__setattr__(self, "signature", frozenset(atoms))

    def literals(self) -> list:
        """Literals occurring in the program, in canonical order."""
        return sorted({l for r in self.rules for l in r.literals()})

    def head_literals(self) -> set:
        return {h for r in self.rules for h in r.head}


class Inconsistent(Exception):
    pass


@dataclass(frozen=True)
class PartialAnswerSet:
    members: frozenset = frozenset()

    def __post_init__(self):
        if not isinstance(self.members, frozenset):
            object.__setattr__(self, "members", frozenset(self.members))
        if not is_consistent(self.members):
            raise Inconsistent(sorted(map(str, self.members)))

    def __contains__(self, e: ExtendedLiteral) -> bool:
        return e in self.members

    def __iter__(self):
        return iter(sorted(self.members))

    def __len__(self) -> int:
        return len(self.members)

    def add(self, e: ExtendedLiteral) -> "PartialAnswerSet":
        return PartialAnswerSet(self.members | {e})

    def true_literals(self) -> frozenset:
        return frozenset(e.literal for e in self.members if not e.default_negated)


def is_consistent(members: Iterable[ExtendedLiteral]) -> bool:
    members = set(members)
    for e in members:
        if complement(e) in members:
            return False
        if not e.default_negated and pos(e.literal.opposite) in members:
            return False
    return True


def is_complete(p: GroundProgram, b: PartialAnswerSet) -> bool:
    return all(pos(l) in b or neg(l) in b for l in p.literals())


@dataclass(frozen=True)
class DecisionSequence:
    entries: tuple = ()

    def __post_init__(self):
        if not isinstance(self.entries, tuple):
            object.__setattr__(self, "entries", tuple(self.entries))
        if len(set(self.entries)) != len(self.entries):
            raise ValueError("decision sequence repeats an extended literal")

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def level(self, e: ExtendedLiteral) -> Optional[int]:
        """0-based position of e, or None when absent."""
        try:
            return self.entries.index(e)
        except ValueError:
            return None
