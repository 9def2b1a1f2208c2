"""Stable names for grounder-introduced atoms.

Grounders replace a bounded choice rule by an unbounded one plus auxiliary
atoms (``__aux_<n>``) whose numbers change from run to run.  To learn
policies that mention those atoms, the pipeline is:

1. :func:`augment` tags each bounded choice rule with a body atom
   ``__name(rho, args...)`` and defines it with ``{__name(rho, args...)}.``;
2. a grounder (here :func:`mock_ground`) translates the bounded choices;
3. :func:`postprocess` scans the result in textual order, binds each
   auxiliary atom to the ``__name`` atom it co-occurs with plus a
   first-come index, drops the ``__name`` scaffolding and renames the
   auxiliary atoms to ``__name(i, rho, args...)``.

The indices depend only on the relative order of the rules produced for
each named rule, so they are the same across grounder runs.
"""

from __future__ import annotations

import logging
import random
import re
from dataclasses import dataclass, field
from typing import Mapping, Union

from .core import (
    CHOICE,
    CONSTRAINT,
    INF,
    NAME_PREDICATE,
    NORMAL,
    Atom,
    CardinalityTest,
    ExtendedLiteral,
    GroundProgram,
    Literal,
    Rule,
    neg,
    pos,
)
from .textio import render_rule

log = logging.getLogger(__name__)

_SYMBOL_RE = re.compile(r"[a-z][A-Za-z0-9_]*\Z")


class ReservedAtomError(ValueError):
    pass


class UnresolvedAuxError(ValueError):
    def __init__(self, atoms):
        self.atoms = sorted(atoms)
        super().__init__("unnamed atoms without a co-occurring name atom: "
                         + ", ".join(map(str, self.atoms)))


def is_name_atom(a: Atom) -> bool:
    """``__name(rho, ...)`` before indexing (first argument is a symbol)."""
    return a.predicate == NAME_PREDICATE and bool(a.args) and not isinstance(a.args[0], int)


def is_indexed_name_atom(a: Atom) -> bool:
    return a.predicate == NAME_PREDICATE and bool(a.args) and isinstance(a.args[0], int)


def check_reserved(p: GroundProgram) -> None:
    bad = sorted(a for a in p.signature if a.unnamed or a.predicate == NAME_PREDICATE)
    if bad:
        raise ReservedAtomError("reserved atoms in source program: " + ", ".join(map(str, bad)))


@dataclass(frozen=True)
class NameAtom:
    rule_name: str
    args: tuple = ()
    index: Union[int, None] = None

    def atom(self) -> Atom:
        prefix = () if self.index is None else (self.index,)
        return Atom(NAME_PREDICATE, prefix + (self.rule_name,) + tuple(self.args))

    def __str__(self) -> str:
        return str(self.atom())

    @classmethod
    def from_atom(cls, a: Atom) -> "NameAtom":
        if is_indexed_name_atom(a):
            return cls(a.args[1], tuple(a.args[2:]), a.args[0])
        if is_name_atom(a):
            return cls(a.args[0], tuple(a.args[1:]))
        raise ValueError(f"{a} is not a name atom")


def _name_of(spec) -> NameAtom:
    if isinstance(spec, NameAtom):
        return spec
    if isinstance(spec, str):
        spec = (spec,)
    name, *args = spec
    if not isinstance(name, str) or not _SYMBOL_RE.match(name):
        raise ValueError(f"rule name must be a lowercase symbol, got {name!r}")
    return NameAtom(name, tuple(args))


def augment(p: GroundProgram, names: Mapping[int, object]) -> GroundProgram:
    """Add ``__name`` body atoms to the rules at the given positions.

    ``names`` maps a rule position to a rule name, either a symbol or a
    tuple ``(symbol, arg, ...)`` carrying the ground values of the rule's
    variables.
    """
    check_reserved(p)
    owner: dict = {}
    rules = list(p.rules)
    definitions = []
    for position in sorted(names):
        r = rules[position]
        if r.kind != CHOICE:
            raise ValueError(f"rule {position} is not a choice rule: {render_rule(r)}")
        nu = _name_of(names[position]).atom()
        if nu in owner:
            raise ValueError(f"rule name {nu} used by rules {owner[nu]} and {position}")
        owner[nu] = position
        rules[position] = Rule(CHOICE, r.head, r.body + (pos(Literal(nu)),), r.lower, r.upper)
        definitions.append(Rule(CHOICE, (Literal(nu),)))
    return GroundProgram(tuple(rules + definitions), p.subclass)


def mock_ground(p: GroundProgram, aux_seed: int = 0) -> GroundProgram:
    """Translate bounded choice rules the way grounders do.

    ``m {h1, ..., hk} n :- G.`` becomes::

        {h1, ..., hk} :- G.
        :- mu1, G.
        mu1 :- k-m+1 {not h1, ..., not hk}.
        :- mu0, G.
        mu0 :- n+1 {hk, ..., h1}.

    where the lower-bound pair is omitted when m is 0 and the upper-bound
    pair when n >= k.  Auxiliary atom numbers are drawn from ``aux_seed``.
    """
    needed = 0
    for r in p.rules:
        if r.kind == CHOICE:
            needed += (r.lower > 0) + (r.upper < len(r.head))
    taken = {int(a.predicate[len("__aux_"):]) for a in p.signature if a.unnamed}
    pool = [j for j in range(1, 4 * needed + 64 + len(taken)) if j not in taken]
    ids = iter(random.Random(aux_seed).sample(pool, needed))
    out = []
    for r in p.rules:
        if r.kind != CHOICE or not r.bounded:
            out.append(r)
            continue
        k = len(r.head)
        out.append(Rule(CHOICE, r.head, r.body))
        if r.lower > 0:
            mu = Literal(Atom(f"__aux_{next(ids)}"))
            out.append(Rule(CONSTRAINT, (), (pos(mu),) + r.body))
            card = CardinalityTest(max(0, k - r.lower + 1), tuple(neg(h) for h in r.head))
            out.append(Rule(NORMAL, (mu,), (card,)))
        if r.upper != INF and r.upper < k:
            mu = Literal(Atom(f"__aux_{next(ids)}"))
            out.append(Rule(CONSTRAINT, (), (pos(mu),) + r.body))
            card = CardinalityTest(int(r.upper) + 1, tuple(pos(h) for h in reversed(r.head)))
            out.append(Rule(NORMAL, (mu,), (card,)))
    return GroundProgram(tuple(out), p.subclass)


def _scan_atoms(r: Rule):
    """Atoms of a rule in scan order: head, then body left to right."""
    for h in r.head:
        yield h.atom
    for b in r.body:
        if isinstance(b, CardinalityTest):
            for e in b.elements:
                yield e.literal.atom
        else:
            yield b.literal.atom


@dataclass
class NameAssociation:
    pairs: list = field(default_factory=list)

    def mapping(self) -> dict:
        return dict(self.pairs)

    def names(self) -> list:
        """The indexed names in binding order; independent of aux numbering."""
        return [str(n) for _, n in self.pairs]

    def project(self, output: GroundProgram) -> list:
        """(name, defining rule) pairs: the association without aux ids."""
        defining = {}
        for r in output.rules:
            for h in r.head:
                if is_indexed_name_atom(h.atom):
                    defining.setdefault(h.atom, render_rule(r))
        return [(str(n), defining.get(n, "")) for _, n in self.pairs]


@dataclass
class PostprocessResult:
    program: GroundProgram
    association: NameAssociation
    diagnostics: list


def _rename_literal(l: Literal, assoc: dict) -> Literal:
    a = assoc.get(l.atom)
    return l if a is None else Literal(a, l.strong_negation)


def _rename_ext(e: ExtendedLiteral, assoc: dict) -> ExtendedLiteral:
    return ExtendedLiteral(_rename_literal(e.literal, assoc), e.default_negated)


def postprocess_detailed(g: GroundProgram) -> PostprocessResult:
    assoc: dict = {}
    pairs = []
    used = set()
    diagnostics = []
    # pass 1: bind unnamed atoms to the name atom they co-occur with
    for n, r in enumerate(g.rules):
        nu = next(
            (b.literal.atom for b in r.body
             if isinstance(b, ExtendedLiteral) and is_name_atom(b.literal.atom)),
            None,
        )
        if nu is None:
            continue
        unnamed = []
        for a in _scan_atoms(r):
            if a.unnamed and a not in unnamed:
                unnamed.append(a)
        fresh = [a for a in unnamed if a not in assoc]
        if len(fresh) > 1:
            msg = f"rule {n}: {len(fresh)} unnamed atoms share {nu}; indexed in body order"
            diagnostics.append(msg)
            log.warning(msg)
        base = NameAtom.from_atom(nu)
        for a in fresh:
            i = 1
            while (i, nu) in used:
                i += 1
            used.add((i, nu))
            named = NameAtom(base.rule_name, base.args, i).atom()
            assoc[a] = named
            pairs.append((a, named))

    unresolved = {a for a in g.signature if a.unnamed and a not in assoc}
    if unresolved:
        raise UnresolvedAuxError(unresolved)

    # pass 2: drop name definitions and name occurrences
    kept = []
    for r in g.rules:
        if r.kind == CHOICE and r.head and all(is_name_atom(h.atom) for h in r.head):
            continue
        body = tuple(
            b for b in r.body
            if not (isinstance(b, ExtendedLiteral) and is_name_atom(b.literal.atom))
        )
        stray = [a for a in _scan_atoms(Rule(r.kind, r.head, body, r.lower, r.upper))
                 if is_name_atom(a)]
        if stray:
            raise ValueError(f"name atom {stray[0]} outside a rule body: {render_rule(r)}")
        kept.append(Rule(r.kind, r.head, body, r.lower, r.upper))

    # pass 3: rename unnamed atoms
    out = []
    for r in kept:
        body = []
        for b in r.body:
            if isinstance(b, CardinalityTest):
                body.append(CardinalityTest(b.lower, tuple(_rename_ext(e, assoc) for e in b.elements)))
            else:
                body.append(_rename_ext(b, assoc))
        head = tuple(_rename_literal(h, assoc) for h in r.head)
        out.append(Rule(r.kind, head, tuple(body), r.lower, r.upper))
    return PostprocessResult(GroundProgram(tuple(out), g.subclass), NameAssociation(pairs), diagnostics)


def postprocess(g: GroundProgram) -> GroundProgram:
    return postprocess_detailed(g).program


def pipeline(p: GroundProgram, names: Mapping[int, object], aux_seed: int = 0) -> PostprocessResult:
    """augment, mock_ground and postprocess in one go."""
    return postprocess_detailed(mock_ground(augment(p, names), aux_seed))
