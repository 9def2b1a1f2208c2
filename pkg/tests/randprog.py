"""Random small ground programs for oracle comparisons."""

from __future__ import annotations

import random

from aspguide.core import (
    CardinalityTest,
    ExtendedLiteral,
    GroundProgram,
    Literal,
    Rule,
    lit,
)

KINDS = ("normal", "normal", "normal", "constraint", "choice")


def random_program(rng: random.Random, max_atoms=10, max_rules=20, strong=True,
                   subclass=None) -> GroundProgram:
    n_atoms = rng.randint(1, max_atoms)
    atoms = [lit("a", i) for i in range(n_atoms)]
    pool = list(atoms)
    if strong:
        for a in rng.sample(atoms, rng.randint(0, min(2, n_atoms))):
            pool.append(Literal(a.atom, True))

    def ext():
        return ExtendedLiteral(rng.choice(pool), rng.random() < 0.4)

    def body():
        out = []
        for _ in range(rng.randint(0, 3)):
            if rng.random() < 0.2:
                elems = tuple(dict.fromkeys(ext() for _ in range(rng.randint(1, 3))))
                out.append(CardinalityTest(rng.randint(0, len(elems)), elems))
            else:
                out.append(ext())
        return tuple(out)

    rules = []
    for _ in range(rng.randint(1, max_rules)):
        kind = rng.choice(KINDS)
        if kind == "normal":
            rules.append(Rule("normal", (rng.choice(pool),), body()))
        elif kind == "constraint":
            b = body()
            if b:
                rules.append(Rule("constraint", (), b))
        else:
            heads = tuple(dict.fromkeys(rng.choice(pool) for _ in range(rng.randint(1, 3))))
            lo = rng.randint(0, len(heads))
            hi = rng.choice([float("inf"), rng.randint(lo, len(heads))])
            rules.append(Rule("choice", heads, body(), lo, hi))
    return GroundProgram(tuple(rules), subclass)
