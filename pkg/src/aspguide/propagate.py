"""Consequence computation, stability checking and the brute-force oracle.

The :class:`Engine` compiles a ground program into integer form.  Literal
``i`` is the i-th literal of the program in canonical order; an extended
literal is encoded as ``2*i`` (``l``) or ``2*i + 1`` (``not l``), so
complementation is ``code ^ 1``.  The assignment lives in ``val`` (1 true,
0 false, -1 undecided) and every assignment is pushed on ``trail``, which
doubles as the propagation queue.  Undo is a trail truncation.

Inference rules applied to a fixpoint by :meth:`Engine.propagate`:

* forward: satisfied body of a normal rule makes its head true, of a
  constraint is a conflict, of a choice rule enforces the choice bounds;
* unsupported: a literal none of whose deriving rules has a live body
  becomes false;
* backchain-true: a true literal with exactly one live deriving rule
  forces that rule's body;
* backchain-false: a false head whose rule body has all elements but one
  satisfied falsifies the remaining element;
* strong negation: ``a`` and ``-a`` together are a conflict.

There is no unfounded-set reasoning; a complete assignment still has to
pass :meth:`Engine.is_stable`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional

from .core import (
    CHOICE,
    CONSTRAINT,
    INF,
    CardinalityTest,
    ExtendedLiteral,
    GroundProgram,
    Literal,
    PartialAnswerSet,
)

K_NORMAL, K_CONSTRAINT, K_CHOICE = 0, 1, 2
_BIG = 1 << 60


class Conflict(Exception):
    pass


_CONFLICT = Conflict()


class Engine:
    def __init__(self, program: GroundProgram):
        self.program = program
        self.lits: list = program.literals()
        self.index = {l: i for i, l in enumerate(self.lits)}
        n = self.n = len(self.lits)
        self.kind: list = []
        self.head: list = []
        self.lo: list = []
        self.hi: list = []
        self.blits: list = []
        self.cards: list = []
        self.derivers: list = [[] for _ in range(n)]
        occ: list = [set() for _ in range(n)]
        for r in program.rules:
            self._add_rule(r, occ)
        for l, i in self.index.items():
            # implicit ":- a, -a."
            if not l.strong_negation and l.opposite in self.index:
                j = self.index[l.opposite]
                self._add_compiled(K_CONSTRAINT, (), 0, _BIG, (2 * i, 2 * j), (), occ)
        self.occ = [sorted(s) for s in occ]
        self.choice_rules = [r for r, k in enumerate(self.kind) if k == K_CHOICE]
        self.val = [-1] * n
        self.trail: list = []
        self.qhead = 0

    # -- compilation ---------------------------------------------------------

    def code(self, e: ExtendedLiteral) -> int:
        return 2 * self.index[e.literal] + (1 if e.default_negated else 0)

    def ext(self, code: int) -> ExtendedLiteral:
        return ExtendedLiteral(self.lits[code >> 1], bool(code & 1))

    def _add_rule(self, r, occ):
        blits, cards = [], []
        for b in r.body:
            if isinstance(b, CardinalityTest):
                cards.append((b.lower, tuple(self.code(e) for e in b.elements)))
            else:
                blits.append(self.code(b))
        kind = {CONSTRAINT: K_CONSTRAINT, CHOICE: K_CHOICE}.get(r.kind, K_NORMAL)
        hi = _BIG if r.upper == INF else int(r.upper)
        heads = tuple(self.index[h] for h in r.head)
        self._add_compiled(kind, heads, r.lower, hi, tuple(blits), tuple(cards), occ)

    def _add_compiled(self, kind, heads, lo, hi, blits, cards, occ):
        r = len(self.kind)
        self.kind.append(kind)
        self.head.append(heads)
        self.lo.append(lo)
        self.hi.append(hi)
        self.blits.append(blits)
        self.cards.append(cards)
        for c in blits:
            occ[c >> 1].add(r)
        for _, codes in cards:
            for c in codes:
                occ[c >> 1].add(r)
        for h in heads:
            occ[h].add(r)
            self.derivers[h].append(r)

    # -- assignment ----------------------------------------------------------

    def is_true(self, code: int) -> bool:
        return self.val[code >> 1] == 1 - (code & 1)

    def is_false(self, code: int) -> bool:
        return self.val[code >> 1] == (code & 1)

    def undecided(self, i: int) -> bool:
        return self.val[i] < 0

    @property
    def complete(self) -> bool:
        return len(self.trail) == self.n

    def _set(self, code: int) -> None:
        i = code >> 1
        want = 1 - (code & 1)
        v = self.val[i]
        if v < 0:
            self.val[i] = want
            self.trail.append(i)
        elif v != want:
            raise _CONFLICT

    def undo(self, mark: int) -> None:
        val = self.val
        trail = self.trail
        for i in trail[mark:]:
            val[i] = -1
        del trail[mark:]
        if self.qhead > mark:
            self.qhead = mark

    def assume(self, code: int) -> bool:
        """Assign ``code`` and propagate; False on conflict (state left dirty)."""
        try:
            self._set(code)
        except Conflict:
            return False
        return self.propagate()

    def snapshot(self) -> list:
        return [2 * i + (0 if self.val[i] == 1 else 1) for i in self.trail]

    # -- inference -----------------------------------------------------------

    def _card(self, card) -> int:
        m, codes = card
        val = self.val
        t = f = 0
        for c in codes:
            v = val[c >> 1]
            if v >= 0:
                if v == (c & 1):
                    f += 1
                else:
                    t += 1
        if t >= m:
            return 1
        if f > len(codes) - m:
            return 0
        return -1

    def _body(self, r):
        """(status, open elements): status 1 satisfied, 0 falsified, -1 open."""
        val = self.val
        open_ = []
        for c in self.blits[r]:
            v = val[c >> 1]
            if v < 0:
                open_.append(c)
            elif v == (c & 1):
                return 0, open_
        for card in self.cards[r]:
            st = self._card(card)
            if st == 0:
                return 0, open_
            if st < 0:
                open_.append(card)
        return (-1 if open_ else 1), open_

    def _live(self, r) -> bool:
        val = self.val
        for c in self.blits[r]:
            if val[c >> 1] == (c & 1):
                return False
        for card in self.cards[r]:
            if self._card(card) == 0:
                return False
        return True

    def _require_true(self, card) -> None:
        m, codes = card
        val = self.val
        possible = []
        t = 0
        for c in codes:
            v = val[c >> 1]
            if v < 0:
                possible.append(c)
            elif v != (c & 1):
                t += 1
        if t + len(possible) < m:
            raise _CONFLICT
        if t < m and t + len(possible) == m:
            for c in possible:
                self._set(c)

    def _require_false(self, card) -> None:
        m, codes = card
        val = self.val
        undecided = []
        t = 0
        for c in codes:
            v = val[c >> 1]
            if v < 0:
                undecided.append(c)
            elif v != (c & 1):
                t += 1
        if t >= m:
            raise _CONFLICT
        if t == m - 1:
            for c in undecided:
                self._set(c ^ 1)

    def _force_body(self, r) -> None:
        for c in self.blits[r]:
            self._set(c)
        for card in self.cards[r]:
            self._require_true(card)

    def _support(self, h: int) -> None:
        val = self.val
        v = val[h]
        if v == 0:
            return
        live = None
        count = 0
        blits, cards = self.blits, self.cards
        for r in self.derivers[h]:
            for c in blits[r]:
                if val[c >> 1] == (c & 1):
                    break
            else:
                if cards[r] and not self._live(r):
                    continue
                if v < 0:
                    return
                count += 1
                if count > 1:
                    return
                live = r
        if count == 0:
            self._set(2 * h + 1)
        else:
            self._force_body(live)

    def _examine(self, r) -> None:
        if self.cards[r]:
            return self._examine_general(r)
        val = self.val
        nopen = 0
        last = -1
        for c in self.blits[r]:
            v = val[c >> 1]
            if v < 0:
                nopen += 1
                last = c
            elif v == (c & 1):
                for h in self.head[r]:
                    if val[h]:
                        self._support(h)
                return
        kind = self.kind[r]
        if kind == K_NORMAL:
            h = self.head[r][0]
            v = val[h]
            if nopen == 0:
                if v < 0:
                    val[h] = 1
                    self.trail.append(h)
                elif v == 0:
                    raise _CONFLICT
            elif v == 0:
                if nopen == 1:
                    self._set(last ^ 1)
            elif v == 1:
                self._support(h)
        elif kind == K_CONSTRAINT:
            if nopen == 0:
                raise _CONFLICT
        else:
            self._examine_general(r)

    def _examine_general(self, r) -> None:
        st, open_ = self._body(r)
        kind = self.kind[r]
        val = self.val
        if st == 0:
            for h in self.head[r]:
                self._support(h)
            return
        if kind == K_NORMAL:
            h = self.head[r][0]
            if st == 1:
                self._set(2 * h)
            elif val[h] == 0:
                if len(open_) == 1:
                    el = open_[0]
                    if type(el) is int:
                        self._set(el ^ 1)
                    else:
                        self._require_false(el)
            elif val[h] == 1:
                self._support(h)
        elif kind == K_CONSTRAINT:
            if st == 1:
                raise _CONFLICT
        else:
            heads = self.head[r]
            if st == 1:
                t = 0
                und = []
                for h in heads:
                    v = val[h]
                    if v < 0:
                        und.append(h)
                    elif v == 1:
                        t += 1
                hi, lo = self.hi[r], self.lo[r]
                if t > hi:
                    raise _CONFLICT
                if t == hi:
                    for h in und:
                        self._set(2 * h + 1)
                elif t + len(und) < lo:
                    raise _CONFLICT
                elif t + len(und) == lo:
                    for h in und:
                        self._set(2 * h)
            else:
                for h in heads:
                    if val[h] == 1:
                        self._support(h)

    def propagate(self) -> bool:
        """Close the trail suffix not yet processed.  False on conflict."""
        trail = self.trail
        val = self.val
        occ = self.occ
        examine = self._examine
        try:
            while self.qhead < len(trail):
                i = trail[self.qhead]
                self.qhead += 1
                for r in occ[i]:
                    examine(r)
                if val[i] == 1:
                    self._support(i)
        except Conflict:
            return False
        return True

    def propagate_full(self) -> bool:
        """Close an arbitrary assignment (re-derives from every rule)."""
        try:
            for r in range(len(self.kind)):
                self._examine(r)
            for i in range(self.n):
                self._support(i)
        except Conflict:
            return False
        self.qhead = 0
        return self.propagate()

    # -- stability -----------------------------------------------------------

    def is_stable(self, model: Optional[list] = None) -> bool:
        """Check a total assignment (``model[i]`` truthy iff literal i holds)."""
        if model is None:
            model = [v == 1 for v in self.val]
        n = self.n

        def holds(c):
            return bool(model[c >> 1]) != bool(c & 1)

        def card_holds(card):
            m, codes = card
            return sum(1 for c in codes if holds(c)) >= m

        reduct = []
        for r, kind in enumerate(self.kind):
            body_true = all(holds(c) for c in self.blits[r]) and all(
                card_holds(cd) for cd in self.cards[r]
            )
            if kind == K_CONSTRAINT:
                if body_true:
                    return False
                continue
            if kind == K_CHOICE:
                if body_true:
                    t = sum(1 for h in self.head[r] if model[h])
                    if not self.lo[r] <= t <= self.hi[r]:
                        return False
                heads = [h for h in self.head[r] if model[h]]
            else:
                heads = list(self.head[r])
            if not heads:
                continue
            if any(c & 1 and model[c >> 1] for c in self.blits[r]):
                continue
            positives = [c >> 1 for c in self.blits[r] if not c & 1]
            rcards = []
            for m, codes in self.cards[r]:
                satisfied_neg = sum(1 for c in codes if c & 1 and not model[c >> 1])
                rcards.append((m - satisfied_neg, [c >> 1 for c in codes if not c & 1]))
            for h in heads:
                reduct.append((h, positives, rcards))

        least = [False] * n
        changed = True
        pending = reduct
        while changed:
            changed = False
            rest = []
            for h, positives, rcards in pending:
                if least[h]:
                    continue
                if all(least[p] for p in positives) and all(
                    sum(1 for p in ps if least[p]) >= m for m, ps in rcards
                ):
                    least[h] = True
                    changed = True
                else:
                    rest.append((h, positives, rcards))
            pending = rest
        return all(bool(model[i]) == least[i] for i in range(n))


# -- public API ----------------------------------------------------------------

CONSISTENT = "consistent"
INCONSISTENT = "inconsistent"


@dataclass(frozen=True)
class ExpandResult:
    status: str
    set: Optional[PartialAnswerSet] = None

    @property
    def consistent(self) -> bool:
        return self.status == CONSISTENT


def expand(p: GroundProgram, a: PartialAnswerSet = PartialAnswerSet()) -> ExpandResult:
    eng = Engine(p)
    extra = []
    try:
        for e in a.members:
            if e.literal in eng.index:
                eng._set(eng.code(e))
            else:
                extra.append(e)
    except Conflict:
        return ExpandResult(INCONSISTENT)
    if not eng.propagate_full():
        return ExpandResult(INCONSISTENT)
    members = {eng.ext(c) for c in eng.snapshot()} | set(extra)
    try:
        return ExpandResult(CONSISTENT, PartialAnswerSet(members))
    except Exception:
        return ExpandResult(INCONSISTENT)


def verify_stable(p: GroundProgram, candidate: Iterable[Literal]) -> bool:
    eng = Engine(p)
    candidate = set(candidate)
    if any(l not in eng.index for l in candidate):
        return False
    model = [l in candidate for l in eng.lits]
    return eng.is_stable(model)


class AtomLimitExceeded(ValueError):
    pass


def enumerate_stable_models(p: GroundProgram, atom_limit: int = 16) -> set:
    """All stable models as frozensets of literals, by exhaustive search.

    The reduct of a program w.r.t. a candidate M only depends on which
    default-negated literals and which choice heads M contains.  Every
    subset G of those literals is enumerated; the least model of the reduct
    fixed by G is the only candidate that can agree with G, and it is kept
    when it agrees with G and passes the full stability check.
    """
    if len(p.signature) > atom_limit:
        raise AtomLimitExceeded(
            f"{len(p.signature)} atoms exceed the enumeration limit {atom_limit}"
        )
    eng = Engine(p)
    guess = set()
    for r, kind in enumerate(eng.kind):
        if kind == K_CHOICE:
            guess.update(eng.head[r])
        guess.update(c >> 1 for c in eng.blits[r] if c & 1)
        for _, codes in eng.cards[r]:
            guess.update(c >> 1 for c in codes if c & 1)
    guess = sorted(guess)
    models = set()
    for bits in itertools.product((False, True), repeat=len(guess)):
        g = [False] * eng.n
        for i, b in zip(guess, bits):
            g[i] = b
        m = _least_model(eng, g)
        if all(m[i] == g[i] for i in guess) and eng.is_stable(m):
            models.add(frozenset(eng.lits[i] for i in range(eng.n) if m[i]))
    return models


def _least_model(eng: Engine, g: list) -> list:
    """Least model of the reduct determined by the guess ``g``."""
    rules = []
    for r, kind in enumerate(eng.kind):
        if kind == K_CONSTRAINT:
            continue
        if any(c & 1 and g[c >> 1] for c in eng.blits[r]):
            continue
        heads = [h for h in eng.head[r] if g[h]] if kind == K_CHOICE else eng.head[r]
        if not heads:
            continue
        plain = [c >> 1 for c in eng.blits[r] if not c & 1]
        cards = [
            (m - sum(1 for c in codes if c & 1 and not g[c >> 1]), [c >> 1 for c in codes if not c & 1])
            for m, codes in eng.cards[r]
        ]
        rules.append((heads, plain, cards))
    m = [False] * eng.n
    changed = True
    while changed:
        changed = False
        for heads, plain, cards in rules:
            if all(m[h] for h in heads):
                continue
            if all(m[i] for i in plain) and all(sum(1 for i in ps if m[i]) >= k for k, ps in cards):
                for h in heads:
                    if not m[h]:
                        m[h] = True
                        changed = True
    return m
