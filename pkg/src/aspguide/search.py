"""Backtracking search for one stable model.

All solver variants share :func:`run_search`, a depth-first loop over an
explicit stack of pending alternatives: after each choice ``e`` the state
``B + {not e}`` is pushed and the search continues from ``B + {e}``; a dead
end (conflict, or a complete assignment that is not stable) pops the most
recent alternative.  The variants differ only in how the next literal is
selected.

Statistics:

``decision_count``
    number of choice points selected;
``backtrack_count``
    dead ends that discard more than the most recent choice, i.e. the
    search returns to an earlier choice point after every alternative below
    it failed.  Trying ``not e`` right after ``e`` failed is a flip, not a
    backtrack;
``expand_calls``
    propagation runs in the main loop (lookahead probes excluded).
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .core import (
    DecisionSequence,
    ExtendedLiteral,
    GroundProgram,
    PartialAnswerSet,
)
from .policy import Policy, PolicyIndex, best_choice_points
from .propagate import Conflict, Engine

MODEL = "model"
NO_MODEL = "no_model"
LIMIT = "limit"


@dataclass
class Stats:
    decision_count: int = 0
    backtrack_count: int = 0
    expand_calls: int = 0
    policy_hits: int = 0

    @property
    def hit_rate(self) -> float:
        return self.policy_hits / self.decision_count if self.decision_count else 0.0


@dataclass
class SolveOutcome:
    status: str
    model: Optional[frozenset] = None
    decisions: Optional[DecisionSequence] = None
    stats: Stats = field(default_factory=Stats)
    choices: tuple = ()

    @property
    def satisfiable(self) -> bool:
        return self.status == MODEL


class ReplayError(RuntimeError):
    pass


# -- literal selection ---------------------------------------------------------


def _candidates(eng: Engine) -> list:
    """Undecided literals worth probing, in canonical order.

    Heads of choice rules whose body is still alive come first; other
    undecided literals are only considered once those are exhausted.
    """
    val = eng.val
    heads = set()
    for r in eng.choice_rules:
        for h in eng.head[r]:
            if val[h] < 0 and h not in heads and eng._live(r):
                heads.add(h)
    if heads:
        return sorted(heads)
    return [i for i in range(eng.n) if val[i] < 0]


def _gain(eng: Engine, code: int, closed: bool) -> Optional[int]:
    mark = len(eng.trail)
    try:
        eng._set(code)
        ok = eng.propagate() if closed else eng.propagate_full()
    except Conflict:
        ok = False
    gain = len(eng.trail) - mark
    eng.undo(mark)
    return gain if ok else None


def lookahead_choice(eng: Engine, closed: bool = True) -> int:
    """Pick the literal whose weaker polarity yields the most consequences.

    A polarity whose probe conflicts is a failed literal: the first
    candidate with one failed polarity is returned with the other polarity,
    and one with both polarities failed is returned positive so that the
    caller's propagation meets the dead end.
    """
    best, best_score, best_code = None, -1, None
    for i in _candidates(eng):
        g_pos = _gain(eng, 2 * i, closed)
        g_neg = _gain(eng, 2 * i + 1, closed)
        if g_pos is None:
            return 2 * i if g_neg is None else 2 * i + 1
        if g_neg is None:
            return 2 * i
        score = min(g_pos, g_neg)
        if score > best_score:
            best, best_score = i, score
            best_code = 2 * i if g_pos >= g_neg else 2 * i + 1
    if best is None:
        raise ValueError("choose_literal called on a complete assignment")
    return best_code


def _naive_order(eng: Engine) -> list:
    return sorted(range(eng.n), key=lambda i: (eng.lits[i].atom.arity == 0, i))


def naive_choice(eng: Engine) -> int:
    """Debug selector: first undecided literal, atoms with arguments first."""
    order = eng.__dict__.get("_naive")
    if order is None:
        order = eng._naive = _naive_order(eng)
    for i in order:
        if eng.val[i] < 0:
            return 2 * i
    raise ValueError("choose_literal called on a complete assignment")


class _Selector:
    hits = 0

    def __call__(self, eng: Engine, level: int) -> int:
        raise NotImplementedError

    def mark(self):
        return None

    def restore(self, mark) -> None:
        pass


class LookaheadSelector(_Selector):
    def __call__(self, eng, level):
        return lookahead_choice(eng)


class NaiveSelector(_Selector):
    def __call__(self, eng, level):
        return naive_choice(eng)


class PolicySelector(_Selector):
    """Policy-guided selection with fallback to lookahead.

    ``tried`` holds every literal this selector has returned.  By default it
    only grows; with ``per_branch=True`` entries added below a refuted
    choice point are forgotten when the search returns to it.
    """

    def __init__(self, eng, pol: Policy, subclass, rng: random.Random, per_branch=False):
        self.index = PolicyIndex(pol, subclass, eng)
        self.rng = rng
        self.per_branch = per_branch
        self.tried: set = set()
        self.order: list = []
        self.hits = 0

    def __call__(self, eng, level):
        code = None
        if self.index:
            val = eng.val
            tried = self.tried
            best = self.index.best(level, lambda c: val[c >> 1] < 0 and c not in tried)
            if best:
                code = self.rng.choice(best)
                self.hits += 1
        if code is None:
            code = lookahead_choice(eng)
        if code not in self.tried:
            self.tried.add(code)
            self.order.append(code)
        return code

    def mark(self):
        return len(self.order)

    def restore(self, mark):
        if self.per_branch:
            for c in self.order[mark:]:
                self.tried.discard(c)
            del self.order[mark:]


class ForcedSelector(_Selector):
    def __init__(self, eng, sequence: DecisionSequence):
        self.pending = []
        for e in sequence:
            if e.literal not in eng.index:
                raise ReplayError(f"decision {e} is not a literal of the program")
            self.pending.append(eng.code(e))
        self.pending.reverse()

    def __call__(self, eng, level):
        while self.pending:
            code = self.pending.pop()
            if eng.is_false(code):
                raise ReplayError(f"forced choice {eng.ext(code)} already decided oppositely")
            if not eng.is_true(code):
                return code
        return lookahead_choice(eng)


# -- the search loop -------------------------------------------------------------


def run_search(
    eng: Engine,
    select: _Selector,
    assumptions: Iterable[int] = (),
    max_decisions: Optional[int] = None,
    timeout: Optional[float] = None,
) -> SolveOutcome:
    stats = Stats()
    deadline = None if timeout is None else time.monotonic() + timeout
    stack: list = []  # (trail mark, alternative, path length, selector mark)
    path: list = []
    choices: list = []

    def outcome(status, model=None):
        stats.policy_hits = select.hits
        return SolveOutcome(
            status,
            model,
            DecisionSequence(tuple(eng.ext(c) for c in path)) if status == MODEL else None,
            stats,
            tuple(eng.ext(c) for c in choices),
        )

    try:
        for c in assumptions:
            eng._set(c)
        ok = eng.propagate_full()
    except Conflict:
        ok = False
    stats.expand_calls += 1
    while True:
        if ok and eng.complete:
            if eng.is_stable():
                model = frozenset(eng.lits[i] for i in eng.trail if eng.val[i] == 1)
                return outcome(MODEL, model)
            ok = False
        if not ok:
            if not stack:
                return outcome(NO_MODEL)
            mark, alt, plen, smark = stack.pop()
            if len(path) > plen + 1:
                stats.backtrack_count += 1
            del path[plen:]
            path.append(alt)
            eng.undo(mark)
            select.restore(smark)
            ok = eng.assume(alt)
            stats.expand_calls += 1
            continue
        if max_decisions is not None and stats.decision_count >= max_decisions:
            return outcome(LIMIT)
        if deadline is not None and time.monotonic() > deadline:
            return outcome(LIMIT)
        code = select(eng, len(stack))
        stats.decision_count += 1
        choices.append(code)
        stack.append((len(eng.trail), code ^ 1, len(path), select.mark()))
        path.append(code)
        ok = eng.assume(code)
        stats.expand_calls += 1


def _codes(eng: Engine, a: Optional[PartialAnswerSet]) -> list:
    if a is None:
        return []
    return [eng.code(e) for e in sorted(a.members) if e.literal in eng.index]


# -- public API ------------------------------------------------------------------


def choose_literal(p: GroundProgram, b: PartialAnswerSet) -> ExtendedLiteral:
    eng = Engine(p)
    try:
        for c in _codes(eng, b):
            eng._set(c)
    except Conflict:
        raise ValueError("inconsistent partial answer set") from None
    eng.qhead = len(eng.trail)
    return eng.ext(lookahead_choice(eng, closed=False))


def solve_baseline(
    p: GroundProgram,
    a: Optional[PartialAnswerSet] = None,
    max_decisions: Optional[int] = None,
    timeout: Optional[float] = None,
    naive: bool = False,
) -> SolveOutcome:
    eng = Engine(p)
    sel = NaiveSelector() if naive else LookaheadSelector()
    return run_search(eng, sel, _codes(eng, a), max_decisions, timeout)


def solve_tracking(
    p: GroundProgram,
    a: Optional[PartialAnswerSet] = None,
    s: DecisionSequence = DecisionSequence(),
    max_decisions: Optional[int] = None,
    timeout: Optional[float] = None,
) -> SolveOutcome:
    eng = Engine(p)
    out = run_search(eng, LookaheadSelector(), _codes(eng, a), max_decisions, timeout)
    if out.decisions is not None and len(s):
        out.decisions = DecisionSequence(tuple(s) + tuple(out.decisions))
    return out


def replay(p: GroundProgram, d: Optional[DecisionSequence]) -> SolveOutcome:
    if d is None:
        raise ReplayError("cannot replay an undefined decision sequence")
    eng = Engine(p)
    return run_search(eng, ForcedSelector(eng, d))


def choose_literal_dspec(
    p: GroundProgram,
    subclass: Optional[str],
    b: PartialAnswerSet,
    level: int,
    tried: Iterable[ExtendedLiteral],
    pol: Policy,
    rng: random.Random,
) -> ExtendedLiteral:
    tried = set(tried)
    literals = p.literals()
    admissible = [
        e
        for l in literals
        for e in (ExtendedLiteral(l, False), ExtendedLiteral(l, True))
        if e not in b.members and ExtendedLiteral(l, not e.default_negated) not in b.members
        and e not in tried
    ]
    best = best_choice_points(pol, level, admissible, subclass) if subclass else set()
    if best:
        return rng.choice(sorted(best))
    return choose_literal(p, b)


def solve_dspec(
    p: GroundProgram,
    subclass: Optional[str],
    pol: Policy,
    seed: int = 0,
    max_decisions: Optional[int] = None,
    timeout: Optional[float] = None,
    per_branch_tried: bool = False,
) -> SolveOutcome:
    eng = Engine(p)
    sel = PolicySelector(eng, pol, subclass, random.Random(seed), per_branch_tried)
    return run_search(eng, sel, (), max_decisions, timeout)
