"""Learned choice-point policies.

A policy stores, per subclass label, how many training decision sequences
selected an extended literal at each position.  Queries sum those tallies
over a window of positions around the requested level: with scaling factor
``delta`` position ``idx`` is inside the window of level ``l`` iff
``2*l - delta <= 2*idx < 2*l + delta``.  The doubled form keeps everything in
integers; with ``delta == 1`` the window is exactly ``{l}``.

Because an extended literal occurs at most once in a decision sequence, the
window sum equals the number of sequences that chose the literal somewhere
in the window.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .core import DecisionSequence, ExtendedLiteral


@dataclass(frozen=True)
class Policy:
    delta: int = 1
    tables: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.delta < 1:
            raise ValueError("delta must be a positive integer")
        for label, table in self.tables.items():
            for (e, level), count in table.items():
                if level < 0 or count < 1:
                    raise ValueError(f"bad entry {label}: ({e}, {level}) -> {count}")

    def with_delta(self, delta: int) -> "Policy":
        return Policy(delta, self.tables)

    @property
    def empty(self) -> bool:
        return not any(self.tables.values())

    def total(self, subclass: str) -> int:
        return sum(self.tables.get(subclass, {}).values())


@dataclass(frozen=True)
class TrainingRecord:
    subclass: str
    sequence: Optional[DecisionSequence]
    source: str = ""
    solve_stats: object = None


def in_window(idx: int, level: int, delta: int) -> bool:
    return 2 * level - delta <= 2 * idx < 2 * level + delta


def window_positions(level: int, delta: int) -> range:
    # smallest idx with 2*idx >= 2*level - delta, largest with 2*idx < 2*level + delta
    first = max(0, level - delta // 2)
    last = level + (delta - 1) // 2
    return range(first, last + 1)


def occurrence_count(pol: Policy, e: ExtendedLiteral, level: int, subclass: str) -> int:
    table = pol.tables.get(subclass)
    if not table:
        return 0
    return sum(table.get((e, idx), 0) for idx in window_positions(level, pol.delta))


def best_choice_points(
    pol: Policy, level: int, candidates: Iterable[ExtendedLiteral], subclass: str
) -> set:
    """Candidates with the largest positive occurrence count at ``level``.

    Empty when no candidate has been seen near ``level``; the caller then
    falls back to its default selection.
    """
    counts = {e: occurrence_count(pol, e, level, subclass) for e in candidates}
    top = max(counts.values(), default=0)
    if top == 0:
        return set()
    return {e for e, c in counts.items() if c == top}


def learn_policy(records: Iterable[TrainingRecord], delta: int = 1) -> Policy:
    tables: dict = defaultdict(lambda: defaultdict(int))
    for rec in records:
        if rec.sequence is None:
            continue
        table = tables[rec.subclass]
        for idx, e in enumerate(rec.sequence):
            table[(e, idx)] += 1
    return Policy(delta, {k: dict(v) for k, v in tables.items() if v})


def merge(a: Policy, b: Policy) -> Policy:
    """Entrywise sum of two policies learned with the same delta."""
    if a.delta != b.delta:
        raise ValueError(f"cannot merge policies with delta {a.delta} and {b.delta}")
    tables = {label: dict(t) for label, t in a.tables.items()}
    for label, t in b.tables.items():
        dst = tables.setdefault(label, {})
        for key, count in t.items():
            dst[key] = dst.get(key, 0) + count
    return Policy(a.delta, tables)


class PolicyIndex:
    """Policy table for one subclass, keyed by engine literal codes.

    Used inside the search loop where candidates are integer codes; answers
    the same question as :func:`best_choice_points`.
    """

    def __init__(self, pol: Policy, subclass: Optional[str], engine):
        self.delta = pol.delta
        self.by_pos: dict = defaultdict(list)
        table = pol.tables.get(subclass, {}) if subclass is not None else {}
        for (e, idx), count in table.items():
            if e.literal in engine.index:
                self.by_pos[idx].append((engine.code(e), count))
        for entries in self.by_pos.values():
            entries.sort()

    def __bool__(self) -> bool:
        return bool(self.by_pos)

    def best(self, level: int, admissible) -> list:
        acc: dict = {}
        for idx in window_positions(level, self.delta):
            for code, count in self.by_pos.get(idx, ()):
                if admissible(code):
                    acc[code] = acc.get(code, 0) + count
        if not acc:
            return []
        top = max(acc.values())
        return sorted(c for c, n in acc.items() if n == top)
