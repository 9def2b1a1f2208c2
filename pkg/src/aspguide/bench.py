"""Instance generators and the learn/evaluate harness.

Sliding-tile puzzle encoding (board cells numbered row-major, goal has the
blank in cell 0 and tile ``i`` in cell ``i``; a move names the direction the
blank travels), for a horizon of ``k`` steps::

    1 {occurs(move(down), t), ..., occurs(move(up), t), occurs(noop, t)} 1.
    :- occurs(move(d), t), blank(c, t).       % d leads off the board from c
    blank(n, t+1) :- blank(c, t), occurs(move(d), t).      % n = c + d
    moved(n, t) :- blank(c, t), occurs(move(d), t).
    at(x, c, t+1) :- at(x, n, t), blank(c, t), occurs(move(d), t).
    at(x, c, t+1) :- at(x, c, t), not moved(c, t).
    blank(c, t+1) :- blank(c, t), occurs(noop, t).
    occurs(noop, t+1) :- occurs(noop, t).     % idling only at the end
    :- occurs(move(d), t), occurs(move(d'), t+1).   % d' opposite to d
    :- not at(x, goal(x), k).  :- not blank(0, k).

The instance is the set of ``at(x, c, 0)`` / ``blank(c, 0)`` facts.  Each
step's choice rule is the rule to name before grounding; see
:func:`puzzle_rule_names`.
"""

from __future__ import annotations

import csv
import io
import random
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .core import (
    CHOICE,
    Atom,
    CardinalityTest,
    Fn,
    GroundProgram,
    Literal,
    choice,
    constraint,
    fact,
    lit,
    neg,
    normal,
    pos,
)
from .policy import Policy, TrainingRecord, learn_policy
from .search import MODEL, SolveOutcome, solve_baseline, solve_dspec, solve_tracking
from .textio import InstanceFile

DIRECTIONS = {"down": (1, 0), "left": (0, -1), "right": (0, 1), "up": (-1, 0)}
OPPOSITE = {"down": "up", "up": "down", "left": "right", "right": "left"}
BOARDS = {"3x3": (3, 3), "2x2": (2, 2)}


@dataclass(frozen=True)
class PuzzleInstanceSpec:
    k: int
    seed: int = 0
    board: str = "3x3"


class Board:
    def __init__(self, rows: int, cols: int):
        self.rows, self.cols = rows, cols
        self.cells = rows * cols

    def neighbour(self, cell: int, d: str) -> Optional[int]:
        r, c = divmod(cell, self.cols)
        dr, dc = DIRECTIONS[d]
        r, c = r + dr, c + dc
        if 0 <= r < self.rows and 0 <= c < self.cols:
            return r * self.cols + c
        return None

    def goal(self) -> tuple:
        """State as a tuple: position i holds the tile in cell i (0 = blank)."""
        return tuple(range(self.cells))

    def apply(self, state: tuple, d: str) -> tuple:
        b = state.index(0)
        n = self.neighbour(b, d)
        if n is None:
            raise ValueError(f"illegal move {d} with blank in cell {b}")
        s = list(state)
        s[b], s[n] = s[n], s[b]
        return tuple(s)

    def legal(self, state: tuple) -> list:
        b = state.index(0)
        return [d for d in DIRECTIONS if self.neighbour(b, d) is not None]


def scramble(board: Board, k: int, rng: random.Random) -> tuple:
    """Walk k random legal moves away from the goal."""
    state = board.goal()
    for _ in range(k):
        state = board.apply(state, rng.choice(board.legal(state)))
    return state


def _occurs(d, t):
    return lit("occurs", Fn("move", (d,)), t)


def _noop(t):
    return lit("occurs", "noop", t)


def puzzle_program(board: Board, state: tuple, k: int) -> GroundProgram:
    if k < 1:
        raise ValueError("horizon k must be at least 1")
    tiles = range(1, board.cells)
    rules = []
    for c, x in enumerate(state):
        rules.append(fact(lit("blank", c, 0) if x == 0 else lit("at", x, c, 0)))
    for t in range(k):
        rules.append(choice([_occurs(d, t) for d in DIRECTIONS] + [_noop(t)], 1, 1))
    for t in range(k):
        for c in range(board.cells):
            blank = lit("blank", c, t)
            for d in DIRECTIONS:
                n = board.neighbour(c, d)
                if n is None:
                    rules.append(constraint(pos(_occurs(d, t)), pos(blank)))
                    continue
                rules.append(normal(lit("blank", n, t + 1), pos(blank), pos(_occurs(d, t))))
                rules.append(normal(lit("moved", n, t), pos(blank), pos(_occurs(d, t))))
                for x in tiles:
                    rules.append(normal(
                        lit("at", x, c, t + 1), pos(lit("at", x, n, t)), pos(blank), pos(_occurs(d, t))))
            for x in tiles:
                rules.append(
                    normal(lit("at", x, c, t + 1), pos(lit("at", x, c, t)), neg(lit("moved", c, t)))
                )
            rules.append(normal(lit("blank", c, t + 1), pos(blank), pos(_noop(t))))
        if t + 1 < k:
            rules.append(normal(_noop(t + 1), pos(_noop(t))))
            for d in DIRECTIONS:
                rules.append(constraint(pos(_occurs(d, t)), pos(_occurs(OPPOSITE[d], t + 1))))
    for c, x in enumerate(board.goal()):
        target = lit("blank", c, k) if x == 0 else lit("at", x, c, k)
        rules.append(constraint(neg(target)))
    return GroundProgram(tuple(rules), f"k{k}")


def gen_puzzle(spec: PuzzleInstanceSpec) -> InstanceFile:
    if spec.k < 1:
        raise ValueError("horizon k must be at least 1")
    board = Board(*BOARDS[spec.board])
    state = scramble(board, spec.k, random.Random(spec.seed))
    return InstanceFile(None, puzzle_program(board, state, spec.k))


def puzzle_rule_names(program: GroundProgram) -> dict:
    """Name every per-step choice rule ``step`` with the step as argument."""
    names = {}
    for i, r in enumerate(program.rules):
        if r.kind == CHOICE and r.bounded:
            t = r.head[0].atom.args[-1]
            names[i] = ("step", t)
    return names


def decode_plan(model: Iterable[Literal]) -> list:
    """Blank moves of a puzzle model in step order; ``None`` marks an idle step."""
    steps = {}
    for l in model:
        a = l.atom
        if a.predicate == "occurs":
            what, t = a.args
            steps[t] = None if what == "noop" else what.args[0]
    return [steps[t] for t in sorted(steps)]


def initial_state(program: GroundProgram, board: Board) -> tuple:
    state = [None] * board.cells
    for r in program.rules:
        if r.kind == "normal" and not r.body:
            a = r.head[0].atom
            if a.predicate == "blank" and a.args[1] == 0:
                state[a.args[0]] = 0
            elif a.predicate == "at" and a.args[2] == 0:
                state[a.args[1]] = a.args[0]
    return tuple(state)


def check_plan(board: Board, state: tuple, plan: Sequence) -> bool:
    for d in plan:
        if d is None:
            continue
        if d not in board.legal(state):
            return False
        state = board.apply(state, d)
    return state == board.goal()


def gen_p1(n: int, consistent: bool = False) -> InstanceFile:
    """The P1 family: an even p/q cycle killed by two constraints plus n+1
    independent u/v choices."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    p, q, r, s = (lit(x) for x in "pqrs")
    rules = [
        normal(p, neg(q)),
        normal(q, neg(p)),
        fact(r),
    ]
    if not consistent:
        rules.append(constraint(pos(p), pos(r)))
    rules.append(constraint(pos(q), neg(s)))
    for i in range(n + 1):
        rules.append(normal(lit("u", i), pos(lit("t", i)), neg(lit("v", i))))
    for i in range(n + 1):
        rules.append(normal(lit("v", i), pos(lit("t", i)), neg(lit("u", i))))
    for i in range(n + 1):
        rules.append(fact(lit("t", i)))
    return InstanceFile(None, GroundProgram(tuple(rules), "p1"))


# -- harness -----------------------------------------------------------------------

CSV_HEADER = ["instance", "subclass", "variant", "status", "decisions", "backtracks", "expand_calls", "millis"]


@dataclass(frozen=True)
class ReportRow:
    instance: str
    subclass: str
    variant: str
    status: str
    decisions: int
    backtracks: int
    expand_calls: int
    millis: int


@dataclass
class EvalReport:
    rows: list = field(default_factory=list)

    def to_csv(self, include_time: bool = True) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in sorted(self.rows, key=lambda r: (r.instance, r.variant)):
            w.writerow([
                r.instance, r.subclass, r.variant, r.status, r.decisions,
                r.backtracks, r.expand_calls, r.millis if include_time else 0,
            ])
        return buf.getvalue()

    def by_variant(self, variant: str) -> dict:
        return {r.instance: r for r in self.rows if r.variant == variant}

    def median_decisions(self, variant: str) -> float:
        return statistics.median(r.decisions for r in self.rows if r.variant == variant)


def _row(name, subclass, variant, out: SolveOutcome, millis) -> ReportRow:
    s = out.stats
    return ReportRow(name, subclass, variant, out.status, s.decision_count,
                     s.backtrack_count, s.expand_calls, millis)


def _timed(fn, *args, **kw):
    t0 = time.perf_counter()
    out = fn(*args, **kw)
    return out, int(round((time.perf_counter() - t0) * 1000))


def _track_job(args):
    name, program, max_decisions = args
    out, ms = _timed(solve_tracking, program, max_decisions=max_decisions)
    return name, out, ms


def _eval_job(args):
    name, program, pol, seed, max_decisions = args
    rows = []
    base, ms = _timed(solve_baseline, program, max_decisions=max_decisions)
    rows.append(_row(name, program.subclass, "baseline", base, ms))
    dspec, ms = _timed(solve_dspec, program, program.subclass, pol, seed, max_decisions)
    rows.append(_row(name, program.subclass, "dspec", dspec, ms))
    return rows, dspec


def _map(fn, jobs, n_jobs):
    if n_jobs and n_jobs > 1:
        with ProcessPoolExecutor(n_jobs) as ex:
            return list(ex.map(fn, jobs))
    return [fn(j) for j in jobs]


def track_all(instances: Sequence[InstanceFile], max_decisions=None, jobs=1) -> list:
    """Solve every instance with choice-point tracking; returns records."""
    results = _map(_track_job, [(i.name, i.program, max_decisions) for i in instances], jobs)
    records = []
    for inst, (name, out, ms) in zip(instances, results):
        records.append(TrainingRecord(inst.subclass, out.decisions, name, (out, ms)))
    return records


def split(records: Sequence[TrainingRecord], threshold, train_side="below", by="decisions"):
    """Partition tracking records into (train, eval) by a cost threshold.

    ``below`` trains on records whose cost is at most ``threshold``;
    ``above`` trains on records whose cost exceeds it.
    """
    if train_side not in ("above", "below"):
        raise ValueError("train_side must be 'above' or 'below'")
    train, held = [], []
    for rec in records:
        out, ms = rec.solve_stats
        cost = out.stats.decision_count if by == "decisions" else ms / 1000.0
        if out.status != MODEL and by == "decisions":
            cost = float("inf")
        is_below = cost <= threshold
        (train if is_below == (train_side == "below") else held).append(rec)
    return train, held


def evaluate(instances: Sequence[InstanceFile], pol: Policy, seed=0, max_decisions=None, jobs=1):
    jobs_ = [(i.name, i.program, pol, seed, max_decisions) for i in instances]
    report = EvalReport()
    outcomes = {}
    for inst, (rows, dspec) in zip(instances, _map(_eval_job, jobs_, jobs)):
        report.rows.extend(rows)
        outcomes[inst.name] = dspec
    return report, outcomes


@dataclass
class Experiment:
    policy: Policy
    report: EvalReport
    train: list
    held_out: list
    dspec: dict


def run_experiment(
    instances: Sequence[InstanceFile],
    delta: int = 1,
    threshold=None,
    train_side: str = "below",
    seed: int = 0,
    by: str = "decisions",
    max_decisions=None,
    jobs: int = 1,
    records=None,
) -> Experiment:
    """Track, split, learn, then compare baseline and guided search on the
    held-out side.  ``threshold=None`` trains on every instance and
    evaluates on none.  Pass ``records`` from :func:`track_all` to skip the
    tracking run."""
    if records is None:
        records = track_all(instances, max_decisions, jobs)
    if threshold is None:
        train, held = list(records), []
    else:
        train, held = split(records, threshold, train_side, by)
    pol = learn_policy(train, delta)
    by_name = {i.name: i for i in instances}
    held_instances = [by_name[r.source] for r in held]
    report, dspec = evaluate(held_instances, pol, seed, max_decisions, jobs)
    return Experiment(pol, report, train, held, dspec)
