import random
from pathlib import Path

import pytest

from aspguide.bench import (
    BOARDS,
    OPPOSITE,
    Board,
    PuzzleInstanceSpec,
    check_plan,
    decode_plan,
    evaluate,
    gen_p1,
    gen_puzzle,
    initial_state,
    puzzle_program,
    run_experiment,
    scramble,
    split,
    track_all,
)
from aspguide.core import GroundProgram, constraint, lit, neg, pos
from aspguide.policy import Policy
from aspguide.propagate import enumerate_stable_models
from aspguide.search import MODEL, NO_MODEL, solve_baseline
from aspguide.textio import InstanceFile, parse_program, render_program


def _named(instances):
    return [InstanceFile(Path(f"i{n:03d}.lp"), inst.program) for n, inst in enumerate(instances)]


def test_board_geometry():
    b = Board(3, 3)
    assert b.legal(b.goal()) == ["down", "right"]
    s = b.apply(b.goal(), "right")
    assert s[0] == 1 and s[1] == 0
    with pytest.raises(ValueError):
        b.apply(b.goal(), "up")


def test_scramble_is_reachable_within_k():
    board = Board(3, 3)
    rng = random.Random(5)
    for k in range(1, 6):
        start = scramble(board, k, rng)
        frontier = {board.goal()}
        seen = set(frontier)
        for _ in range(k):
            frontier = {board.apply(s, d) for s in frontier for d in board.legal(s)} - seen
            seen |= frontier
        assert start in seen


def test_k1_on_small_board_has_exactly_the_undo_models():
    board = Board(*BOARDS["2x2"])
    for seed in range(4):
        inst = gen_puzzle(PuzzleInstanceSpec(1, seed, "2x2"))
        models = enumerate_stable_models(inst.program, atom_limit=64)
        assert models
        start = initial_state(inst.program, board)
        plans = {tuple(decode_plan(m)) for m in models}
        undo = [d for d in board.legal(start) if board.apply(start, d) == board.goal()]
        assert plans == {(d,) for d in undo}
        assert all(check_plan(board, start, list(pl)) for pl in plans)


def _all_models(prog):
    found = []
    while True:
        out = solve_baseline(prog)
        if out.status != MODEL:
            return found
        found.append(out.model)
        everything = [pos(l) for l in out.model] + [neg(l) for l in prog.literals() if l not in out.model]
        prog = GroundProgram(prog.rules + (constraint(*everything),), prog.subclass)


def test_small_board_models_are_exactly_the_solutions():
    # k=2 on the 2x2 board: every model is blocked in turn until none is left,
    # then the decoded plans are compared with a hand enumeration of legal plans
    board = Board(2, 2)
    start = scramble(board, 2, random.Random(3))
    prog = puzzle_program(board, start, 2)
    models = _all_models(prog)
    plans = [tuple(decode_plan(m)) for m in models]
    assert len(plans) == len(set(plans))  # one model per plan
    expected = set()
    options = [None] + sorted(OPPOSITE)
    for a in options:
        for b in options:
            if a is None and b is not None:
                continue  # idling only at the end
            if a is not None and b == OPPOSITE[a]:
                continue  # no immediate undo
            if check_plan(board, start, [a, b]):
                expected.add((a, b))
    assert set(plans) == expected and plans


def test_k0_rejected():
    with pytest.raises(ValueError):
        gen_puzzle(PuzzleInstanceSpec(0, 1))


def test_goal_state_with_k2_is_satisfiable():
    board = Board(3, 3)
    out = solve_baseline(puzzle_program(board, board.goal(), 2))
    assert out.status == MODEL
    assert check_plan(board, board.goal(), decode_plan(out.model))


@pytest.mark.parametrize("k", [3, 5, 7])
def test_generated_puzzles_solve_to_legal_plans(k):
    board = Board(3, 3)
    for seed in range(3):
        inst = gen_puzzle(PuzzleInstanceSpec(k, seed))
        assert inst.subclass == f"k{k}"
        out = solve_baseline(inst.program)
        assert out.status == MODEL
        assert check_plan(board, initial_state(inst.program, board), decode_plan(out.model))


def test_puzzle_round_trip_is_canonical():
    inst = gen_puzzle(PuzzleInstanceSpec(3, 9))
    text = render_program(inst.program)
    again = parse_program(text)
    assert again == inst.program
    assert render_program(again) == text


def test_p1_family():
    assert solve_baseline(gen_p1(0).program).status == NO_MODEL
    models = enumerate_stable_models(gen_p1(2, consistent=True).program, atom_limit=20)
    assert len(models) == 8
    assert all(lit("p") in m and lit("q") not in m for m in models)
    text = render_program(gen_p1(1000).program)
    assert "t(1000)." in text and ":- p, r." in text


def test_p1_records_contribute_nothing():
    recs = track_all(_named([gen_p1(2), gen_p1(3)]))
    pol = run_experiment(_named([gen_p1(2), gen_p1(3)])).policy
    assert all(r.sequence is None for r in recs)
    assert pol.empty


def test_split_sides():
    insts = _named([gen_puzzle(PuzzleInstanceSpec(3, s)) for s in range(6)])
    recs = track_all(insts)
    costs = sorted(r.solve_stats[0].stats.decision_count for r in recs)
    thr = costs[2]
    below, above = split(recs, thr, "below")
    a_train, a_held = split(recs, thr, "above")
    assert {r.source for r in below} == {r.source for r in a_held}
    assert all(r.solve_stats[0].stats.decision_count <= thr for r in below)
    with pytest.raises(ValueError):
        split(recs, thr, "sideways")


def test_experiment_report_structure_and_determinism():
    insts = _named([gen_puzzle(PuzzleInstanceSpec(4, s)) for s in range(6)])
    recs = track_all(insts)
    thr = sorted(r.solve_stats[0].stats.decision_count for r in recs)[3]
    a = run_experiment(insts, threshold=thr)
    b = run_experiment(insts, threshold=thr)
    n_eval = len(a.held_out)
    assert len(a.report.rows) == 2 * n_eval
    assert a.report.to_csv(include_time=False) == b.report.to_csv(include_time=False)
    lines = a.report.to_csv().splitlines()
    assert lines[0] == "instance,subclass,variant,status,decisions,backtracks,expand_calls,millis"
    for row in a.report.rows:
        assert row.subclass == "k4"


def test_all_under_threshold_trained_above_gives_empty_policy():
    insts = _named([gen_puzzle(PuzzleInstanceSpec(3, s)) for s in range(4)])
    exp = run_experiment(insts, threshold=10 ** 9, train_side="above")
    assert exp.policy.empty
    report, _ = evaluate(insts, exp.policy, seed=5)
    base, dspec = report.by_variant("baseline"), report.by_variant("dspec")
    for name in base:
        b, d = base[name], dspec[name]
        assert (b.status, b.decisions, b.backtracks, b.expand_calls) == (
            d.status, d.decisions, d.backtracks, d.expand_calls)


def test_parallel_jobs_give_the_same_report():
    insts = _named([gen_puzzle(PuzzleInstanceSpec(3, s)) for s in range(3)])
    pol = Policy(1, {})
    one, _ = evaluate(insts, pol, jobs=1)
    two, _ = evaluate(insts, pol, jobs=2)
    assert one.to_csv(include_time=False) == two.to_csv(include_time=False)
