"""Command-line entry point: ``aspguide <subcommand> ...``.

Exit codes: 0 success, 10 no model, 1 usage error, 2 I/O or format error,
3 resource limit reached.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .bench import (
    BOARDS,
    PuzzleInstanceSpec,
    evaluate,
    gen_p1,
    gen_puzzle,
    split,
    track_all,
)
from .core import GroundProgram
from .policy import learn_policy
from .postp import ReservedAtomError, UnresolvedAuxError, mock_ground, postprocess
from .search import LIMIT, MODEL, solve_baseline, solve_dspec
from .textio import (
    ParseError,
    PolicyFormatError,
    load_policy,
    parse_program,
    read_instance,
    render_program,
    save_policy,
    write_instance,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_LIMIT = 3
EXIT_NO_MODEL = 10


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def _read_program(path) -> GroundProgram:
    with open(path) as f:
        return parse_program(f)


def _write_text(path, text: str) -> None:
    Path(path).write_text(text)


def _instances(directory):
    d = Path(directory)
    if not d.is_dir():
        raise OSError(f"not a directory: {d}")
    files = sorted(d.glob("*.lp"))
    if not files:
        raise OSError(f"no .lp instances in {d}")
    return [read_instance(f) for f in files]


def format_model(model) -> str:
    return " ".join(str(l) for l in sorted(model))


def cmd_solve(args) -> int:
    p = _read_program(args.file)
    timeout = args.timeout_secs
    if args.policy:
        pol = load_policy(args.policy)
        if args.delta is not None:
            pol = pol.with_delta(args.delta)
        out = solve_dspec(p, p.subclass, pol, args.seed, args.max_decisions, timeout)
    elif args.delta is not None:
        raise _UsageError("--delta requires --policy")
    else:
        out = solve_baseline(p, None, args.max_decisions, timeout)
    if out.status == MODEL:
        print(format_model(out.model))
    elif out.status == LIMIT:
        print("UNKNOWN")
    else:
        print("UNSATISFIABLE")
    if args.stats:
        s = out.stats
        print(
            f"status={out.status} decisions={s.decision_count} backtracks={s.backtrack_count} "
            f"expand_calls={s.expand_calls} policy_hits={s.policy_hits}",
            file=sys.stderr,
        )
    return {MODEL: EXIT_OK, LIMIT: EXIT_LIMIT}.get(out.status, EXIT_NO_MODEL)


def cmd_learn(args) -> int:
    insts = _instances(args.instances)
    records = track_all(insts, args.max_decisions, args.jobs)
    if args.threshold_decisions is not None:
        train, _ = split(records, args.threshold_decisions, args.train_side, "decisions")
    elif args.threshold_secs is not None:
        train, _ = split(records, args.threshold_secs, args.train_side, "secs")
    else:
        train = records
    pol = learn_policy(train, args.delta)
    save_policy(pol, args.out)
    print(f"learned from {sum(r.sequence is not None for r in train)} of {len(records)} instances",
          file=sys.stderr)
    return EXIT_OK


def cmd_eval(args) -> int:
    insts = _instances(args.instances)
    pol = load_policy(args.policy)
    report, _ = evaluate(insts, pol, args.seed, args.max_decisions, args.jobs)
    _write_text(args.report, report.to_csv(include_time=not args.no_time))
    for variant in ("baseline", "dspec"):
        print(f"{variant}: median decisions {report.median_decisions(variant)}", file=sys.stderr)
    return EXIT_OK


def cmd_postp(args) -> int:
    _write_text(args.output, render_program(postprocess(_read_program(args.file))))
    return EXIT_OK


def cmd_mockground(args) -> int:
    _write_text(args.output, render_program(mock_ground(_read_program(args.file), args.aux_seed)))
    return EXIT_OK


def cmd_gen_puzzle(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for i in range(args.count):
        inst = gen_puzzle(PuzzleInstanceSpec(args.k, args.seed + i, args.board))
        write_instance(inst, out / f"puzzle_k{args.k}_{i:04d}.lp")
    return EXIT_OK


def cmd_gen_p1(args) -> int:
    write_instance(gen_p1(args.n, args.consistent), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="aspguide", description="Answer set solving with learned choice-point policies.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="search for one stable model")
    s.add_argument("file", help="ground program")
    s.add_argument("--policy", help="policy file; enables guided search")
    s.add_argument("--delta", type=int, help="override the policy's window width")
    s.add_argument("--seed", type=int, default=0, help="tie-break seed for guided search")
    s.add_argument("--max-decisions", type=int, help="give up (exit 3) after this many choices")
    s.add_argument("--timeout-secs", type=float)
    s.add_argument("--stats", action="store_true", help="print search counters to stderr")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("learn", help="learn a policy from an instance directory")
    s.add_argument("--instances", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--delta", type=int, default=1)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--threshold-decisions", type=int, help="split instances by tracked decision count")
    g.add_argument("--threshold-secs", type=float)
    s.add_argument("--train-side", choices=("above", "below"), default="below",
                   help="which side of the threshold to learn from")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--max-decisions", type=int)
    s.set_defaults(func=cmd_learn)

    s = sub.add_parser("eval", help="compare baseline and guided search")
    s.add_argument("--instances", required=True)
    s.add_argument("--policy", required=True)
    s.add_argument("--report", required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--max-decisions", type=int)
    s.add_argument("--no-time", action="store_true", help="write 0 in the millis column")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("postp", help="rename grounder auxiliary atoms")
    s.add_argument("file")
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_postp)

    s = sub.add_parser("mockground", help="translate bounded choice rules")
    s.add_argument("file")
    s.add_argument("-o", "--output", required=True)
    s.add_argument("--aux-seed", type=int, default=0)
    s.set_defaults(func=cmd_mockground)

    gen = sub.add_parser("gen", help="generate benchmark instances")
    gsub = gen.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    s = gsub.add_parser("puzzle")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--count", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--board", choices=sorted(BOARDS), default="3x3")
    s.set_defaults(func=cmd_gen_puzzle)
    s = gsub.add_parser("p1")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--consistent", action="store_true")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_gen_p1)
    return ap


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        args = build_parser().parse_args(argv)
        for name in ("jobs", "count", "n", "k", "delta"):
            v = getattr(args, name, None)
            if v is not None and v < 1 and not (name == "k" and v == 0):
                raise _UsageError(f"--{name} must be positive")
        return args.func(args)
    except _UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ParseError, PolicyFormatError, UnresolvedAuxError, ReservedAtomError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
