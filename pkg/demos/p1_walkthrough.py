"""Why the choice of branching literal matters on the P1 family.

P1 is inconsistent because of its first four rules, and the u/v pairs are
irrelevant.  Lookahead spots that both polarities of p fail immediately;
a canonical-order selector starts on u(0), u(1), ... and explores every
combination before reaching p.
"""

import argparse
import time

from aspguide.bench import gen_p1
from aspguide.search import solve_baseline


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=200, help="largest t(X) fact")
    ap.add_argument("--cap", type=int, default=5000, help="decision budget for the naive run")
    args = ap.parse_args()

    program = gen_p1(args.n).program
    for label, naive in (("lookahead", False), ("naive", True)):
        t0 = time.perf_counter()
        out = solve_baseline(program, naive=naive, max_decisions=args.cap)
        s = out.stats
        print(f"{label:9s} status={out.status:8s} decisions={s.decision_count:5d} "
              f"backtracks={s.backtrack_count:5d} {time.perf_counter() - t0:.2f}s")
        print("          first choices:", " ".join(str(e) for e in out.choices[:4]))


if __name__ == "__main__":
    main()
