"""Learn a choice-point policy on 8-puzzle instances and evaluate it.

Instances are scrambled k moves from the goal.  Every instance is solved
once with decision tracking; the cheaper ones (up to the given percentile
of decision counts) train the policy and the rest are solved again with
and without it.
"""

import argparse
import statistics
from pathlib import Path

from aspguide.bench import PuzzleInstanceSpec, gen_puzzle, run_experiment, track_all
from aspguide.textio import InstanceFile


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k", type=int, default=10)
    ap.add_argument("--count", type=int, default=60)
    ap.add_argument("--seed", type=int, default=1000)
    ap.add_argument("--percentile", type=float, default=0.6)
    ap.add_argument("--delta", type=int, default=1)
    ap.add_argument("--csv", help="write the per-instance report here")
    args = ap.parse_args()

    instances = [
        InstanceFile(Path(f"p{i:03d}.lp"), gen_puzzle(PuzzleInstanceSpec(args.k, args.seed + i)).program)
        for i in range(args.count)
    ]
    records = track_all(instances)
    costs = sorted(r.solve_stats[0].stats.decision_count for r in records)
    threshold = costs[max(0, int(args.percentile * len(costs)) - 1)]
    exp = run_experiment(instances, args.delta, threshold, "below", records=records)

    base = exp.report.by_variant("baseline")
    guided = exp.report.by_variant("dspec")
    wins = sum(guided[n].decisions < base[n].decisions for n in base)
    print(f"threshold {threshold} decisions: {len(exp.train)} training, {len(base)} held out")
    print(f"median decisions  baseline {statistics.median(r.decisions for r in base.values())}"
          f"  guided {statistics.median(r.decisions for r in guided.values())}")
    print(f"guided strictly better on {wins}/{len(base)}")
    hits = [exp.dspec[n].stats.hit_rate for n in base]
    print(f"mean policy hit rate {statistics.mean(hits):.2f}" if hits else "no held-out instances")
    if args.csv:
        Path(args.csv).write_text(exp.report.to_csv())


if __name__ == "__main__":
    main()
