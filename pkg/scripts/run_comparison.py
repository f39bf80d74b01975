#!/usr/bin/env python3
"""Reproduce the headline paired comparison on a site preset.

Runs N seeded paired missions (planner vs fixed-circle baseline against
identical worlds), writes summaries + report, and prints the aggregate.

    python scripts/run_comparison.py --seeds 50 --out out/comparison
"""

import argparse
import json
import sys
import time
from pathlib import Path

REPO = Path(__file__).resolve().parents[1]

from soarsim.environment import load_scenario_file, scenario_from_dict
from soarsim.experiment import ConfigBundle, ExperimentPlan, run_sweep, summaries_to_json, write_report
from soarsim.mission import mission_from_dict
from soarsim.params import (
    airframe_from_params,
    baseline_from_params,
    noise_from_params,
    parse_param_file,
    planner_from_params,
    prior_from_params,
    resolve_params,
)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--scenario", default=str(REPO / "scenarios" / "field.json"))
    parser.add_argument("--params", help="optional KEY=VALUE param file")
    parser.add_argument("--seeds", type=int, default=50)
    parser.add_argument("--seed-start", type=int, default=1)
    parser.add_argument("--baseline-reps", type=int, default=1)
    parser.add_argument("--out", default="out/comparison")
    args = parser.parse_args()

    data = load_scenario_file(args.scenario)
    sc = scenario_from_dict(data)
    params = resolve_params(parse_param_file(args.params) if args.params else None)
    bundle = ConfigBundle(
        mission=mission_from_dict(data["mission"], params),
        airframe=airframe_from_params(params),
        noise=noise_from_params(params),
        prior=prior_from_params(params),
        planner=planner_from_params(params, sink_s0=sc.sink_s0),
        baseline=baseline_from_params(params),
    )
    seeds = tuple(range(args.seed_start, args.seed_start + args.seeds))
    t0 = time.time()
    summaries = run_sweep(sc, bundle, ExperimentPlan(seeds=seeds, baseline_reps=args.baseline_reps))
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    summaries_to_json(summaries, out_dir / "summaries.json")
    (out_dir / "seeds.json").write_text(json.dumps({"seeds": list(seeds)}, sort_keys=True) + "\n")
    aggregate = write_report(summaries, out_dir / "report.csv", out_dir / "report.json")
    print(json.dumps(aggregate, indent=2, sort_keys=True))
    print(f"\n{len(seeds)} paired missions in {time.time() - t0:.0f}s -> {out_dir}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
