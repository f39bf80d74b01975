"""Command-line harness: single missions, baselines, paired flights,
seed sweeps, and report emission.

Exit codes: 0 success, 2 configuration error, 3 simulation error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .environment import Scenario, materialize, scenario_from_dict, load_scenario_file
from .experiment import (
    ConfigBundle,
    ExperimentPlan,
    run_baseline,
    run_paired,
    run_sweep,
    summaries_from_json,
    summaries_to_json,
    write_report,
)
from .mission import BASELINE, POMDSOAR, mission_from_dict, run_flight, with_controller
from .params import (
    ConfigError,
    airframe_from_params,
    baseline_from_params,
    noise_from_params,
    parse_param_file,
    planner_from_params,
    prior_from_params,
    resolve_params,
)


def _load_inputs(args) -> tuple[Scenario, ConfigBundle, dict]:
    data = load_scenario_file(args.scenario)
    sc = scenario_from_dict(data)
    overrides = parse_param_file(args.params) if args.params else {}
    params = resolve_params(overrides)
    if "mission" not in data:
        raise ConfigError(f"{args.scenario} has no 'mission' section")
    mission = mission_from_dict(data["mission"], params)
    bundle = ConfigBundle(
        mission=mission,
        airframe=airframe_from_params(params),
        noise=noise_from_params(params),
        prior=prior_from_params(params),
        planner=planner_from_params(params, sink_s0=sc.sink_s0),
        baseline=baseline_from_params(params),
    )
    if getattr(args, "seed", None) is not None:
        sc = replace(sc, seed=args.seed)
    return sc, bundle, params


def _jsonl_sink(path: Path):
    fh = path.open("w")

    def sink(record: dict):
        fh.write(json.dumps(record) + "\n")

    sink.close = fh.close
    return sink


def cmd_run(args) -> int:
    sc, bundle, _ = _load_inputs(args)
    world = materialize(sc, sc.seed)
    cfg = with_controller(bundle.mission, args.controller)
    sink = _jsonl_sink(Path(args.out)) if args.out else None
    try:
        rec = run_flight(
            world,
            cfg,
            bundle.airframe,
            bundle.noise,
            bundle.prior,
            bundle.planner,
            bundle.baseline,
            seed=sc.seed,
            slot=args.slot,
            telemetry_sink=sink,
        )
    finally:
        if sink is not None:
            sink.close()
    out = {
        "controller": args.controller,
        "seed": sc.seed,
        "flight_time": rec.flight_time,
        "energy_used": rec.energy_used,
        "thermal_encounters": rec.thermal_encounters,
        "crashed": rec.crashed,
        "mode_seconds": rec.mode_seconds,
    }
    print(json.dumps(out, indent=2, sort_keys=True))
    return 0


def cmd_baseline(args) -> int:
    sc, bundle, _ = _load_inputs(args)
    world = materialize(sc, sc.seed)
    time = run_baseline(world, bundle, repetitions=args.reps, seed=sc.seed)
    out = {"baseline_time": time, "repetitions": args.reps, "seed": sc.seed}
    if args.out:
        Path(args.out).write_text(json.dumps(out, indent=2, sort_keys=True) + "\n")
    print(json.dumps(out, indent=2, sort_keys=True))
    return 0


def cmd_paired(args) -> int:
    sc, bundle, _ = _load_inputs(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    sinks = [None, None]
    if not args.no_telemetry:
        sinks = [_jsonl_sink(out_dir / f"flight_slot{slot}.jsonl") for slot in (0, 1)]
    try:
        a, b = run_paired(
            sc,
            bundle,
            seed=sc.seed,
            flight_id=args.flight_id,
            swap=args.swap,
            baseline_reps=args.baseline_reps,
            telemetry_sinks=tuple(sinks),
        )
    finally:
        for s in sinks:
            if s is not None:
                s.close()
    summaries_to_json([a, b], out_dir / "summaries.json")
    print((out_dir / "summaries.json").read_text(), end="")
    return 0


def cmd_sweep(args) -> int:
    sc, bundle, _ = _load_inputs(args)
    seeds = tuple(range(args.seed_start, args.seed_start + args.count))
    plan = ExperimentPlan(seeds=seeds, baseline_reps=args.baseline_reps, site=bundle.mission.site)
    summaries = run_sweep(sc, bundle, plan)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    summaries_to_json(summaries, out_dir / "summaries.json")
    (out_dir / "seeds.json").write_text(json.dumps({"seeds": list(seeds)}, sort_keys=True) + "\n")
    aggregate = write_report(summaries, out_dir / "report.csv", out_dir / "report.json")
    print(json.dumps(aggregate, indent=2, sort_keys=True))
    return 0


def cmd_report(args) -> int:
    summaries = []
    for path in args.summaries:
        summaries.extend(summaries_from_json(path))
    aggregate = write_report(summaries, args.out_csv, args.out_json)
    print(json.dumps(aggregate, indent=2, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="soarsim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=True):
        p.add_argument("--scenario", required=True, help="scenario/mission JSON file")
        p.add_argument("--params", help="KEY=VALUE param file")
        if seed:
            p.add_argument("--seed", type=int, help="override the scenario seed")

    p = sub.add_parser("run", help="fly one mission")
    common(p)
    p.add_argument("--controller", choices=[POMDSOAR, BASELINE], default=POMDSOAR)
    p.add_argument("--slot", type=int, default=0, help="noise-stream slot (0 or 1)")
    p.add_argument("--out", help="telemetry JSONL path")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("baseline", help="measure the no-soaring baseline time")
    common(p)
    p.add_argument("--reps", type=int, default=3)
    p.add_argument("--out", help="JSON output path")
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("paired", help="fly both controllers against one world")
    common(p)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--flight-id", default="001")
    p.add_argument("--swap", action="store_true", help="give the baseline slot 0")
    p.add_argument("--baseline-reps", type=int, default=3)
    p.add_argument("--no-telemetry", action="store_true")
    p.set_defaults(func=cmd_paired)

    p = sub.add_parser("sweep", help="paired missions over a seed range")
    common(p, seed=False)
    p.add_argument("--seed-start", type=int, default=1)
    p.add_argument("--count", type=int, default=50)
    p.add_argument("--baseline-reps", type=int, default=3)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("report", help="aggregate flight summaries into CSV + JSON")
    p.add_argument("--summaries", nargs="+", required=True)
    p.add_argument("--out-csv", required=True)
    p.add_argument("--out-json", required=True)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad usage, which matches the config-error code
        return int(exc.code) if exc.code else 0
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - surface as a simulation failure
        print(f"simulation error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
