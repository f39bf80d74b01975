"""Paired-mission evaluation harness and report emission.

Flight time alone conflates controller skill with airframe/battery/site
effects, so every thermalling flight is normalized by the matching
no-soaring baseline time: rel_gain = flight_time / baseline_time. Paired
missions fly two UAVs against the identical world realization with
independent sensor noise; the controller-to-slot assignment alternates
between flights. Paired flights where exactly one UAV ever entered
THERMALLING are flagged excluded (the difference is then pure detection
luck, not controller skill).
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, replace
from pathlib import Path

from .baseline import BaselineConfig
from .belief import GaussianBelief, NoiseConfig
from .dynamics import AirframeParams
from .environment import Scenario, calm_variant, materialize
from .mission import BASELINE, POMDSOAR, MissionConfig, run_flight, with_controller
from .pomdsoar import PlannerConfig

REPORT_SCHEMA_VERSION = 1
DRAW_MARGIN_PP = 1.0  # |gain difference| below this is a draw, percentage points
SLOT_NAMES = ("A", "B")


@dataclass(frozen=True)
class FlightSummary:
    flight_id: str
    site: str
    controller: str
    airframe: str
    flight_time: float  # s (or any unit shared with baseline_time)
    baseline_time: float
    thermal_encounters: int = 0
    excluded: bool = False

    @property
    def rel_gain(self) -> float:
        return self.flight_time / self.baseline_time

    @property
    def gain_pct(self) -> float:
        return (self.rel_gain - 1.0) * 100.0


@dataclass(frozen=True)
class ExperimentPlan:
    """A seed manifest plus the swap schedule for a paired sweep."""

    seeds: tuple[int, ...]
    baseline_reps: int = 3
    site: str = ""

    def controller_for_slot(self, flight_index: int, slot: int) -> str:
        # alternate the assignment so each controller flies each slot equally
        if (flight_index + slot) % 2 == 0:
            return POMDSOAR
        return BASELINE


@dataclass
class ConfigBundle:
    """Everything a mission needs besides the scenario."""

    mission: MissionConfig
    airframe: AirframeParams
    noise: NoiseConfig
    prior: GaussianBelief
    planner: PlannerConfig
    baseline: BaselineConfig


def exclusion_flag(encounters_a: int, encounters_b: int) -> bool:
    """A paired flight is excluded when exactly one UAV ever thermalled;
    the flight-time difference is then detection luck, not controller skill."""
    return (encounters_a == 0) != (encounters_b == 0)


def run_baseline(sc: Scenario, bundle: ConfigBundle, repetitions: int = 3, seed: int | None = None) -> float:
    """Mean no-soaring flight duration over repetitions, s.

    Uses the calm variant of the scenario (thermals and turbulence
    removed) with soaring disabled, mirroring baseline measurement
    flights on still days.
    """
    calm = calm_variant(sc)
    cfg = replace(bundle.mission, soaring_enabled=False)
    seed = sc.seed if seed is None else seed
    times = []
    for rep in range(repetitions):
        rec = run_flight(
            calm,
            cfg,
            bundle.airframe,
            bundle.noise,
            bundle.prior,
            bundle.planner,
            bundle.baseline,
            seed=seed + rep,
            slot=0,
        )
        times.append(rec.flight_time)
    return sum(times) / len(times)


def run_paired(
    sc: Scenario,
    bundle: ConfigBundle,
    seed: int,
    flight_id: str,
    swap: bool = False,
    baseline_reps: int = 3,
    baseline_time: float | None = None,
    telemetry_sinks=(None, None),
) -> tuple[FlightSummary, FlightSummary]:
    """Fly both controllers simultaneously against one world realization.

    Slot assignment: pomdsoar flies slot 0 unless swap. Both UAVs share
    the materialized thermals and wind; sensor-noise and planner streams
    are per slot, so swapping controllers swaps which stream each
    controller experiences but never the world itself.
    """
    world_sc = materialize(sc, seed)
    if baseline_time is None:
        baseline_time = run_baseline(world_sc, bundle, repetitions=baseline_reps, seed=seed)
    controllers = (BASELINE, POMDSOAR) if swap else (POMDSOAR, BASELINE)
    summaries = []
    for slot, controller in enumerate(controllers):
        cfg = with_controller(bundle.mission, controller)
        rec = run_flight(
            world_sc,
            cfg,
            bundle.airframe,
            bundle.noise,
            bundle.prior,
            bundle.planner,
            bundle.baseline,
            seed=seed,
            slot=slot,
            telemetry_sink=telemetry_sinks[slot],
        )
        summaries.append(
            FlightSummary(
                flight_id=flight_id,
                site=bundle.mission.site,
                controller=controller,
                airframe=SLOT_NAMES[slot],
                flight_time=rec.flight_time,
                baseline_time=baseline_time,
                thermal_encounters=rec.thermal_encounters,
            )
        )
    if exclusion_flag(summaries[0].thermal_encounters, summaries[1].thermal_encounters):
        summaries = [replace(s, excluded=True) for s in summaries]
    return summaries[0], summaries[1]


def run_sweep(sc: Scenario, bundle: ConfigBundle, plan: ExperimentPlan) -> list[FlightSummary]:
    """Run one paired mission per seed, alternating the slot assignment."""
    out: list[FlightSummary] = []
    for i, seed in enumerate(plan.seeds):
        a, b = run_paired(
            sc,
            bundle,
            seed=seed,
            flight_id=f"{i + 1:03d}",
            swap=plan.controller_for_slot(i, 0) != POMDSOAR,
            baseline_reps=plan.baseline_reps,
        )
        out.extend([a, b])
    return out


def sign_test_p(wins: int, decisive: int) -> float:
    """Two-sided exact binomial sign test at p = 1/2."""
    if decisive == 0:
        return 1.0
    k = max(wins, decisive - wins)
    tail = sum(math.comb(decisive, j) for j in range(k, decisive + 1)) / 2.0**decisive
    return min(1.0, 2.0 * tail)


def report(summaries: list[FlightSummary]) -> tuple[list[dict], dict]:
    """Per-flight rows plus the aggregate comparison.

    Wins/losses are decided on baseline-corrected gains with a 1
    percentage point draw margin; raw flight times are tallied alongside
    because the two rankings can differ.
    """
    if not summaries:
        raise ValueError("report needs at least one flight summary")
    rows = [
        {
            "flight_id": s.flight_id,
            "site": s.site,
            "controller": s.controller,
            "airframe": s.airframe,
            "flight_time": s.flight_time,
            "baseline_time": s.baseline_time,
            "rel_gain": s.rel_gain,
            "gain_pct": s.gain_pct,
            "thermal_encounters": s.thermal_encounters,
            "excluded": s.excluded,
        }
        for s in sorted(summaries, key=lambda s: (s.flight_id, s.controller))
    ]

    by_flight: dict[str, dict[str, FlightSummary]] = {}
    for s in summaries:
        by_flight.setdefault(s.flight_id, {})[s.controller] = s

    wins = {POMDSOAR: 0, BASELINE: 0}
    raw_wins = {POMDSOAR: 0, BASELINE: 0}
    draws = 0
    raw_draws = 0
    excluded = 0
    gains: dict[str, list[float]] = {POMDSOAR: [], BASELINE: []}
    for fid in sorted(by_flight):
        pair = by_flight[fid]
        if len(pair) != 2:
            continue
        p, b = pair[POMDSOAR], pair[BASELINE]
        if p.excluded or b.excluded:
            excluded += 1
            continue
        gains[POMDSOAR].append(p.rel_gain)
        gains[BASELINE].append(b.rel_gain)
        diff = p.gain_pct - b.gain_pct
        if abs(diff) < DRAW_MARGIN_PP:
            draws += 1
        elif diff > 0:
            wins[POMDSOAR] += 1
        else:
            wins[BASELINE] += 1
        if p.flight_time == b.flight_time:
            raw_draws += 1
        elif p.flight_time > b.flight_time:
            raw_wins[POMDSOAR] += 1
        else:
            raw_wins[BASELINE] += 1

    decisive = wins[POMDSOAR] + wins[BASELINE]
    aggregate = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "flights": len(by_flight),
        "excluded": excluded,
        "wins": wins,
        "draws": draws,
        "raw_time_wins": raw_wins,
        "raw_time_draws": raw_draws,
        "median_rel_gain": {
            c: (_median(g) if g else None) for c, g in gains.items()
        },
        "sign_test_p": sign_test_p(wins[POMDSOAR], decisive) if decisive else None,
    }
    return rows, aggregate


def _median(values: list[float]) -> float:
    v = sorted(values)
    n = len(v)
    mid = n // 2
    return v[mid] if n % 2 else 0.5 * (v[mid - 1] + v[mid])


CSV_COLUMNS = [
    "flight_id",
    "site",
    "controller",
    "airframe",
    "flight_time",
    "baseline_time",
    "rel_gain",
    "gain_pct",
    "thermal_encounters",
    "excluded",
]


def write_report(summaries: list[FlightSummary], csv_path: str | Path, json_path: str | Path) -> dict:
    rows, aggregate = report(summaries)
    csv_path, json_path = Path(csv_path), Path(json_path)
    with csv_path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    json_path.write_text(json.dumps(aggregate, indent=2, sort_keys=True) + "\n")
    return aggregate


def summaries_to_json(summaries: list[FlightSummary], path: str | Path) -> None:
    payload = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "summaries": [asdict(s) for s in summaries],
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def summaries_from_json(path: str | Path) -> list[FlightSummary]:
    data = json.loads(Path(path).read_text())
    return [FlightSummary(**entry) for entry in data["summaries"]]
