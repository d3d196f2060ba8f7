"""Sense -> replan -> move simulation loop and machine-readable traces.

The robot follows its planner's run one edge at a time. Arriving at a cell
it senses the 4-neighborhood; newly revealed objects become product-edge
changes and trigger a timed replan. A traversal finishes after the
configured number of loop completions, or halts in place when even the
relaxed product admits no accepting run.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field

from .baselines import IterativeReplanner, LocalRevisionReplanner, solve_fresh
from .planner import LTLDStarPlanner, NoAcceptingRun
from .product import PLAIN, RELAXED, build_product, build_relaxed_product
from .weights import INF
from .world import (GridScenario, initial_belief, make_grid_heuristic, sense,
                    to_wts)

ALGO_LTL_DSTAR = "ltl-dstar"
ALGO_ITERATIVE = "iterative"
ALGO_LOCAL = "local-revision"
ALGORITHMS = (ALGO_LTL_DSTAR, ALGO_ITERATIVE, ALGO_LOCAL)

CSV_HEADER = ["event", "phase", "mod_size", "wall_time_ns", "expansions",
              "total_violation", "total_travel"]


@dataclass
class EventRow:
    index: int
    phase: str
    mod_size: int
    wall_time_ns: int
    expansions: int
    total_violation: float
    total_travel: float


@dataclass
class RecordedEvent:
    """Enough context to replay one replanning event into another algorithm."""

    state: int
    phase: str
    mod: list


@dataclass
class TraceReport:
    algo: str
    mode: str
    beta: int
    width: int
    height: int
    loops_requested: int
    completed: bool = False
    infeasible: bool = False
    loops_done: int = 0
    steps: int = 0
    initial_ns: int = 0
    initial_expansions: int = 0
    initial_violation: float = 0
    initial_travel: float = 0
    traversed_violation: int = 0
    traversed_travel: int = 0
    fallbacks: int = 0
    events: list[EventRow] = field(default_factory=list)
    recorded: list[RecordedEvent] = field(default_factory=list, repr=False)

    def replan_times_ns(self) -> list[int]:
        return [e.wall_time_ns for e in self.events]

    def to_json_dict(self) -> dict:
        return {
            "algo": self.algo,
            "mode": self.mode,
            "beta": self.beta,
            "width": self.width,
            "height": self.height,
            "loops_requested": self.loops_requested,
            "completed": self.completed,
            "infeasible": self.infeasible,
            "loops_done": self.loops_done,
            "steps": self.steps,
            "initial_ns": self.initial_ns,
            "initial_expansions": self.initial_expansions,
            "initial_violation": _jsonable(self.initial_violation),
            "initial_travel": _jsonable(self.initial_travel),
            "traversed_violation": self.traversed_violation,
            "traversed_travel": self.traversed_travel,
            "fallbacks": self.fallbacks,
            "events": [
                {
                    "event": e.index,
                    "phase": e.phase,
                    "mod_size": e.mod_size,
                    "wall_time_ns": e.wall_time_ns,
                    "expansions": e.expansions,
                    "total_violation": _jsonable(e.total_violation),
                    "total_travel": _jsonable(e.total_travel),
                }
                for e in self.events
            ],
        }


def _jsonable(x):
    return None if x == INF else x


def _csv_cell(x):
    return "inf" if x == INF else x


def write_trace_json(report: TraceReport, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report.to_json_dict(), fh, indent=1)
        fh.write("\n")


def write_trace_csv(report: TraceReport, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for e in report.events:
            writer.writerow([e.index, e.phase, e.mod_size, e.wall_time_ns, e.expansions,
                             _csv_cell(e.total_violation), _csv_cell(e.total_travel)])


def build_world(scenario: GridScenario, nba, mode: str):
    """Belief at time zero plus the matching product automaton."""
    belief = initial_belief(scenario)
    wts = to_wts(scenario, belief, nba.universe)
    belief.attach(wts)
    builder = build_product if mode == PLAIN else build_relaxed_product
    return belief, builder(wts, nba)


def make_planner(algo: str, pa, beta: int):
    if algo == ALGO_LTL_DSTAR:
        return LTLDStarPlanner(pa, beta, heuristic=make_grid_heuristic(pa))
    if algo == ALGO_ITERATIVE:
        return IterativeReplanner(pa, beta)
    if algo == ALGO_LOCAL:
        return LocalRevisionReplanner(pa, beta)
    raise ValueError(f"unknown algorithm {algo!r}; pick one of {ALGORITHMS}")


def simulate(scenario: GridScenario, nba, beta: int = 10, mode: str = PLAIN,
             algo: str = ALGO_LTL_DSTAR, loops: int = 1,
             replan_hook=None, record: bool = False) -> TraceReport:
    """Run one full mission; mode 'auto' plans on the relaxed product."""
    build_mode = RELAXED if mode in (RELAXED, "auto") else PLAIN
    belief, pa = build_world(scenario, nba, build_mode)
    planner = make_planner(algo, pa, beta)
    report = TraceReport(algo=algo, mode=mode, beta=beta, width=scenario.width,
                         height=scenario.height, loops_requested=loops)

    t0 = time.perf_counter_ns()
    try:
        run = planner.plan_initial()
    except NoAcceptingRun:
        report.initial_ns = time.perf_counter_ns() - t0
        report.infeasible = True
        return report
    report.initial_ns = time.perf_counter_ns() - t0
    report.initial_expansions = planner.last_expansions
    report.initial_violation, report.initial_travel = run.total
    if replan_hook is not None:
        replan_hook("initial", planner, run, [])

    coords = pa.wts.coords
    nq = pa.nq
    max_steps = loops * scenario.width * scenario.height * 50 + 1000
    event_index = 0

    while report.loops_done < loops:
        cur = planner.current_state
        nxt = planner.peek_next()
        wv, wt = pa.succ[cur][nxt]
        if wt == INF:
            raise RuntimeError(f"run traverses a deleted edge {cur}->{nxt}")
        report.traversed_violation += wv
        report.traversed_travel += wt
        lap_done = planner.advance()
        report.steps += 1
        if report.steps > max_steps:
            raise RuntimeError("simulation exceeded its step budget")
        if lap_done:
            report.loops_done += 1
            if report.loops_done >= loops:
                break
        cell = coords[planner.current_state // nq]
        events = sense(scenario, belief, cell)
        if not events:
            continue
        mod = []
        for ev in events:
            mod.extend(pa.map_wts_change(ev))
        if record:
            report.recorded.append(
                RecordedEvent(planner.current_state, planner.phase, list(mod)))
        phase = planner.phase
        t0 = time.perf_counter_ns()
        try:
            run = planner.replan(mod)
        except NoAcceptingRun:
            dt = time.perf_counter_ns() - t0
            report.events.append(EventRow(event_index, phase, len(mod), dt,
                                          planner.last_expansions, INF, INF))
            report.infeasible = True
            report.fallbacks = getattr(planner, "fallbacks", 0)
            if replan_hook is not None:
                replan_hook("infeasible", planner, None, mod)
            return report
        dt = time.perf_counter_ns() - t0
        report.events.append(EventRow(event_index, phase, len(mod), dt,
                                      planner.last_expansions,
                                      run.total.violation, run.total.travel))
        if replan_hook is not None:
            replan_hook("replan", planner, run, mod)
        event_index += 1

    report.completed = True
    report.fallbacks = getattr(planner, "fallbacks", 0)
    return report


def replay_iterative(scenario: GridScenario, nba, recorded, beta: int = 10,
                     mode: str = PLAIN) -> TraceReport:
    """Feed a recorded event stream to from-scratch Dijkstra replanning.

    Gives the baseline the identical change sets and robot states that the
    incremental planner saw, so per-event totals and timings compare
    one-to-one.
    """
    build_mode = RELAXED if mode in (RELAXED, "auto") else PLAIN
    _belief, pa = build_world(scenario, nba, build_mode)
    report = TraceReport(algo=ALGO_ITERATIVE, mode=mode, beta=beta,
                         width=scenario.width, height=scenario.height,
                         loops_requested=0)
    t0 = time.perf_counter_ns()
    run, pops = solve_fresh(pa, list(pa.initial), beta)
    report.initial_ns = time.perf_counter_ns() - t0
    report.initial_expansions = pops
    report.initial_violation, report.initial_travel = run.total
    for i, ev in enumerate(recorded):
        t0 = time.perf_counter_ns()
        pa.apply_changes(ev.mod)
        try:
            run, pops = solve_fresh(pa, [ev.state], beta)
            dt = time.perf_counter_ns() - t0
            report.events.append(EventRow(i, ev.phase, len(ev.mod), dt, pops,
                                          run.total.violation, run.total.travel))
        except NoAcceptingRun:
            dt = time.perf_counter_ns() - t0
            report.events.append(EventRow(i, ev.phase, len(ev.mod), dt, 0, INF, INF))
            report.infeasible = True
            return report
    report.completed = True
    return report
