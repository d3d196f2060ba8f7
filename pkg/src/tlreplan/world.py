"""Gridworlds with hidden obstacles and slow cells, and one-cell sensing.

A scenario fixes the ground truth: wall segments (always known), hidden
impassable cells, hidden slow cells, labeled regions, and the start cell.
The robot's belief starts with walls only; sensing at a cell reveals
hidden objects in its 4-neighborhood and reports them as edge changes
against the belief transition system built at simulation start. States are
never removed: a revealed obstacle turns its incoming edges infinite.

Scenario files are JSON:

    {"width": 10, "height": 10,
     "walls": [[[0,4],[0,5]], ...],
     "obstacles": [[2,3], ...], "bumps": [[5,5], ...],
     "regions": {"a": [[1,1]], "b": [[1,8]], ...},
     "start": [1,1], "move_cost": 10, "bump_cost": 50}
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from .labels import APUniverse
from .weights import INF
from .wts import WTS

Cell = tuple[int, int]

DELETE = "delete"
REWEIGHT = "reweight"


@dataclass
class ChangeEvent:
    """One belief-WTS edge change caused by a revealed object."""

    kind: str
    i: int
    j: int
    weight: int | None = None


@dataclass
class GridScenario:
    width: int
    height: int
    walls: set[frozenset]
    obstacles: set[Cell]
    bumps: set[Cell]
    regions: dict[str, set[Cell]]
    start: Cell
    move_cost: int = 10
    bump_cost: int = 50

    def __post_init__(self):
        for cell in [self.start, *self.obstacles, *self.bumps]:
            self._check_bounds(cell)
        for cells in self.regions.values():
            for cell in cells:
                self._check_bounds(cell)
                if cell in self.obstacles:
                    raise ValueError(f"region cell {cell} is an obstacle")
        if self.start in self.obstacles:
            raise ValueError("start cell is an obstacle")
        if self.obstacles & self.bumps:
            raise ValueError("a cell cannot be both obstacle and bump")
        for pair in self.walls:
            a, b = tuple(pair)
            self._check_bounds(a)
            self._check_bounds(b)
            if abs(a[0] - b[0]) + abs(a[1] - b[1]) != 1:
                raise ValueError(f"wall {a}-{b} does not separate adjacent cells")

    def _check_bounds(self, cell: Cell):
        r, c = cell
        if not (0 <= r < self.height and 0 <= c < self.width):
            raise ValueError(f"cell {cell} outside {self.height}x{self.width} grid")

    def cells(self):
        for r in range(self.height):
            for c in range(self.width):
                yield (r, c)

    def wall_between(self, a: Cell, b: Cell) -> bool:
        return frozenset((a, b)) in self.walls

    def neighbors(self, cell: Cell):
        r, c = cell
        for nr, nc in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)):
            if 0 <= nr < self.height and 0 <= nc < self.width:
                yield (nr, nc)


@dataclass
class Belief:
    """What the robot knows so far; grows monotonically."""

    known_obstacles: set[Cell] = field(default_factory=set)
    known_bumps: set[Cell] = field(default_factory=set)
    wts: WTS | None = None
    cell_index: dict[Cell, int] | None = None

    def attach(self, wts: WTS):
        self.wts = wts
        self.cell_index = {cell: i for i, cell in enumerate(wts.coords)}


def to_wts(scenario: GridScenario, belief: Belief, universe: APUniverse) -> WTS:
    """Belief transition system: free cells, 4-neighbor edges, region labels.

    Only regions named in the automaton's universe become label bits; the
    automaton owns the vocabulary, extra regions are inert.
    """
    label_bits = {}
    names = set(universe.names)
    for name, cells in scenario.regions.items():
        if name not in names:
            continue
        bit = 1 << universe.index(name)
        for cell in cells:
            label_bits[cell] = label_bits.get(cell, 0) | bit

    coords = [cell for cell in scenario.cells() if cell not in belief.known_obstacles]
    index = {cell: i for i, cell in enumerate(coords)}
    labels = [label_bits.get(cell, 0) for cell in coords]
    succ: list[dict[int, float]] = [{} for _ in coords]
    for cell in coords:
        i = index[cell]
        for nb in scenario.neighbors(cell):
            j = index.get(nb)
            if j is None or scenario.wall_between(cell, nb):
                continue
            cost = scenario.bump_cost if nb in belief.known_bumps else scenario.move_cost
            succ[i][j] = cost

    if scenario.start in belief.known_obstacles:
        raise ValueError("start cell is believed blocked")
    init = [index[scenario.start]]
    return WTS(universe, len(coords), labels, init, succ, coords=coords)


def initial_belief(scenario: GridScenario) -> Belief:
    """Belief before planning: walls known, plus whatever the start cell sees."""
    belief = Belief()
    sense(scenario, belief, scenario.start)
    return belief


def sense(scenario: GridScenario, belief: Belief, position: Cell) -> list[ChangeEvent]:
    """Reveal hidden objects adjacent to `position`; returns belief-WTS changes.

    Before the belief WTS is built the belief sets are still updated but no
    edge events are produced. Re-sensing known objects yields nothing.
    """
    events: list[ChangeEvent] = []
    for cell in scenario.neighbors(position):
        if cell in scenario.obstacles and cell not in belief.known_obstacles:
            belief.known_obstacles.add(cell)
            events.extend(_in_edge_events(scenario, belief, cell, DELETE, None))
        elif cell in scenario.bumps and cell not in belief.known_bumps:
            belief.known_bumps.add(cell)
            events.extend(_in_edge_events(scenario, belief, cell, REWEIGHT, scenario.bump_cost))
    return events


def _in_edge_events(scenario, belief, cell, kind, weight) -> list[ChangeEvent]:
    if belief.wts is None or belief.cell_index is None:
        return []
    j = belief.cell_index.get(cell)
    if j is None:
        return []
    events = []
    for nb in scenario.neighbors(cell):
        i = belief.cell_index.get(nb)
        if i is None or not belief.wts.has_edge(i, j):
            continue
        events.append(ChangeEvent(kind, i, j, weight))
        belief.wts.set_weight(i, j, INF if kind == DELETE else weight)
    return events


def make_grid_heuristic(pa):
    """Admissible travel estimate: cheapest step cost times Manhattan distance."""
    coords = pa.wts.coords
    if coords is None:
        return None
    step = min((d for _, _, d in pa.wts.edges() if d != INF), default=0)
    nq = pa.nq
    n = pa.n_states

    def h(a: int, b: int) -> int:
        if a >= n or b >= n:
            return 0
        ca = coords[a // nq]
        cb = coords[b // nq]
        return step * (abs(ca[0] - cb[0]) + abs(ca[1] - cb[1]))

    return h


# ---------------------------------------------------------------------------
# Scenario I/O


def scenario_from_dict(data: dict) -> GridScenario:
    return GridScenario(
        width=data["width"],
        height=data["height"],
        walls={frozenset((tuple(a), tuple(b))) for a, b in data.get("walls", [])},
        obstacles={tuple(c) for c in data.get("obstacles", [])},
        bumps={tuple(c) for c in data.get("bumps", [])},
        regions={name: {tuple(c) for c in cells} for name, cells in data.get("regions", {}).items()},
        start=tuple(data["start"]),
        move_cost=data.get("move_cost", 10),
        bump_cost=data.get("bump_cost", 50),
    )


def scenario_to_dict(scenario: GridScenario) -> dict:
    return {
        "width": scenario.width,
        "height": scenario.height,
        "walls": sorted(sorted(pair) for pair in scenario.walls),
        "obstacles": sorted(scenario.obstacles),
        "bumps": sorted(scenario.bumps),
        "regions": {name: sorted(cells) for name, cells in sorted(scenario.regions.items())},
        "start": list(scenario.start),
        "move_cost": scenario.move_cost,
        "bump_cost": scenario.bump_cost,
    }


def load_scenario(path) -> GridScenario:
    with open(path, encoding="utf-8") as fh:
        return scenario_from_dict(json.load(fh))


def save_scenario(scenario: GridScenario, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scenario_to_dict(scenario), fh, indent=1)
        fh.write("\n")


# ---------------------------------------------------------------------------
# Random benchmark maps


def random_map(seed: int, n: int, density: float, nba=None, retries: int = 200,
               allow_infeasible: bool = False, bump_density: float = 0.0) -> GridScenario:
    """Random n-by-n map: one region cell per quadrant, scattered hidden objects.

    Regeneration repeats with derived seeds until the ground truth admits a
    violation-free run (checked against `nba` when given, otherwise by free
    connectivity of the region cells).
    """
    if not 0 <= density < 1:
        raise ValueError(f"density must be in [0, 1), got {density}")
    if n < 4:
        raise ValueError(f"map size must be at least 4, got {n}")
    for attempt in range(retries):
        rng = random.Random(seed * 1000003 + attempt)
        half = n // 2
        quads = {
            "a": ((0, half), (0, half)),
            "b": ((0, half), (half, n)),
            "c": ((half, n), (half, n)),
            "d": ((half, n), (0, half)),
        }
        region_cells = {}
        for name, ((r0, r1), (c0, c1)) in quads.items():
            region_cells[name] = (rng.randrange(r0, r1), rng.randrange(c0, c1))
        protected = set(region_cells.values())
        obstacles = set()
        bumps = set()
        for r in range(n):
            for c in range(n):
                cell = (r, c)
                if cell in protected:
                    continue
                roll = rng.random()
                if roll < density:
                    obstacles.add(cell)
                elif bump_density and roll < density + bump_density:
                    bumps.add(cell)
        scenario = GridScenario(
            width=n, height=n, walls=set(),
            obstacles=obstacles, bumps=bumps,
            regions={name: {cell} for name, cell in region_cells.items()},
            start=region_cells["a"],
        )
        if allow_infeasible or _ground_truth_feasible(scenario, nba):
            return scenario
    raise RuntimeError(f"no feasible map found for seed {seed} after {retries} attempts")


def _ground_truth_feasible(scenario: GridScenario, nba) -> bool:
    belief = Belief(known_obstacles=set(scenario.obstacles),
                    known_bumps=set(scenario.bumps))
    if nba is None:
        return _regions_connected(scenario)
    try:
        wts = to_wts(scenario, belief, nba.universe)
    except ValueError:
        return False
    return _accepting_lasso_exists(wts, nba)


def _regions_connected(scenario: GridScenario) -> bool:
    free = {cell for cell in scenario.cells() if cell not in scenario.obstacles}
    targets = {cell for cells in scenario.regions.values() for cell in cells}
    stack = [scenario.start]
    seen = {scenario.start}
    while stack:
        cell = stack.pop()
        for nb in scenario.neighbors(cell):
            if nb in free and nb not in seen and not scenario.wall_between(cell, nb):
                seen.add(nb)
                stack.append(nb)
    return targets <= seen


def _accepting_lasso_exists(wts: WTS, nba) -> bool:
    """Plain-mode feasibility: a reachable accepting product state on a cycle."""
    succ = _product_succ(wts, nba)
    start_states = [(pi, q0) for pi in wts.init for q0 in nba.initial]
    reachable = _bfs(succ, start_states)
    accepting = [s for s in reachable if s[1] in set(nba.accepting)]
    for acc in accepting:
        back = _bfs(succ, succ(acc))
        if acc in back:
            return True
    return False


def _product_succ(wts: WTS, nba):
    cache: dict[int, list] = {}

    def pairs_for(bits: int):
        pairs = cache.get(bits)
        if pairs is None:
            pairs = [(qm, qn) for qm, qn in nba.pairs() if bits in nba.chi_bits(qm, qn)]
            cache[bits] = pairs
        return pairs

    by_label = {}
    for qm, qn in nba.pairs():
        by_label.setdefault(qm, set()).add(qn)

    def succ(state):
        pi, qm = state
        out = []
        for pj, d in wts.succ[pi].items():
            if d == INF:
                continue
            bits = wts.labels[pj]
            for pm, pn in pairs_for(bits):
                if pm == qm:
                    out.append((pj, pn))
        return out

    return succ


def _bfs(succ, sources):
    seen = set(sources)
    stack = list(sources)
    while stack:
        s = stack.pop()
        for t in succ(s):
            if t not in seen:
                seen.add(t)
                stack.append(t)
    return seen
