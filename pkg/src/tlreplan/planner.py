"""Prefix-suffix replanning over a product automaton.

One incremental search per accepting state finds its cheapest loop by
mirroring the accepting state's incoming edges onto an imaginary goal; a
main incremental search then reaches an overall imaginary goal whose
incoming edges carry the loop costs scaled by the suffix weighting. On a
change set, loops are repaired incrementally; the main search keeps its
tree (shifting the key drift accumulator) while the agent is still on the
prefix, and restarts from the current state once the agent is inside the
loop, so the traversed part stays behind as history and the remainder is
re-optimized globally.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .dstar import INF_W, OverlayGraph, SearchInstance, path_weight
from .weights import INF, Weight

PREFIX = "prefix"
SUFFIX = "suffix"


class NoAcceptingRun(Exception):
    """No accepting state has both a reachable prefix and a finite loop."""


@dataclass
class Run:
    prefix: list[int]
    suffix: list[int]
    accepting: int
    prefix_cost: Weight
    suffix_cost: Weight
    total: Weight

    def states(self) -> list[int]:
        """Prefix followed by one loop traversal (shared state deduplicated)."""
        return self.prefix + self.suffix[1:]


def total_cost(run: Run, beta: int) -> Weight:
    """Prefix weight plus beta-scaled loop weight, componentwise."""
    if not run.prefix_cost.finite or not run.suffix_cost.finite:
        return Weight(INF, INF)
    return run.prefix_cost + run.suffix_cost.scale(beta)


@dataclass
class SuffixRecord:
    k: int
    acc: int
    img: int
    graph: OverlayGraph
    instance: SearchInstance
    cost: tuple
    loop: list[int] | None = field(default=None)

    def get_loop(self) -> list[int]:
        """Loop through the accepting state; extracted on demand."""
        if self.loop is None:
            if self.cost[1] == INF:
                self.loop = []
            else:
                path = self.instance.extract_path(self.acc)
                self.loop = path[:-1] + [self.acc]
        return self.loop


class RunFollower:
    """Cursor over the active run: prefix once, then the loop forever."""

    def __init__(self):
        self.run: Run | None = None
        self._seq: list[int] = []
        self._pos = 0
        self._suffix_start = 0

    def _set_run(self, run: Run):
        self.run = run
        self._seq = run.states()
        self._pos = 0
        self._suffix_start = len(run.prefix) - 1

    def _start_state(self) -> int:
        raise NotImplementedError

    @property
    def current_state(self) -> int:
        if self.run is None:
            return self._start_state()
        return self._seq[self._pos]

    @property
    def phase(self) -> str:
        if self.run is None:
            return PREFIX
        return SUFFIX if self._pos >= self._suffix_start else PREFIX

    def peek_next(self) -> int:
        nxt = self._pos + 1
        if nxt >= len(self._seq):
            nxt = self._suffix_start + 1
        return self._seq[nxt]

    def advance(self) -> bool:
        """Move one step along the run; True when a loop traversal completes."""
        nxt = self._pos + 1
        if nxt >= len(self._seq):
            nxt = self._suffix_start + 1
        self._pos = nxt
        return nxt == len(self._seq) - 1


class LTLDStarPlanner(RunFollower):
    """Incremental optimal planner for prefix-suffix runs."""

    def __init__(self, pa, beta: int = 10, heuristic=None, log_pops: bool = False):
        super().__init__()
        if beta < 1:
            raise ValueError(f"beta must be a positive integer, got {beta}")
        self.pa = pa
        self.beta = beta
        self._log_pops = log_pops
        n = pa.n_states
        self.synth_start = n
        self.global_img = n + 1
        self._base_h = heuristic
        self.records: list[SuffixRecord] = []
        self._rec_by_acc: dict[int, SuffixRecord] = {}
        self.main: SearchInstance | None = None
        self.main_graph: OverlayGraph | None = None
        self._counter = [0]
        self.last_expansions = 0

    def _start_state(self) -> int:
        return self.pa.initial[0] if len(self.pa.initial) == 1 else self.synth_start

    # -- heuristic wrapping ----------------------------------------------------

    @property
    def _h(self):
        """Grid heuristics already map virtual ids to zero; the synthetic
        start additionally aliases to the first concrete initial state."""
        base = self._base_h
        if base is None or len(self.pa.initial) == 1:
            return base
        synth = self.synth_start
        alias = self.pa.initial[0]

        def h(a: int, b: int) -> int:
            if a == synth:
                a = alias
            if b == synth:
                b = alias
            return base(a, b)

        return h

    # -- suffix searches ---------------------------------------------------------

    def suffix_initialize(self, k: int) -> SuffixRecord:
        """Set up and solve the loop search for accepting state index k."""
        pa = self.pa
        acc = pa.accepting[k]
        img = pa.n_states + 2 + k
        graph = OverlayGraph(pa)
        graph.add_virtual(img)
        for p in pa.pred[acc]:
            graph.set_extra(p, img, pa.succ[p][acc])
        inst = SearchInstance(graph, start=acc, goal=img, log_pops=self._log_pops,
                              counter=self._counter)
        inst.compute_shortest_path()
        return SuffixRecord(k, acc, img, graph, inst, inst.cost_from(acc))

    def suffix_replan(self, rec: SuffixRecord, mod) -> bool:
        """Repair one loop search after a change set; True if its cost moved."""
        if mod:
            mirrors = [(ch.u, ch.weight) for ch in mod if ch.v == rec.acc]
            sources = {ch.u for ch in mod}
            self._suffix_update(rec, mirrors, sources)
        old = rec.cost
        rec.cost = rec.instance.cost_from(rec.acc)
        return rec.cost != old

    def _suffix_update(self, rec: SuffixRecord, mirrors, sources, force=False):
        if mirrors:
            for u, w in mirrors:
                rec.graph.set_extra(u, rec.img, w)
        rec.instance.note_changed_edges(sources, force=force)
        rec.instance.compute_shortest_path()
        rec.loop = None

    # -- planning ------------------------------------------------------------------

    def plan_initial(self) -> Run:
        pa = self.pa
        before = self._expansion_total()
        self.records = [self.suffix_initialize(k) for k in range(len(pa.accepting))]
        self._rec_by_acc = {rec.acc: rec for rec in self.records}
        start = self._start_state()
        self.main_graph = self._build_main_graph(start)
        self.main = SearchInstance(
            self.main_graph, start=start, goal=self.global_img,
            heuristic=self._h, log_pops=self._log_pops, counter=self._counter,
        )
        self.main.compute_shortest_path()
        self.last_expansions = self._expansion_total() - before
        return self._extract_run()

    def replan(self, mod) -> Run:
        """Incorporate a change set and re-derive the optimal run."""
        if self.main is None:
            raise RuntimeError("plan_initial must run before replan")
        if not mod:
            return self.run
        before = self._expansion_total()
        created = self.pa.apply_changes(mod)
        sources = {ch.u for ch in mod}
        sources_seq = tuple(sources)
        mirrors_by_acc: dict[int, list] = {}
        for ch in mod:
            mirrors_by_acc.setdefault(ch.v, []).append((ch.u, ch.weight))
        skip_ok = not created  # brand-new edges invalidate the untouched shortcut
        changed = []
        for rec in self.records:
            mirrors = mirrors_by_acc.get(rec.acc)
            if mirrors is None and skip_ok:
                rhs = rec.instance.rhs
                # a loop search that never reached any rewritten source
                # cannot be affected; its cost is unchanged by construction
                if len(rhs) == 1 or not any(u in rhs for u in sources_seq):
                    continue
            self._suffix_update(rec, mirrors or (), sources, force=not skip_ok)
            old = rec.cost
            rec.cost = rec.instance.cost_from(rec.acc)
            if rec.cost != old:
                changed.append(rec)
        current = self.current_state
        if self.phase == PREFIX:
            beta = self.beta
            for rec in changed:
                self.main_graph.set_extra(rec.acc, self.global_img, _scaled(rec.cost, beta))
                self.main.update_vertex(rec.acc)
            self.main.move_start(current)
            self.main.note_changed_edges(sources, force=not skip_ok)
        else:
            self.main_graph = self._build_main_graph(current)
            self.main = SearchInstance(
                self.main_graph, start=current, goal=self.global_img,
                heuristic=self._h, log_pops=self._log_pops, counter=self._counter,
            )
        self.main.compute_shortest_path()
        self.last_expansions = self._expansion_total() - before
        return self._extract_run()

    def _build_main_graph(self, start: int) -> OverlayGraph:
        graph = OverlayGraph(self.pa)
        graph.add_virtual(self.global_img)
        beta = self.beta
        for rec in self.records:
            graph.set_extra(rec.acc, self.global_img, _scaled(rec.cost, beta))
        if start == self.synth_start:
            graph.add_virtual(self.synth_start)
            for s0 in self.pa.initial:
                graph.set_extra(self.synth_start, s0, (0, 0))
        return graph

    def _extract_run(self) -> Run:
        cost = self.main.cost_from()
        if cost[1] == INF:
            raise NoAcceptingRun("no accepting state is reachable with a finite loop")
        path = self.main.extract_path()
        acc = path[-2]
        prefix = path[:-1]
        if prefix and prefix[0] == self.synth_start:
            prefix = prefix[1:]
        rec = self._rec_by_acc[acc]
        loop = list(rec.get_loop())
        prefix_cost = Weight(*path_weight(self.main_graph, prefix))
        run = Run(prefix, loop, acc, prefix_cost, Weight(*rec.cost),
                  prefix_cost + Weight(*rec.cost).scale(self.beta))
        self._set_run(run)
        return run

    def _expansion_total(self) -> int:
        return self._counter[0]


def _scaled(cost: tuple, beta: int) -> tuple:
    if cost[1] == INF:
        return INF_W
    return (cost[0] * beta, cost[1] * beta)
