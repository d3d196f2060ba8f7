import random
from pathlib import Path

import pytest

from tlreplan.dstar import DictGraph
from tlreplan.hoa import parse_nba_file

ASSETS = Path(__file__).resolve().parent.parent / "src" / "tlreplan" / "assets"


@pytest.fixture(scope="session")
def seq_nba():
    return parse_nba_file(ASSETS / "sequence_abcd.hoa")


@pytest.fixture(scope="session")
def seq_nba_anchored():
    return parse_nba_file(ASSETS / "sequence_abcd_anchored.hoa")


@pytest.fixture(scope="session")
def seq_nba_32():
    return parse_nba_file(ASSETS / "sequence_abcd_32.hoa")


def random_weighted_graph(rng: random.Random, n: int = 64, avg_degree: float = 3.0,
                          max_violation: int = 0, zero_violation_chain: bool = False):
    """Random directed graph with (violation, travel) weights.

    With zero_violation_chain, a 0 -> 1 -> ... -> n-1 chain of clean edges
    guarantees a violation-free route to the last node.
    """
    g = DictGraph(n)
    if zero_violation_chain:
        for u in range(n - 1):
            g.add_edge(u, u + 1, (0, rng.randint(1, 9) * 10))
    n_edges = int(n * avg_degree)
    for _ in range(n_edges):
        u = rng.randrange(n)
        v = rng.randrange(n)
        if u == v or (zero_violation_chain and v == u + 1):
            continue
        viol = rng.randint(0, max_violation) if max_violation else 0
        g.add_edge(u, v, (viol, rng.randint(1, 9) * 10))
    return g


def reverse_dijkstra_cost(graph, goal):
    """Independent cost-to-goal map: lexicographic Dijkstra over reversed edges."""
    from tlreplan.baselines import lex_dijkstra
    dist, _ = lex_dijkstra(lambda u: graph.pred_items(u), [goal])
    return dist
