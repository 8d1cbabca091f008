"""Shared corpora and helpers for the test suite.

The seeded random-graph corpora and their exhaustive optimum tables are
expensive to build, so they are session-scoped and shared between the
module tests and the acceptance suite.
"""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

import densepeel as dp


def pass_bound(num: int, den: int, eps: Fraction) -> int:
    """ceil(log_{1+eps}(num/den)) + 1, in exact rational arithmetic."""
    base = 1 + eps
    t = 0
    cur = Fraction(1)
    while cur * den < num:
        cur *= base
        t += 1
    return t + 1


def powerlaw_graph(n: int, seed: int, attach: int = 2) -> dp.EdgeStream:
    """Seeded rich-get-richer graph: heavy-tailed degrees, about attach*n edges."""
    rng = random.Random(seed)
    edges = [(0, 1), (1, 2), (0, 2)]
    repeated = [0, 1, 2, 0, 1, 2]
    for u in range(3, n):
        chosen = set()
        while len(chosen) < attach:
            chosen.add(repeated[rng.randrange(len(repeated))])
        for v in chosen:
            edges.append((u, v))
            repeated.append(v)
        repeated.extend([u] * attach)
    return dp.EdgeStream.from_edges(edges, n=n)


def k_clique_edges(q: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(q) for j in range(i + 1, q)]


@pytest.fixture(scope="session")
def er_corpus() -> list[dp.GeneratedGraph]:
    """Seeded undirected corpus: n <= 18, the stated edge probabilities, m >= 1."""
    graphs = []
    for n in (6, 8, 10, 12, 14, 16, 18):
        for p in (0.1, 0.2, 0.3, 0.5):
            for seed in range(8):
                g = dp.erdos_renyi(n, p, seed)
                if g.m >= 1:
                    graphs.append(g)
    assert len(graphs) >= 200
    return graphs


@pytest.fixture(scope="session")
def er_streams(er_corpus) -> dict[str, dp.EdgeStream]:
    return {g.name: g.to_stream() for g in er_corpus}


@pytest.fixture(scope="session")
def brute_tables(er_corpus) -> dict[str, dict[int, dp.OracleResult]]:
    """Per graph: k -> exact optimum over subsets of size >= k."""
    return {g.name: dp.brute_force_by_min_size(g.n, g.edges) for g in er_corpus}


@pytest.fixture(scope="session")
def digraph_corpus() -> list[dp.GeneratedGraph]:
    graphs = []
    for n in (4, 6, 8, 10):
        for p in (0.15, 0.3):
            for seed in range(15):
                g = dp.erdos_renyi(n, p, seed, directed=True)
                if g.m >= 1:
                    graphs.append(g)
    assert len(graphs) >= 100
    return graphs
