"""Deterministic graph constructions for stress tests and benchmarks.

Every generator is a pure function of its parameters: same arguments, same
edge list, byte for byte. Structural facts that tests rely on (layer sizes,
regular degrees, known optimal densities) travel with the graph.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import GraphTooLargeError, InfeasibleParameterError
from .graph_io import EdgeStream


@dataclass(frozen=True)
class GeneratedGraph:
    name: str
    n: int
    edges: tuple
    params: dict = field(default_factory=dict)
    facts: dict = field(default_factory=dict)
    weighted: bool = False
    directed: bool = False

    @property
    def m(self) -> int:
        return len(self.edges)

    def to_stream(self, *, policy: str = "dedupe", spool: str = "memory") -> EdgeStream:
        return EdgeStream.from_edges(
            self.edges,
            n=self.n,
            directed=self.directed,
            weighted=self.weighted,
            policy=policy,
            source=f"<gen:{self.name}>",
            spool=spool,
        )

    def format_edge_list(self) -> str:
        lines = []
        for edge in self.edges:
            if self.weighted:
                u, v, w = edge
                lines.append(f"{u} {v} {w!r}")
            else:
                u, v = edge[0], edge[1]
                lines.append(f"{u} {v}")
        return "\n".join(lines) + ("\n" if lines else "")


def _circulant_layer(offset: int, size: int, degree: int) -> list[tuple[int, int]]:
    """Exactly degree-regular graph on `size` nodes starting at `offset`."""
    edges = []
    if degree == 1:
        half = size // 2
        for j in range(half):
            edges.append((offset + j, offset + j + half))
    else:
        for j in range(size):
            for step in range(1, degree // 2 + 1):
                k = (j + step) % size
                edges.append((offset + j, offset + k))
    return edges


def regular_layers(k: int) -> GeneratedGraph:
    """Disjoint union of k regular layers with geometrically growing degree.

    Layer i (1-based) is 2**(i-1)-regular on 2**(2k+1-i) nodes, realized as
    a circulant (a perfect matching for degree 1), so every layer carries
    exactly 2**(2k-1) edges while its density doubles layer over layer.
    Threshold peeling clears only a few layers per pass on these graphs,
    which makes the pass count grow with k.
    """
    if k < 1:
        raise InfeasibleParameterError("k must be >= 1")
    if k > 12:
        raise GraphTooLargeError("layered construction grows as 4**k; k > 12 refused")
    edges: list[tuple[int, int]] = []
    layers = []
    offset = 0
    for i in range(1, k + 1):
        size = 1 << (2 * k + 1 - i)
        degree = 1 << (i - 1)
        layer_edges = _circulant_layer(offset, size, degree)
        edges.extend(layer_edges)
        layers.append(
            {"index": i, "offset": offset, "size": size, "degree": degree, "edges": len(layer_edges)}
        )
        offset += size
    return GeneratedGraph(
        name=f"layers-k{k}",
        n=offset,
        edges=tuple(edges),
        params={"k": k},
        facts={"layers": layers, "edges_per_layer": 1 << (2 * k - 1)},
    )


def preferential_attachment_weighted(n: int) -> GeneratedGraph:
    """Deterministic rich-get-richer arrival process on a complete graph.

    Node 0 seeds the process; each arrival u connects to every existing
    node v with weight proportional to v's current weighted degree,
    normalized so each arrival contributes total weight 1 (the first edge
    has weight 1 by the seeding convention). The weighted degree sequence
    is heavy-tailed and non-increasing in arrival order.
    """
    if n < 2:
        raise InfeasibleParameterError("need n >= 2")
    if n > 3000:
        raise GraphTooLargeError("complete weighted graph; n > 3000 refused")
    wdeg = [0.0] * n
    edges: list[tuple[int, int, float]] = [(1, 0, 1.0)]
    wdeg[0] = 1.0
    wdeg[1] = 1.0
    for u in range(2, n):
        total = sum(wdeg[:u])
        shares = [wdeg[v] / total for v in range(u)]
        for v, w in enumerate(shares):
            edges.append((u, v, w))
            wdeg[v] += w
        wdeg[u] = 1.0
    return GeneratedGraph(
        name=f"pa-n{n}",
        n=n,
        edges=tuple(edges),
        params={"n": n},
        facts={"total_weight": float(n - 1), "weighted_degrees": tuple(wdeg)},
        weighted=True,
    )


def clique_plus_star(q: int, leaves: int) -> GeneratedGraph:
    """Disjoint q-clique plus a star: the canonical peel-ordering fixture.

    Nodes 0..q-1 form the clique, node q is the star center, the rest are
    leaves. The optimal density is max((q-1)/2, leaves/(leaves+1)).
    """
    if q < 2 or leaves < 0:
        raise InfeasibleParameterError("need q >= 2 and leaves >= 0")
    edges = [(i, j) for i in range(q) for j in range(i + 1, q)]
    center = q
    for leaf in range(leaves):
        edges.append((center, q + 1 + leaf))
    n = q + 1 + leaves if leaves > 0 else q
    optimum = max(Fraction(q - 1, 2), Fraction(leaves, leaves + 1))
    return GeneratedGraph(
        name=f"cliquestar-q{q}-l{leaves}",
        n=n,
        edges=tuple(edges),
        params={"q": q, "leaves": leaves},
        facts={"optimal_density": optimum},
    )


def erdos_renyi(n: int, p: float, seed: int, *, directed: bool = False) -> GeneratedGraph:
    """Seeded uniform random graph; each (ordered) pair present with probability p."""
    rng = random.Random(seed)
    edges = []
    if directed:
        for u in range(n):
            for v in range(n):
                if u != v and rng.random() < p:
                    edges.append((u, v))
    else:
        for u in range(n):
            for v in range(u + 1, n):
                if rng.random() < p:
                    edges.append((u, v))
    return GeneratedGraph(
        name=f"er-n{n}-p{p}-s{seed}{'-d' if directed else ''}",
        n=n,
        edges=tuple(edges),
        params={"n": n, "p": p, "seed": seed},
        directed=directed,
    )
