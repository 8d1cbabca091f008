"""Ground-truth optimum densities for small and mid-size graphs.

Two independent routes compute the undirected optimum: exhaustive subset
enumeration for tiny graphs, and an exact minimum-cut search for graphs
that fit in memory. Both return the optimum as an exact rational together
with a witness whose recounted density equals it.

The same quantity is the value of the classic LP relaxation

    maximize   sum_{(i,j) in E} x_ij
    subject to x_ij <= y_i,  x_ij <= y_j   for every edge (i, j)
               sum_i y_i <= 1
               x, y >= 0

documented here for cross-reference; no LP solver is used. The cut search
instead tests candidate densities g = a/b on an auxiliary network with
integer capacities scaled by b: source -> v with capacity deg(v) * b,
v -> sink with capacity 2a, and a pair of opposite unit arcs (times b)
per edge. A minimum cut whose source side S is nonempty and satisfies
b * |E(S)| > a * |S| certifies an improvement; iterating with g set to the
density of each successive witness is a Newton-style search on a
piecewise-linear function with at most n + 1 segments, so it reaches the
exact optimum in at most n + 1 cut computations.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_flow

from .errors import (
    GraphTooLargeError,
    InfeasibleParameterError,
    InvariantViolationError,
)

UNDIRECTED_BRUTE_LIMIT = 20
DIRECTED_BRUTE_LIMIT = 10
_INT32_SAFE = (1 << 31) - 1


@dataclass(frozen=True)
class OracleResult:
    """Exact undirected optimum with a witness achieving it."""

    optimum: Fraction
    witness: tuple[int, ...]
    method: str


@dataclass(frozen=True)
class DirectedOracleResult:
    """Exact directed optimum, stored as the (edges, |S|, |T|) triple.

    The density value itself is irrational in general; ``optimum`` is the
    float for reporting, while comparisons should use the exact fields.
    """

    edges: int
    n_s: int
    n_t: int
    witness_s: tuple[int, ...]
    witness_t: tuple[int, ...]
    method: str

    @property
    def optimum(self) -> float:
        import math

        return self.edges / math.sqrt(self.n_s * self.n_t)


def _normalize_undirected(n: int, edges: Iterable[tuple]) -> list[tuple[int, int]]:
    seen = set()
    out = []
    for edge in edges:
        u, v = int(edge[0]), int(edge[1])
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
        if u == v:
            continue
        key = (min(u, v), max(u, v))
        if key in seen:
            continue
        seen.add(key)
        out.append(key)
    return out


def _normalize_directed(n: int, edges: Iterable[tuple]) -> list[tuple[int, int]]:
    seen = set()
    out = []
    for edge in edges:
        u, v = int(edge[0]), int(edge[1])
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
        if u == v or (u, v) in seen:
            continue
        seen.add((u, v))
        out.append((u, v))
    return out


def _mask_nodes(mask: int) -> tuple[int, ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def _best_edges_per_size(n: int, edges: Sequence[tuple[int, int]]):
    """For each subset size, the maximum induced edge count and a witness.

    Within one size, densest means most edges, so the scan is pure integer
    work; ties resolve to the lexicographically smallest sorted node list.
    """
    adj = [0] * n
    for u, v in edges:
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    size = 1 << n
    e_table = [0] * size
    best_e = [-1] * (n + 1)
    best_mask = [0] * (n + 1)
    for mask in range(1, size):
        low = mask & -mask
        v = low.bit_length() - 1
        rest = mask ^ low
        e = e_table[rest] + (adj[v] & rest).bit_count()
        e_table[mask] = e
        s = mask.bit_count()
        if e > best_e[s]:
            best_e[s] = e
            best_mask[s] = mask
        elif e == best_e[s] and _mask_nodes(mask) < _mask_nodes(best_mask[s]):
            best_mask[s] = mask
    return best_e, best_mask


def brute_force_undirected(
    n: int, edges: Iterable[tuple], size_floor: int | None = None
) -> OracleResult:
    """Exact optimum by enumerating all nonempty subsets (n <= 20).

    With ``size_floor`` set, only subsets of at least that many nodes
    compete. Ties go to the larger subset, then the lexicographically
    smallest node list.
    """
    if n > UNDIRECTED_BRUTE_LIMIT:
        raise GraphTooLargeError(f"brute force limited to n <= {UNDIRECTED_BRUTE_LIMIT}")
    if n < 1:
        raise InfeasibleParameterError("need at least one node")
    k = 1 if size_floor is None else int(size_floor)
    if not 1 <= k <= n:
        raise InfeasibleParameterError(f"size floor {k} infeasible for n={n}")
    best_e, best_mask = _best_edges_per_size(n, _normalize_undirected(n, edges))
    cur = None  # (Fraction, size, mask)
    for s in range(k, n + 1):
        frac = Fraction(best_e[s], s)
        if cur is None or frac >= cur[0]:
            cur = (frac, s, best_mask[s])
    return OracleResult(optimum=cur[0], witness=_mask_nodes(cur[2]), method="brute")


def brute_force_by_min_size(n: int, edges: Iterable[tuple]) -> dict[int, OracleResult]:
    """One enumeration, all size floors: k -> exact optimum over |S| >= k."""
    if n > UNDIRECTED_BRUTE_LIMIT:
        raise GraphTooLargeError(f"brute force limited to n <= {UNDIRECTED_BRUTE_LIMIT}")
    best_e, best_mask = _best_edges_per_size(n, _normalize_undirected(n, edges))
    out: dict[int, OracleResult] = {}
    cur = None
    for s in range(n, 0, -1):
        frac = Fraction(best_e[s], s)
        if cur is None or frac > cur[0]:
            cur = (frac, s, best_mask[s])
        out[s] = OracleResult(optimum=cur[0], witness=_mask_nodes(cur[2]), method="brute")
    return out


def brute_force_directed(n: int, edges: Iterable[tuple]) -> DirectedOracleResult:
    """Exact directed optimum over all pairs of nonempty subsets (n <= 10).

    The sqrt comparison is decided by squared cross-multiplication in
    exact integers after a vectorized float pass narrows the candidates.
    """
    if n > DIRECTED_BRUTE_LIMIT:
        raise GraphTooLargeError(f"directed brute force limited to n <= {DIRECTED_BRUTE_LIMIT}")
    if n < 1:
        raise InfeasibleParameterError("need at least one node")
    pairs = _normalize_directed(n, edges)
    adj = np.zeros((n, n), dtype=np.int64)
    for u, v in pairs:
        adj[u, v] = 1
    masks = np.arange(1 << n, dtype=np.int64)
    bits = ((masks[:, None] >> np.arange(n)) & 1).astype(np.int64)
    counts = bits.sum(axis=1)
    e_all = bits @ adj @ bits.T
    sub = e_all[1:, 1:].astype(np.float64)
    denom = np.outer(counts[1:], counts[1:]).astype(np.float64)
    ratio_sq = (sub * sub) / denom
    top = float(ratio_sq.max())
    near = np.argwhere(ratio_sq >= top - 1e-9 * max(top, 1.0))
    best = None  # (e, s, t, s_mask, t_mask)
    for si, ti in near:
        s_mask = int(si) + 1
        t_mask = int(ti) + 1
        e = int(e_all[s_mask, t_mask])
        s = int(counts[s_mask])
        t = int(counts[t_mask])
        if best is None or e * e * best[1] * best[2] > best[0] * best[0] * s * t:
            best = (e, s, t, s_mask, t_mask)
    e, s, t, s_mask, t_mask = best
    return DirectedOracleResult(
        edges=e,
        n_s=s,
        n_t=t,
        witness_s=_mask_nodes(s_mask),
        witness_t=_mask_nodes(t_mask),
        method="brute",
    )


def _improving_set(n, edges, deg, g: Fraction):
    """A node set with density strictly above g, or None if none exists.

    Decided by one integer min-cut on the auxiliary network; the witness is
    the maximal source side of the cut.
    """
    a, b = g.numerator, g.denominator
    peak = max(int(deg.max()) * b if n else 0, 2 * a, b)
    if peak > _INT32_SAFE:
        raise GraphTooLargeError("cut capacities exceed 32-bit range")
    source = n
    sink = n + 1
    rows, cols, caps = [], [], []
    for v in range(n):
        if deg[v]:
            rows.append(source)
            cols.append(v)
            caps.append(int(deg[v]) * b)
        rows.append(v)
        cols.append(sink)
        caps.append(2 * a)
    for u, v in edges:
        rows.append(u)
        cols.append(v)
        caps.append(b)
        rows.append(v)
        cols.append(u)
        caps.append(b)
    graph = csr_matrix(
        (np.array(caps, dtype=np.int32), (np.array(rows), np.array(cols))),
        shape=(n + 2, n + 2),
    )
    res = maximum_flow(graph, source, sink)
    flow = res.flow.tocoo()
    flow_of = {}
    for x, y, f in zip(flow.row, flow.col, flow.data):
        if f:
            flow_of[(int(x), int(y))] = int(f)
    # Reverse-reachability to the sink over residual arcs; the complement
    # is the maximal source side of the min cut.
    radj: list[list[int]] = [[] for _ in range(n + 2)]
    for x, y, cap in zip(rows, cols, caps):
        f = flow_of.get((x, y), 0)
        if f < cap:
            radj[y].append(x)  # forward residual x -> y
        if f > 0:
            radj[x].append(y)  # backward residual y -> x
    reach = [False] * (n + 2)
    reach[sink] = True
    stack = [sink]
    while stack:
        y = stack.pop()
        for x in radj[y]:
            if not reach[x]:
                reach[x] = True
                stack.append(x)
    side = [v for v in range(n) if not reach[v]]
    if not side:
        return None
    member = np.zeros(n, dtype=bool)
    member[side] = True
    e_in = sum(1 for u, v in edges if member[u] and member[v])
    if e_in * b > a * len(side):
        return side, e_in
    return None


def exact_flow_undirected(n: int, edges: Iterable[tuple]) -> OracleResult:
    """Exact optimum via iterated min-cut improvement (unweighted graphs).

    Starts from the whole graph's density and repeatedly asks the cut
    network for a strictly denser set, carrying exact rationals throughout.
    Terminates with a proof: the final value admits no improving set.
    """
    if n < 1:
        raise InfeasibleParameterError("need at least one node")
    edges = _normalize_undirected(n, edges)
    m = len(edges)
    deg = np.zeros(n, dtype=np.int64)
    for u, v in edges:
        deg[u] += 1
        deg[v] += 1
    best = Fraction(m, n)
    witness = tuple(range(n))
    if m == 0:
        return OracleResult(optimum=Fraction(0), witness=witness, method="flow")
    for _ in range(n + 2):
        found = _improving_set(n, edges, deg, best)
        if found is None:
            return OracleResult(optimum=best, witness=witness, method="flow")
        side, e_in = found
        candidate = Fraction(e_in, len(side))
        if candidate <= best:
            raise InvariantViolationError("cut search returned a non-improving set")
        best = candidate
        witness = tuple(side)
    raise InvariantViolationError("cut search failed to converge")
