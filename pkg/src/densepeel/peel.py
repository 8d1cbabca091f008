"""Multi-pass greedy peeling for undirected density.

Each pass rescans the edge source to rebuild induced degrees for the
surviving node set, records the current density, and removes every node
whose degree sits at or below a density-scaled threshold. The variant with
a minimum result size removes only a fixed quota of the weakest candidates
per pass and stops updating its answer once the survivor set is too small.

In unweighted mode all densities are exact rationals and every threshold
comparison is evaluated by integer cross-multiplication with the slack
parameter carried as a fraction p/q, so boundary ties (degree exactly at
the threshold) behave identically everywhere. Weighted mode uses floats.

The best node set seen across passes is returned only after an independent
recount of its density from a fresh scan; a mismatch raises rather than
returning a wrong answer.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import (
    EmptyGraphError,
    InfeasibleParameterError,
    InvariantViolationError,
    UndefinedDensityError,
)
from .graph_io import EdgeStream

_INT64_SAFE = 1 << 62


def as_exact_fraction(eps) -> Fraction:
    """Normalize a slack parameter to an exact nonnegative Fraction.

    Strings and ints are parsed exactly; floats are read as the decimal
    they print as (so 0.1 means 1/10, not the nearest binary double).
    """
    if isinstance(eps, float):
        eps = Fraction(repr(eps))
    else:
        eps = Fraction(eps)
    if eps < 0:
        raise InfeasibleParameterError(f"eps must be >= 0, got {eps}")
    return eps


def density(edges_alive, n_alive: int):
    """Induced density: edge count (or total weight) divided by node count.

    Integer inputs give an exact Fraction; float input gives a float.
    """
    if n_alive <= 0:
        raise UndefinedDensityError("density of the empty node set is undefined")
    if isinstance(edges_alive, (int, np.integer)):
        return Fraction(int(edges_alive), int(n_alive))
    return edges_alive / n_alive


@dataclass
class PeelState:
    """Live node set plus induced degrees and edge totals for one run."""

    alive: np.ndarray  # bool per node
    deg: np.ndarray  # int64 (unweighted) or float64 (weighted)
    edges_alive: object  # int or float, matching deg
    n_alive: int
    weighted: bool

    @classmethod
    def full(cls, n: int, weighted: bool) -> "PeelState":
        dtype = np.float64 if weighted else np.int64
        return cls(
            alive=np.ones(n, dtype=bool),
            deg=np.zeros(n, dtype=dtype),
            edges_alive=0.0 if weighted else 0,
            n_alive=n,
            weighted=weighted,
        )

    def alive_ids(self) -> np.ndarray:
        return np.nonzero(self.alive)[0]


@dataclass(frozen=True)
class PassTrace:
    """One peeling pass: the set it saw and what it removed."""

    pass_index: int
    n_alive: int
    edges_alive: object
    density: object
    removed: int


@dataclass(frozen=True)
class DenseResult:
    """Best node set found, its independently recounted density, and the trace."""

    best_set: tuple[int, ...]
    best_density: object
    trace: tuple[PassTrace, ...]
    passes: int


def _check_handshake(state: PeelState) -> None:
    total = state.deg.sum()
    if state.weighted:
        target = 2.0 * state.edges_alive
        if abs(float(total) - target) > 1e-9 * max(1.0, abs(target)):
            raise InvariantViolationError(
                f"degree sum {total} != twice edge weight {target}"
            )
    elif int(total) != 2 * int(state.edges_alive):
        raise InvariantViolationError(
            f"degree sum {int(total)} != twice edge count {state.edges_alive}"
        )


def refresh_degrees(stream: EdgeStream, state: PeelState) -> PeelState:
    """Rebuild induced degrees of the alive set from a full scan.

    Only edges with both endpoints alive count. Results are committed to
    the state only after the scan finishes, so an aborted scan leaves the
    previous state intact.
    """
    n = stream.n
    if state.weighted:
        deg = np.zeros(n, dtype=np.float64)
        total = 0.0
    else:
        deg = np.zeros(n, dtype=np.int64)
        total = 0
    alive = state.alive
    for block in stream.iter_blocks():
        u = block["u"].astype(np.int64)
        v = block["v"].astype(np.int64)
        mask = alive[u] & alive[v]
        if not mask.any():
            continue
        uu = u[mask]
        vv = v[mask]
        if state.weighted:
            ww = block["w"][mask]
            deg += np.bincount(uu, weights=ww, minlength=n)
            deg += np.bincount(vv, weights=ww, minlength=n)
            total += float(ww.sum())
        else:
            deg += np.bincount(uu, minlength=n)
            deg += np.bincount(vv, minlength=n)
            total += int(mask.sum())
    state.deg = deg
    state.edges_alive = total
    _check_handshake(state)
    return state


def threshold_removals(
    deg: np.ndarray,
    alive: np.ndarray,
    n_alive: int,
    edges_alive,
    eps: Fraction,
    weighted: bool,
) -> np.ndarray:
    """Ids of alive nodes with degree <= 2(1+eps) * density, ascending.

    Unweighted comparisons are exact: deg * q * |S| <= 2(p+q) * |E(S)|
    for eps = p/q.
    """
    if weighted:
        thr = 2.0 * (1.0 + float(eps)) * edges_alive / n_alive
        mask = alive & (deg <= thr)
    else:
        p, q = eps.numerator, eps.denominator
        rhs = 2 * (p + q) * int(edges_alive)
        scale = q * int(n_alive)
        peak = int(deg.max()) if len(deg) else 0
        if scale < _INT64_SAFE and peak * scale < _INT64_SAFE and rhs < _INT64_SAFE:
            mask = alive & (deg * scale <= rhs)
        else:
            mask = np.zeros_like(alive)
            for i in np.nonzero(alive)[0]:
                mask[i] = int(deg[i]) * scale <= rhs
    return np.nonzero(mask)[0]


def peel_pass(state: PeelState, eps) -> np.ndarray:
    """Removal set for one pass: every alive node at or below the threshold.

    Always nonempty: some node sits at or below the average degree, which
    the threshold dominates. (Weighted mode forces the minimum-degree node
    if float rounding ever leaves the set empty.)
    """
    if state.n_alive < 1:
        raise UndefinedDensityError("peel_pass on an empty node set")
    eps = as_exact_fraction(eps)
    ids = threshold_removals(
        state.deg, state.alive, state.n_alive, state.edges_alive, eps, state.weighted
    )
    if len(ids) == 0:
        if not state.weighted:
            raise InvariantViolationError("exact threshold produced an empty removal set")
        ids = _weakest(state, 1)
    return ids


def _weakest(state: PeelState, count: int) -> np.ndarray:
    alive_ids = state.alive_ids()
    order = np.lexsort((alive_ids, state.deg[alive_ids]))
    return np.sort(alive_ids[order[:count]])


def _apply_removal(state: PeelState, ids: np.ndarray) -> None:
    state.alive[ids] = False
    state.deg[ids] = 0
    state.n_alive -= len(ids)


def recount_density(stream: EdgeStream, member: np.ndarray):
    """Recompute the induced density of a node set from a fresh scan."""
    size = int(member.sum())
    if size == 0:
        raise UndefinedDensityError("cannot recount the empty set")
    total = 0.0 if stream.weighted else 0
    for block in stream.iter_blocks():
        u = block["u"].astype(np.int64)
        v = block["v"].astype(np.int64)
        mask = member[u] & member[v]
        if not mask.any():
            continue
        if stream.weighted:
            total += float(block["w"][mask].sum())
        else:
            total += int(mask.sum())
    return density(total, size)


def _finalize(stream, best_mask, best_rho, trace) -> DenseResult:
    recount = recount_density(stream, best_mask)
    if stream.weighted:
        ok = abs(recount - best_rho) <= 1e-9 * max(1.0, abs(best_rho))
    else:
        ok = recount == best_rho
    if not ok:
        raise InvariantViolationError(
            f"recounted density {recount} != tracked best {best_rho}"
        )
    peak = max(row.density for row in trace)
    if best_rho != peak:
        raise InvariantViolationError("best density does not match the trace maximum")
    best_set = tuple(int(i) for i in np.nonzero(best_mask)[0])
    return DenseResult(
        best_set=best_set,
        best_density=best_rho,
        trace=tuple(trace),
        passes=len(trace),
    )


def undirected_peel_loop(
    state: PeelState,
    eps: Fraction,
    refresh: Callable[[PeelState], None],
):
    """Shared pass loop: refresh, record, peel, until the alive set empties.

    Used by the streaming, in-memory, and sharded executors so that their
    traces agree bit for bit. Returns (trace, best_mask, best_density).
    """
    trace: list[PassTrace] = []
    best_rho = None
    best_mask = None
    pass_idx = 0
    refresh(state)
    while state.n_alive > 0:
        pass_idx += 1
        rho = density(state.edges_alive, state.n_alive)
        if best_rho is None or rho > best_rho:
            best_rho = rho
            best_mask = state.alive.copy()
        removal = peel_pass(state, eps)
        trace.append(
            PassTrace(pass_idx, state.n_alive, state.edges_alive, rho, len(removal))
        )
        _apply_removal(state, removal)
        if state.n_alive == 0:
            break
        refresh(state)
    return trace, best_mask, best_rho


def densest_undirected(stream: EdgeStream, eps, *, engine: str = "stream") -> DenseResult:
    """Approximately densest subgraph by threshold peeling.

    One pass per trace row. For eps = p/q > 0 every pass removes strictly
    more than a p/(p+q) fraction of the surviving nodes, so the number of
    passes is logarithmic in n; eps = 0 is allowed and still terminates
    (at least one node leaves per pass) but only the trivial n-pass bound
    holds. The returned density is within a factor 2(1+eps) of optimal.

    ``engine="inmemory"`` keeps an adjacency structure and updates degrees
    by decrements instead of rescanning; traces are identical. Unweighted
    streams only.
    """
    if stream.m < 1:
        raise EmptyGraphError("densest_undirected needs at least one edge")
    eps = as_exact_fraction(eps)
    state = PeelState.full(stream.n, stream.weighted)
    if engine == "stream":
        refresh = lambda st: refresh_degrees(stream, st)
    elif engine == "inmemory":
        if stream.weighted:
            raise InfeasibleParameterError(
                "the in-memory engine supports unweighted streams only"
            )
        refresh = _inmemory_refresher(stream)
    else:
        raise ValueError(f"unknown engine {engine!r}")
    trace, best_mask, best_rho = undirected_peel_loop(state, eps, refresh)
    return _finalize(stream, best_mask, best_rho, trace)


def _inmemory_refresher(stream: EdgeStream) -> Callable[[PeelState], None]:
    """Degree provider that loads adjacency once and then decrements.

    Removal batches are replayed node by node so that edges inside a batch
    are subtracted exactly once; the resulting degree table matches a full
    rescan of the survivors exactly.
    """
    u, v, _ = stream.edge_arrays()
    n = stream.n
    heads = np.concatenate([u, v])
    tails = np.concatenate([v, u])
    order = np.argsort(heads, kind="stable")
    indices = tails[order]
    counts = np.bincount(heads, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    holder = {"prev": None, "edges": 0}

    def refresh(state: PeelState) -> None:
        if holder["prev"] is None:
            state.deg = counts.astype(np.int64)
            state.edges_alive = stream.m
        else:
            work_alive = holder["prev"]
            deg = state.deg
            edges = holder["edges"]
            newly = np.nonzero(work_alive & ~state.alive)[0]
            for i in newly:
                nbrs = indices[indptr[i] : indptr[i + 1]]
                live = nbrs[work_alive[nbrs]]
                if len(live):
                    np.subtract.at(deg, live, 1)
                    edges -= len(live)
                work_alive[i] = False
                deg[i] = 0
            state.edges_alive = edges
        holder["prev"] = state.alive.copy()
        holder["edges"] = state.edges_alive
        _check_handshake(state)

    return refresh


def densest_at_least_k(stream: EdgeStream, k: int, eps) -> DenseResult:
    """Densest subgraph among sets of at least k nodes, by quota peeling.

    Per pass, candidates are the nodes at or below the usual threshold,
    but only ceil(eps/(1+eps) * |S|) of them leave, lowest degree first
    with node-id tiebreak. The answer updates only while |S| >= k, and the
    loop stops once the survivor set drops below k. Requires eps > 0 so
    that the quota is positive. The result is within 3(1+eps) of the best
    size-constrained density, and within 2(1+eps) whenever some optimal
    witness has more than k nodes.
    """
    eps = as_exact_fraction(eps)
    if eps == 0:
        raise InfeasibleParameterError("the size-constrained variant needs eps > 0")
    if k < 1:
        raise InfeasibleParameterError(f"k must be >= 1, got {k}")
    if k > stream.n:
        raise InfeasibleParameterError(f"k={k} exceeds node count n={stream.n}")
    if stream.m < 1:
        raise EmptyGraphError("densest_at_least_k needs at least one edge")
    p, q = eps.numerator, eps.denominator
    state = PeelState.full(stream.n, stream.weighted)
    refresh_degrees(stream, state)
    trace: list[PassTrace] = []
    best_rho = None
    best_mask = None
    pass_idx = 0
    while state.n_alive > 0:
        pass_idx += 1
        rho = density(state.edges_alive, state.n_alive)
        if state.n_alive >= k and (best_rho is None or rho > best_rho):
            best_rho = rho
            best_mask = state.alive.copy()
        candidates = threshold_removals(
            state.deg, state.alive, state.n_alive, state.edges_alive, eps, state.weighted
        )
        quota = -((-p * state.n_alive) // (p + q))  # ceil(p*|S| / (p+q))
        quota = max(1, min(quota, len(candidates)))
        if quota < len(candidates):
            order = np.lexsort((candidates, state.deg[candidates]))
            removal = np.sort(candidates[order[:quota]])
        else:
            removal = candidates
        trace.append(
            PassTrace(pass_idx, state.n_alive, state.edges_alive, rho, len(removal))
        )
        _apply_removal(state, removal)
        if state.n_alive < k:
            break
        refresh_degrees(stream, state)
    if best_mask is None:
        raise InvariantViolationError("no feasible set was ever recorded")
    result = _finalize(stream, best_mask, best_rho, trace)
    if len(result.best_set) < k:
        raise InvariantViolationError("result smaller than the requested floor")
    return result


def adjacency_from_edges(n: int, edges: Iterable[tuple]) -> list[set[int]]:
    """Adjacency sets from (u, v[, w]) tuples; loops and duplicates ignored."""
    adj: list[set[int]] = [set() for _ in range(n)]
    for edge in edges:
        u, v = int(edge[0]), int(edge[1])
        if u == v:
            continue
        adj[u].add(v)
        adj[v].add(u)
    return adj


def d_core(adj: Sequence[Iterable[int]], d: int) -> set[int]:
    """Largest induced subgraph whose degrees are all >= d.

    Exhaustive removal of under-threshold nodes until fixpoint; the result
    is the unique maximal such set. In-memory validator, not streaming.
    """
    n = len(adj)
    neighbors = [set(a) for a in adj]
    deg = [len(a) for a in neighbors]
    alive = [True] * n
    stack = [i for i in range(n) if deg[i] < d]
    while stack:
        i = stack.pop()
        if not alive[i]:
            continue
        alive[i] = False
        for j in neighbors[i]:
            if alive[j]:
                deg[j] -= 1
                if deg[j] < d:
                    stack.append(j)
    return {i for i in range(n) if alive[i]}
