"""Two-phase sharded executor for the undirected peeling loop.

The driver partitions edges across R shards by endpoint hash and never
touches a global edge list again: each pass runs a degree phase (per-shard
partial counts merged by summation) and, after the peel decision, a filter
phase that drops edges touching removed nodes. Merges are commutative and
associative, so every aggregate is independent of shard count, assignment,
and processing order, and the resulting traces match the streaming
implementation bit for bit.

Removal marks travel either as a broadcast bitset or as literal per-node
marker records shuffled alongside the edges (two sub-passes, pivoting on
the first endpoint and then the second). Both modes keep exactly the edges
whose endpoints are both unmarked; they differ only in shuffle traffic.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import EmptyGraphError, InfeasibleParameterError, StreamModeError
from .graph_io import EdgeStream
from .hashing import shard_of_array
from .peel import (
    DenseResult,
    PeelState,
    _check_handshake,
    _finalize,
    as_exact_fraction,
    undirected_peel_loop,
)

_EDGE_RECORD_BYTES = 16
_MARK_RECORD_BYTES = 8


@dataclass
class ShardSet:
    """Edges partitioned by the hash of one endpoint (the pivot)."""

    shard_count: int
    pivot: str  # "u" or "v"
    shards: list[tuple[np.ndarray, np.ndarray]]

    def total_edges(self) -> int:
        return sum(len(u) for u, _ in self.shards)

    def max_shard_edges(self) -> int:
        return max((len(u) for u, _ in self.shards), default=0)


@dataclass(frozen=True)
class PhaseStats:
    phase: str
    records: int
    bytes_shuffled: int
    max_shard_edges: int
    ideal_shard_edges: int


@dataclass
class MRMetrics:
    shard_count: int
    phases: list[PhaseStats] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "shard_count": self.shard_count,
            "phases": [vars(p) for p in self.phases],
        }


def _empty_parts(r: int) -> list[list]:
    return [[] for _ in range(r)]


def _gather(parts: list[list]) -> list[tuple[np.ndarray, np.ndarray]]:
    shards = []
    for chunk in parts:
        if chunk:
            shards.append(
                (
                    np.concatenate([u for u, _ in chunk]),
                    np.concatenate([v for _, v in chunk]),
                )
            )
        else:
            empty = np.empty(0, dtype=np.int64)
            shards.append((empty, empty.copy()))
    return shards


def partition_stream(stream: EdgeStream, shard_count: int) -> ShardSet:
    """Initial partition: edge (u, v) goes to the shard hashing its first endpoint."""
    if shard_count < 1:
        raise InfeasibleParameterError("shard count must be >= 1")
    parts = _empty_parts(shard_count)
    for block in stream.iter_blocks():
        u = block["u"].astype(np.int64)
        v = block["v"].astype(np.int64)
        dest = shard_of_array(u, shard_count)
        for r in range(shard_count):
            mask = dest == r
            if mask.any():
                parts[r].append((u[mask], v[mask]))
    return ShardSet(shard_count=shard_count, pivot="u", shards=_gather(parts))


def mr_degree_phase(shards: ShardSet, n: int) -> tuple[np.ndarray, int, PhaseStats]:
    """Per-node degrees of the shard union, by merged per-shard counts.

    Conceptually each edge is emitted twice, keyed by either endpoint; a
    shard reduces its slice to partial counts and the driver sums them.
    Addition commutes, so the result is exactly the single-scan degree
    table regardless of the partition.
    """
    deg = np.zeros(n, dtype=np.int64)
    edges = 0
    records = 0
    for u, v in shards.shards:
        if len(u):
            partial = np.bincount(u, minlength=n) + np.bincount(v, minlength=n)
            deg += partial
            edges += len(u)
        records += 2 * len(u)
    stats = PhaseStats(
        phase="degree",
        records=records,
        bytes_shuffled=records * _EDGE_RECORD_BYTES,
        max_shard_edges=shards.max_shard_edges(),
        ideal_shard_edges=-(-shards.total_edges() // shards.shard_count),
    )
    return deg, edges, stats


def _shuffle_drop(
    shards: ShardSet, key: str, marked: np.ndarray, count_mark_records: bool
) -> tuple[ShardSet, PhaseStats]:
    """One literal sub-pass: shuffle by one endpoint, drop marked keys."""
    r_count = shards.shard_count
    parts = _empty_parts(r_count)
    records = 0
    for u, v in shards.shards:
        keys = u if key == "u" else v
        dest = shard_of_array(keys, r_count)
        for r in range(r_count):
            mask = dest == r
            if mask.any():
                parts[r].append((u[mask], v[mask]))
        records += len(u)
    gathered = _gather(parts)
    max_in = max((len(u) for u, _ in gathered), default=0)
    kept = []
    for u, v in gathered:
        keys = u if key == "u" else v
        keep = ~marked[keys] if len(keys) else np.empty(0, dtype=bool)
        kept.append((u[keep], v[keep]))
    mark_records = int(marked.sum()) if count_mark_records else 0
    out = ShardSet(shard_count=r_count, pivot=key, shards=kept)
    stats = PhaseStats(
        phase=f"filter-{key}",
        records=records + mark_records,
        bytes_shuffled=records * _EDGE_RECORD_BYTES + mark_records * _MARK_RECORD_BYTES,
        max_shard_edges=max_in,
        ideal_shard_edges=-(-shards.total_edges() // r_count),
    )
    return out, stats


def mr_filter_phase(
    shards: ShardSet, marked: np.ndarray, *, literal: bool = False
) -> tuple[ShardSet, list[PhaseStats]]:
    """Drop every edge incident to a marked node.

    Literal mode shuffles marker records with the edges across two
    sub-passes (pivot on the first endpoint, then the second). Broadcast
    mode filters each shard in place against the shared bitset. Survivors
    are identical: edges with both endpoints unmarked.
    """
    if literal:
        first, stats_u = _shuffle_drop(shards, "u", marked, count_mark_records=True)
        second, stats_v = _shuffle_drop(first, "v", marked, count_mark_records=True)
        return second, [stats_u, stats_v]
    kept = []
    survivors = 0
    for u, v in shards.shards:
        if len(u):
            keep = ~marked[u] & ~marked[v]
            kept.append((u[keep], v[keep]))
            survivors += int(keep.sum())
        else:
            kept.append((u, v))
    out = ShardSet(shard_count=shards.shard_count, pivot=shards.pivot, shards=kept)
    stats = PhaseStats(
        phase="filter-broadcast",
        records=shards.total_edges(),
        bytes_shuffled=survivors * _EDGE_RECORD_BYTES,
        max_shard_edges=shards.max_shard_edges(),
        ideal_shard_edges=-(-shards.total_edges() // shards.shard_count),
    )
    return out, [stats]


def write_shard_files(shards: ShardSet, directory, pass_index: int) -> list[str]:
    """Persist shards as text files, one `u\\tv` line per surviving edge."""
    base = os.path.join(str(directory), f"pass{pass_index:04d}")
    os.makedirs(base, exist_ok=True)
    paths = []
    for r, (u, v) in enumerate(shards.shards):
        path = os.path.join(base, f"shard{r:04d}.tsv")
        with open(path, "w", encoding="utf-8") as fh:
            for uu, vv in zip(u.tolist(), v.tolist()):
                fh.write(f"{uu}\t{vv}\n")
        paths.append(path)
    return paths


def read_shard_files(paths: Iterable[str], shard_count: int, pivot: str) -> ShardSet:
    shards = []
    for path in paths:
        us, vs = [], []
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                a, b = line.split("\t")
                us.append(int(a))
                vs.append(int(b))
        shards.append((np.array(us, dtype=np.int64), np.array(vs, dtype=np.int64)))
    return ShardSet(shard_count=shard_count, pivot=pivot, shards=shards)


def mr_densest_undirected(
    stream: EdgeStream,
    eps,
    shard_count: int,
    *,
    literal_marks: bool = False,
    work_dir=None,
) -> tuple[DenseResult, MRMetrics]:
    """Sharded run of the undirected peel; trace-identical to the streaming path.

    The peel decision itself is the shared code from the streaming loop,
    fed by phase-aggregated degrees, so every pass removes exactly the
    same nodes. When ``work_dir`` is given, each filter output is written
    to per-shard files and read back, exercising the external layout.
    """
    if stream.weighted:
        raise StreamModeError("the sharded executor runs on unweighted streams")
    if stream.m < 1:
        raise EmptyGraphError("mr_densest_undirected needs at least one edge")
    eps = as_exact_fraction(eps)
    n = stream.n
    metrics = MRMetrics(shard_count=shard_count)
    holder = {"shards": partition_stream(stream, shard_count), "prev": None}

    def refresh(state: PeelState) -> None:
        if holder["prev"] is not None:
            marked = holder["prev"] & ~state.alive
            filtered, stats = mr_filter_phase(
                holder["shards"], marked, literal=literal_marks
            )
            metrics.phases.extend(stats)
            if work_dir is not None:
                paths = write_shard_files(filtered, work_dir, len(metrics.phases))
                filtered = read_shard_files(paths, shard_count, filtered.pivot)
            holder["shards"] = filtered
        deg, edges, stats = mr_degree_phase(holder["shards"], n)
        metrics.phases.append(stats)
        state.deg = deg
        state.edges_alive = edges
        holder["prev"] = state.alive.copy()
        _check_handshake(state)

    state = PeelState.full(n, weighted=False)
    trace, best_mask, best_rho = undirected_peel_loop(state, eps, refresh)
    result = _finalize(stream, best_mask, best_rho, trace)
    return result, metrics
