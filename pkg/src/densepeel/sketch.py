"""Signed-counter degree sketching and the low-memory peeling variant.

A sketch keeps t independent tables of b signed counters. Each node hashes
to one bucket per table with a +-1 sign; a point query returns the lower
median of the t signed readings. High-degree nodes are estimated well,
which is the regime peeling cares about: prematurely keeping a low-degree
node is cheap, prematurely dropping a hub is not.

The sketched peel run keeps the alive bitset and the per-pass edge count
exact; only the per-node degree readings come from the sketch, and the
sketch is rebuilt from the surviving edges each pass. Counter memory is
t * b versus n exact counters. The final reported density is always
recounted exactly for the chosen set.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .errors import (
    EmptyGraphError,
    InfeasibleParameterError,
    StreamModeError,
)
from .graph_io import EdgeStream
from .hashing import MASK64, mix64, mix64_array
from .peel import (
    DenseResult,
    PassTrace,
    _finalize,
    as_exact_fraction,
)

_INT64_SAFE = 1 << 62


class SketchEstimator:
    """t x b signed counter array with hash families derived from one seed.

    Construction is a pure function of (tables, buckets, seed), so sketches
    built alike from identical update sequences hold identical counters and
    may be merged by elementwise addition.
    """

    def __init__(self, tables: int, buckets: int, seed: int) -> None:
        if tables < 1 or buckets < 1:
            raise InfeasibleParameterError("sketch needs tables >= 1 and buckets >= 1")
        self.tables = tables
        self.buckets = buckets
        self.seed = seed
        self.counters = np.zeros((tables, buckets), dtype=np.int64)
        base = mix64(seed & MASK64)
        self._bucket_keys = [mix64(base ^ (2 * i + 1)) for i in range(tables)]
        self._sign_keys = [mix64(base ^ (2 * i + 2)) for i in range(tables)]

    def _bucket_of(self, table: int, node: int) -> int:
        return mix64(self._bucket_keys[table] ^ node) % self.buckets

    def _sign_of(self, table: int, node: int) -> int:
        return 1 - 2 * (mix64(self._sign_keys[table] ^ node) >> 63)

    def update_edge(self, x: int, y: int) -> None:
        """Record one edge: both endpoint counters move by their signs."""
        for i in range(self.tables):
            self.counters[i, self._bucket_of(i, x)] += self._sign_of(i, x)
            self.counters[i, self._bucket_of(i, y)] += self._sign_of(i, y)

    def update_endpoints(self, nodes: np.ndarray) -> None:
        """Vector update: one counter adjustment per endpoint occurrence."""
        if len(nodes) == 0:
            return
        xs = nodes.astype(np.uint64)
        for i in range(self.tables):
            zb = mix64_array(xs ^ np.uint64(self._bucket_keys[i]))
            zs = mix64_array(xs ^ np.uint64(self._sign_keys[i]))
            h = (zb % np.uint64(self.buckets)).astype(np.int64)
            g = 1 - 2 * (zs >> np.uint64(63)).astype(np.int64)
            self.counters[i] += np.bincount(
                h, weights=g.astype(np.float64), minlength=self.buckets
            ).astype(np.int64)

    def estimate(self, node: int) -> int:
        """Lower median of the signed per-table readings."""
        vals = sorted(
            int(self.counters[i, self._bucket_of(i, node)]) * self._sign_of(i, node)
            for i in range(self.tables)
        )
        return vals[(self.tables - 1) // 2]

    def estimate_many(self, nodes: np.ndarray) -> np.ndarray:
        if len(nodes) == 0:
            return np.empty(0, dtype=np.int64)
        xs = nodes.astype(np.uint64)
        rows = np.empty((self.tables, len(nodes)), dtype=np.int64)
        for i in range(self.tables):
            zb = mix64_array(xs ^ np.uint64(self._bucket_keys[i]))
            zs = mix64_array(xs ^ np.uint64(self._sign_keys[i]))
            h = (zb % np.uint64(self.buckets)).astype(np.int64)
            g = 1 - 2 * (zs >> np.uint64(63)).astype(np.int64)
            rows[i] = self.counters[i, h] * g
        rows.sort(axis=0)
        return rows[(self.tables - 1) // 2]

    def merge(self, other: "SketchEstimator") -> "SketchEstimator":
        """Elementwise-add a sketch built with the same (tables, buckets, seed)."""
        if (self.tables, self.buckets, self.seed) != (
            other.tables,
            other.buckets,
            other.seed,
        ):
            raise InfeasibleParameterError("sketches differ in shape or seed; cannot merge")
        self.counters += other.counters
        return self

    def reset(self) -> None:
        self.counters[:] = 0

    def memory_ratio(self, n: int) -> float:
        """Counter cells kept, relative to one exact counter per node."""
        return self.tables * self.buckets / n


def densest_undirected_sketched(
    stream: EdgeStream,
    eps,
    *,
    buckets: int,
    tables: int = 5,
    seed: int = 0,
) -> DenseResult:
    """Threshold peeling with sketched degrees in place of exact ones.

    Control flow matches the exact run: per pass, one scan rebuilds the
    sketch from edges whose endpoints are both alive and counts them
    exactly, estimates drive the removal decision, and the density of the
    surviving set is tracked exactly. If estimation noise ever leaves the
    removal set empty, the single weakest node by estimate leaves instead,
    so the run always terminates. The returned best density is recounted
    from a final exact scan.
    """
    if stream.weighted:
        raise StreamModeError("sketched peeling supports unweighted streams only")
    if stream.m < 1:
        raise EmptyGraphError("densest_undirected_sketched needs at least one edge")
    eps = as_exact_fraction(eps)
    p, q = eps.numerator, eps.denominator
    n = stream.n
    alive = np.ones(n, dtype=bool)
    n_alive = n
    trace: list[PassTrace] = []
    best_rho = None
    best_mask = None
    pass_idx = 0
    while n_alive > 0:
        sk = SketchEstimator(tables, buckets, seed)
        edges_alive = 0
        for block in stream.iter_blocks():
            u = block["u"].astype(np.int64)
            v = block["v"].astype(np.int64)
            mask = alive[u] & alive[v]
            if not mask.any():
                continue
            edges_alive += int(mask.sum())
            sk.update_endpoints(np.concatenate([u[mask], v[mask]]))
        pass_idx += 1
        rho = Fraction(edges_alive, n_alive)
        if best_rho is None or rho > best_rho:
            best_rho = rho
            best_mask = alive.copy()
        alive_ids = np.nonzero(alive)[0]
        est = sk.estimate_many(alive_ids)
        rhs = 2 * (p + q) * edges_alive
        scale = q * n_alive
        if rhs < _INT64_SAFE and int(np.abs(est).max()) * scale < _INT64_SAFE:
            keep = est * scale <= rhs
        else:
            keep = np.array([int(e) * scale <= rhs for e in est], dtype=bool)
        ids = alive_ids[keep]
        if len(ids) == 0:
            order = np.lexsort((alive_ids, est))
            ids = alive_ids[order[:1]]
        trace.append(PassTrace(pass_idx, n_alive, edges_alive, rho, len(ids)))
        alive[ids] = False
        n_alive -= len(ids)
    return _finalize(stream, best_mask, best_rho, trace)
