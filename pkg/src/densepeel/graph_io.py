"""Edge-list ingestion and rescannable edge streams.

Input graphs arrive as whitespace-separated text (``u v`` or ``u v w``,
``#`` comments, optional gzip). Parsing happens exactly once, at open time:
labels are interned to dense integer ids, self-loops are dropped and
counted, duplicates are collapsed or kept depending on policy, and the
surviving records are spooled to a compact binary buffer. Every later scan
replays that spool, which makes multi-pass algorithms cheap and guarantees
that consecutive scans visit identical record sequences.

After opening, a stream holds O(n) state (the label table) plus the spool;
the peeling algorithms themselves keep only per-node arrays between passes.
"""

from __future__ import annotations

import gzip
import io
import struct
import tempfile
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator

import numpy as np

from .errors import (
    ConcurrentScanError,
    EdgeListParseError,
    ScanAbortedError,
)

RECORD_DTYPE = np.dtype([("u", "<u4"), ("v", "<u4"), ("w", "<f8")])
_RECORD = struct.Struct("<IId")
DEFAULT_BLOCK_EDGES = 1 << 16
_MAX_NODES = (1 << 32) - 1

DuplicatePolicy = str  # "dedupe" | "multigraph"


class NodeTable:
    """Bijection between external string labels and dense internal ids.

    Ids are assigned in first-appearance order and are stable for the
    lifetime of the stream, so scans replay the same id sequence.
    """

    def __init__(self) -> None:
        self._id_of: dict[str, int] = {}
        self._label_of: list[str] = []

    def __len__(self) -> int:
        return len(self._label_of)

    def intern(self, label: str) -> int:
        got = self._id_of.get(label)
        if got is not None:
            return got
        nid = len(self._label_of)
        self._id_of[label] = nid
        self._label_of.append(label)
        return nid

    def id_of(self, label: str) -> int:
        return self._id_of[label]

    def label_of(self, node_id: int) -> str:
        return self._label_of[node_id]

    def labels(self) -> list[str]:
        return list(self._label_of)


@dataclass(frozen=True)
class ScanSummary:
    edges: int


class EdgeStream:
    """Rescannable sequence of (u, v, w) records over interned node ids.

    Instances are produced by :func:`open_edge_stream` or
    :meth:`EdgeStream.from_edges`; the record set is immutable afterwards.
    One scan may be active at a time per stream.
    """

    def __init__(
        self,
        *,
        source: str,
        directed: bool,
        weighted: bool,
        policy: DuplicatePolicy,
        nodes: NodeTable,
        spool,
        m: int,
        total_weight: float,
        self_loops_dropped: int,
        duplicates_collapsed: int,
        zero_weight_dropped: int,
        edge_lines: int,
        skipped_lines: int,
    ) -> None:
        self.source = source
        self.directed = directed
        self.weighted = weighted
        self.policy = policy
        self.m = m
        self.total_weight = total_weight
        self.self_loops_dropped = self_loops_dropped
        self.duplicates_collapsed = duplicates_collapsed
        self.zero_weight_dropped = zero_weight_dropped
        self.edge_lines = edge_lines
        self.skipped_lines = skipped_lines
        self.scans_completed = 0
        self._nodes = nodes
        self._spool = spool
        self._scanning = False

    @property
    def n(self) -> int:
        return len(self._nodes)

    @property
    def nodes(self) -> NodeTable:
        return self._nodes

    @classmethod
    def from_edges(
        cls,
        edges: Iterable[tuple],
        *,
        n: int | None = None,
        directed: bool = False,
        weighted: bool | None = None,
        policy: DuplicatePolicy = "dedupe",
        source: str = "<memory>",
        spool: str = "memory",
    ) -> "EdgeStream":
        """Build a stream from (u, v) or (u, v, w) tuples of integer ids.

        ``n`` may exceed the largest id to represent isolated nodes, which
        the text format cannot express.
        """
        _check_policy(policy)
        table = _CollapseTable(directed, policy)
        max_id = -1
        saw_weight = False
        for line_no, edge in enumerate(edges, start=1):
            if len(edge) == 2:
                u, v = edge
                w = 1.0
            elif len(edge) == 3:
                u, v, w = edge
                w = float(w)
                saw_weight = True
            else:
                raise EdgeListParseError("expected (u, v) or (u, v, w)", source, line_no)
            u = int(u)
            v = int(v)
            if u < 0 or v < 0:
                raise EdgeListParseError("node ids must be >= 0", source, line_no)
            if w < 0:
                raise EdgeListParseError(f"negative weight {w!r}", source, line_no)
            max_id = max(max_id, u, v)
            table.add(u, v, w)
        if n is None:
            n = max_id + 1
        elif n < max_id + 1:
            raise ValueError(f"n={n} is smaller than max node id {max_id}")
        if weighted is None:
            weighted = saw_weight
        nodes = NodeTable()
        for i in range(n):
            nodes.intern(str(i))
        return cls._finish(
            source=source,
            directed=directed,
            weighted=weighted,
            policy=policy,
            nodes=nodes,
            table=table,
            spool=spool,
            edge_lines=table.edge_lines,
            skipped_lines=0,
        )

    @classmethod
    def _finish(
        cls,
        *,
        source,
        directed,
        weighted,
        policy,
        nodes,
        table,
        spool,
        edge_lines,
        skipped_lines,
    ) -> "EdgeStream":
        if len(nodes) > _MAX_NODES:
            raise ValueError("node count exceeds the 32-bit id space")
        records = table.records()
        buf = io.BytesIO() if spool == "memory" else tempfile.TemporaryFile()
        total_weight = 0.0
        for u, v, w in records:
            if not weighted:
                w = 1.0
            buf.write(_RECORD.pack(u, v, w))
            total_weight += w
        buf.flush()
        return cls(
            source=source,
            directed=directed,
            weighted=weighted,
            policy=policy,
            nodes=nodes,
            spool=buf,
            m=len(records),
            total_weight=total_weight,
            self_loops_dropped=table.self_loops,
            duplicates_collapsed=table.duplicates,
            zero_weight_dropped=table.zero_weight,
            edge_lines=edge_lines,
            skipped_lines=skipped_lines,
        )

    def iter_blocks(self, block_edges: int = DEFAULT_BLOCK_EDGES) -> Iterator[np.ndarray]:
        """Yield structured record blocks (fields ``u``, ``v``, ``w``) in spool order.

        A fully consumed iteration counts as one completed scan.
        """
        if self._scanning:
            raise ConcurrentScanError(f"stream {self.source!r} is already being scanned")
        self._scanning = True
        completed = False
        try:
            fh = self._spool
            fh.seek(0)
            chunk = block_edges * RECORD_DTYPE.itemsize
            while True:
                try:
                    buf = fh.read(chunk)
                except OSError as exc:
                    raise ScanAbortedError(
                        f"scan of {self.source!r} aborted mid-read: {exc}"
                    ) from exc
                if not buf:
                    break
                yield np.frombuffer(buf, dtype=RECORD_DTYPE)
            completed = True
        finally:
            self._scanning = False
            if completed:
                self.scans_completed += 1

    def scan(self, visit: Callable[[int, int, float], None]) -> ScanSummary:
        """Visit every retained record exactly once, in deterministic order."""
        count = 0
        for block in self.iter_blocks():
            us = block["u"].tolist()
            vs = block["v"].tolist()
            ws = block["w"].tolist()
            for u, v, w in zip(us, vs, ws):
                visit(u, v, w)
            count += len(us)
        return ScanSummary(edges=count)

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Materialize all records as (u, v, w) arrays. In-memory paths only."""
        us, vs, ws = [], [], []
        for block in self.iter_blocks():
            us.append(block["u"].astype(np.int64))
            vs.append(block["v"].astype(np.int64))
            ws.append(block["w"].copy())
        if not us:
            empty = np.empty(0, dtype=np.int64)
            return empty, empty.copy(), np.empty(0, dtype=np.float64)
        return np.concatenate(us), np.concatenate(vs), np.concatenate(ws)

    def close(self) -> None:
        self._spool.close()


class _CollapseTable:
    """Accumulates parsed records, applying the self-loop and duplicate rules."""

    def __init__(self, directed: bool, policy: DuplicatePolicy) -> None:
        self.directed = directed
        self.dedupe = policy == "dedupe"
        self.self_loops = 0
        self.duplicates = 0
        self.zero_weight = 0
        self.edge_lines = 0
        self._table: dict[tuple[int, int], list] = {}
        self._records: list[list] = []

    def add(self, u: int, v: int, w: float) -> None:
        self.edge_lines += 1
        if u == v:
            self.self_loops += 1
            return
        if w == 0:
            self.zero_weight += 1
            return
        if not self.dedupe:
            self._records.append([u, v, w])
            return
        key = (u, v) if self.directed else (min(u, v), max(u, v))
        slot = self._table.get(key)
        if slot is None:
            slot = [u, v, w]
            self._table[key] = slot
            self._records.append(slot)
        else:
            slot[2] += w
            self.duplicates += 1

    def records(self) -> list[list]:
        return self._records


def _check_policy(policy: str) -> None:
    if policy not in ("dedupe", "multigraph"):
        raise ValueError(f"unknown duplicate policy {policy!r}")


def open_edge_stream(
    path,
    *,
    directed: bool = False,
    policy: DuplicatePolicy = "dedupe",
    spool: str = "memory",
) -> EdgeStream:
    """Parse an edge-list file (optionally gzipped) into an :class:`EdgeStream`.

    Lines are ``u v`` or ``u v w`` with whitespace-separated tokens; lines
    starting with ``#`` (and blank lines) are skipped. Self-loops are
    dropped and counted. Under the default ``dedupe`` policy parallel edges
    collapse to a single record, with weights summed when any line carries
    an explicit weight; ``multigraph`` keeps every record.
    """
    _check_policy(policy)
    path = str(path)
    opener = gzip.open if path.endswith(".gz") else open
    nodes = NodeTable()
    table = _CollapseTable(directed, policy)
    skipped = 0
    saw_weight = False
    with opener(path, "rt", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                skipped += 1
                continue
            parts = line.split()
            if len(parts) == 2:
                w = 1.0
            elif len(parts) == 3:
                try:
                    w = float(parts[2])
                except ValueError:
                    raise EdgeListParseError(
                        f"invalid weight token {parts[2]!r}", path, line_no
                    ) from None
                if w != w:  # NaN
                    raise EdgeListParseError("weight is NaN", path, line_no)
                saw_weight = True
            else:
                raise EdgeListParseError(
                    f"expected 'u v' or 'u v w', got {len(parts)} tokens", path, line_no
                )
            if w < 0:
                raise EdgeListParseError(f"negative weight {parts[2]!r}", path, line_no)
            u = nodes.intern(parts[0])
            v = nodes.intern(parts[1])
            table.add(u, v, w)
    return EdgeStream._finish(
        source=path,
        directed=directed,
        weighted=saw_weight,
        policy=policy,
        nodes=nodes,
        table=table,
        spool=spool,
        edge_lines=table.edge_lines,
        skipped_lines=skipped,
    )


def scan(stream: EdgeStream, visit: Callable[[int, int, float], None]) -> ScanSummary:
    """Module-level alias for :meth:`EdgeStream.scan`."""
    return stream.scan(visit)
