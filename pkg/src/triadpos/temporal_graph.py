"""Timestamped interaction logs and the cumulative snapshots derived from them."""

from __future__ import annotations

import io
import math
from bisect import bisect_right
from dataclasses import dataclass, field
from datetime import datetime, timezone
from functools import cached_property
from typing import Iterable, Iterator, TextIO

import numpy as np


class IngestError(ValueError):
    """A record in the edge-list stream could not be parsed."""

    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class EmptySnapshotError(ValueError):
    pass


@dataclass(frozen=True)
class IngestConfig:
    """How to read one interaction per line: ``src<sep>dst<sep>timestamp``.

    ``time_format`` is one of ``int`` (already integer ticks), ``epoch``
    (numeric seconds) or ``iso`` (ISO-8601 date/datetime, converted to epoch
    seconds). Raw times are binned as ``floor((raw - origin) / bin_width)``.
    """

    sep: str = ","
    header: bool = False
    time_format: str = "int"
    bin_width: float = 1
    origin: float = 0

    def __post_init__(self):
        if self.time_format not in ("int", "epoch", "iso"):
            raise ValueError(f"unknown time_format {self.time_format!r}")
        if self.bin_width <= 0:
            raise ValueError("bin_width must be positive")

    def to_tick(self, raw: str) -> int:
        raw = raw.strip()
        if self.time_format == "iso":
            dt = datetime.fromisoformat(raw)
            if dt.tzinfo is None:
                dt = dt.replace(tzinfo=timezone.utc)
            value = dt.timestamp()
        elif self.time_format == "int":
            value = int(raw)
        else:
            value = float(raw)
        tick = math.floor((value - self.origin) / self.bin_width)
        return int(tick)


def pair_key(u: str, v: str) -> tuple[str, str]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class TemporalGraph:
    """Node set, node arrival ticks and per-pair sorted interaction ticks.

    Pairs are stored once as ``(a, b)`` with ``a < b``. Arrival of a node is
    the earliest tick of any interaction it takes part in.
    """

    edge_log: dict[tuple[str, str], tuple[int, ...]]
    skipped_self_loops: int = 0
    nodes: frozenset = field(init=False)
    arrival: dict[str, int] = field(init=False)

    def __post_init__(self):
        arrival: dict[str, int] = {}
        for (a, b), times in self.edge_log.items():
            if a == b:
                raise ValueError(f"self-pair {a!r} in edge log")
            if not times:
                raise ValueError(f"empty timestamp list for pair {(a, b)!r}")
            if a > b:
                raise ValueError(f"pair {(a, b)!r} is not in canonical order")
            if any(x >= y for x, y in zip(times, times[1:])):
                raise ValueError(f"timestamps for {(a, b)!r} not strictly ascending")
            first = times[0]
            for x in (a, b):
                if x not in arrival or first < arrival[x]:
                    arrival[x] = first
        object.__setattr__(self, "arrival", arrival)
        object.__setattr__(self, "nodes", frozenset(arrival))

    @classmethod
    def from_records(cls, records: Iterable[tuple[str, str, int]]) -> TemporalGraph:
        log: dict[tuple[str, str], set[int]] = {}
        loops = 0
        for u, v, t in records:
            if u == v:
                loops += 1
                continue
            log.setdefault(pair_key(u, v), set()).add(int(t))
        return cls({k: tuple(sorted(ts)) for k, ts in sorted(log.items())}, loops)

    @property
    def first_time(self) -> int:
        return min(self.arrival.values())

    @property
    def last_time(self) -> int:
        return max(ts[-1] for ts in self.edge_log.values())

    @cached_property
    def times(self) -> tuple[int, ...]:
        """Distinct ticks carrying at least one interaction."""
        return tuple(sorted({t for ts in self.edge_log.values() for t in ts}))

    @cached_property
    def incident(self) -> dict[str, dict[str, tuple[int, ...]]]:
        out: dict[str, dict[str, tuple[int, ...]]] = {v: {} for v in self.nodes}
        for (a, b), ts in self.edge_log.items():
            out[a][b] = ts
            out[b][a] = ts
        return out

    def snapshot_at(self, t: int) -> Snapshot:
        if not self.edge_log or t < self.first_time:
            raise EmptySnapshotError(f"no events at or before t={t}")
        return self._snapshot(t)

    def _snapshot(self, t: int) -> Snapshot:
        nodes = sorted(v for v, a in self.arrival.items() if a <= t)
        edges = [(a, b) for (a, b), ts in self.edge_log.items() if ts[0] <= t]
        return Snapshot.from_edges(nodes, edges, cut_time=t)

    def arrivals_at(self, t: int) -> set[str]:
        return {v for v, a in self.arrival.items() if a == t}

    def until(self, t: int) -> TemporalGraph:
        """The log restricted to interactions with tick <= t."""
        log = {}
        for k, ts in self.edge_log.items():
            cut = ts[: bisect_right(ts, t)]
            if cut:
                log[k] = cut
        return TemporalGraph(log)

    def records(self) -> Iterator[tuple[str, str, int]]:
        for (a, b), ts in sorted(self.edge_log.items()):
            for t in ts:
                yield a, b, t

    def dump(self, out: TextIO, sep: str = ",") -> None:
        """Canonical sorted edge-log dump, re-ingestible with ``time_format=int``."""
        for a, b, t in self.records():
            out.write(f"{a}{sep}{b}{sep}{t}\n")

    def dumps(self, sep: str = ",") -> str:
        buf = io.StringIO()
        self.dump(buf, sep)
        return buf.getvalue()

    def __eq__(self, other):
        if not isinstance(other, TemporalGraph):
            return NotImplemented
        return self.edge_log == other.edge_log

    def __hash__(self):
        return hash(tuple(sorted(self.edge_log.items())))

    def __repr__(self):
        return f"TemporalGraph(nodes={len(self.nodes)}, pairs={len(self.edge_log)})"


def ingest_edge_list(source: TextIO | bytes | str, config: IngestConfig | None = None) -> TemporalGraph:
    """Parse a delimited edge list into a :class:`TemporalGraph`.

    ``source`` may be a text stream, raw bytes, or a string holding the data.
    Self-loops are skipped and counted; duplicate ``(u, v, t)`` records and
    reversed pairs collapse onto one entry.
    """
    config = config or IngestConfig()
    if isinstance(source, bytes):
        source = io.StringIO(source.decode("utf-8"))
    elif isinstance(source, str):
        source = io.StringIO(source)

    def parse() -> Iterator[tuple[str, str, int]]:
        for line_no, line in enumerate(source, start=1):
            if config.header and line_no == 1:
                continue
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(config.sep) if config.sep.strip() else line.split()
            if len(parts) < 3:
                raise IngestError(f"expected src{config.sep}dst{config.sep}timestamp, got {line!r}", line_no)
            u, v = parts[0].strip(), parts[1].strip()
            if not u or not v:
                raise IngestError("empty node identifier", line_no)
            try:
                t = config.to_tick(parts[2])
            except (ValueError, OverflowError) as exc:
                raise IngestError(f"bad timestamp {parts[2]!r}: {exc}", line_no) from None
            yield u, v, t

    g = TemporalGraph.from_records(parse())
    if not g.edge_log:
        raise IngestError("input contains no interactions")
    return g


class Snapshot:
    """Simple undirected graph at a cut-off tick.

    Nodes are held in sorted id order and addressed internally by position;
    ``neighbors[i]`` is the sorted tuple of neighbor positions of node ``i``.
    """

    def __init__(self, nodes: Iterable, neighbors: Iterable[Iterable[int]], cut_time: int | None = None):
        self.nodes = tuple(nodes)
        self.index = {v: i for i, v in enumerate(self.nodes)}
        self.neighbors = tuple(tuple(sorted(set(nb))) for nb in neighbors)
        self.cut_time = cut_time
        if len(self.neighbors) != len(self.nodes):
            raise ValueError("neighbors must have one entry per node")

    @classmethod
    def from_edges(cls, nodes: Iterable, edges: Iterable[tuple], cut_time: int | None = None) -> Snapshot:
        nodes = sorted(set(nodes))
        index = {v: i for i, v in enumerate(nodes)}
        nbrs: list[set[int]] = [set() for _ in nodes]
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop on {u!r}")
            i, j = index[u], index[v]
            nbrs[i].add(j)
            nbrs[j].add(i)
        return cls(nodes, nbrs, cut_time)

    @property
    def n(self) -> int:
        return len(self.nodes)

    @cached_property
    def nbr_sets(self) -> tuple[frozenset, ...]:
        return tuple(frozenset(nb) for nb in self.neighbors)

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.array([len(nb) for nb in self.neighbors], dtype=np.int64)

    @cached_property
    def m(self) -> int:
        return int(self.degrees.sum()) // 2

    def edges(self) -> Iterator[tuple[int, int]]:
        """Edges as position pairs ``(i, j)`` with ``i < j``."""
        for i, nb in enumerate(self.neighbors):
            for j in nb:
                if j > i:
                    yield i, j

    def edge_ids(self) -> set[tuple]:
        return {(self.nodes[i], self.nodes[j]) for i, j in self.edges()}

    def has_edge(self, i: int, j: int) -> bool:
        return j in self.nbr_sets[i]

    def degree(self, v) -> int:
        return len(self.neighbors[self.index[v]])

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        indptr[1:] = np.cumsum(self.degrees)
        indices = np.fromiter((j for nb in self.neighbors for j in nb), dtype=np.int64, count=int(indptr[-1]))
        return indptr, indices

    def subgraph(self, keep: Iterable) -> Snapshot:
        """Induced subgraph on the given node ids."""
        keep = set(keep)
        nodes = [v for v in self.nodes if v in keep]
        edges = [(self.nodes[i], self.nodes[j]) for i, j in self.edges() if self.nodes[i] in keep and self.nodes[j] in keep]
        return Snapshot.from_edges(nodes, edges, self.cut_time)

    def relabel(self, mapping: dict) -> Snapshot:
        edges = [(mapping[self.nodes[i]], mapping[self.nodes[j]]) for i, j in self.edges()]
        return Snapshot.from_edges([mapping[v] for v in self.nodes], edges, self.cut_time)

    def __repr__(self):
        return f"Snapshot(n={self.n}, m={self.m}, cut_time={self.cut_time})"
