"""Packet forwarding on the link graph and its correlation with local homology.

The simulator routes every packet along a shortest hop-count path with the
smallest next-hop id winning ties, which makes traces a pure function of the
network, packet count and seed.
"""

from __future__ import annotations

import csv
import io
import math
import random
from collections import deque
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

from sheafnet.errors import InputFormatError, MissingScoreError
from sheafnet.geometry import NetworkModel, adjacency, link_edges
from sheafnet.homology import LocalHomologyScore

ACTIONS = ("send", "forward", "recv", "drop")
DEFAULT_BINS = 10
DEFAULT_TOP_PERCENT = 5.0


@dataclass(frozen=True)
class TraceRecord:
    packet_id: int
    src: int
    dst: int
    hop_node: int
    action: str


def _distances_to(adj: dict[int, set[int]], dst: int) -> dict[int, int]:
    dist = {dst: 0}
    queue = deque([dst])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


class Router:
    """Shortest-path next hops on a fixed graph, cached per destination."""

    def __init__(self, adj: dict[int, set[int]]) -> None:
        self.adj = adj
        self._dist: dict[int, dict[int, int]] = {}

    def route(self, src: int, dst: int) -> list[int] | None:
        dist = self._dist.get(dst)
        if dist is None:
            dist = self._dist[dst] = _distances_to(self.adj, dst)
        if src not in dist:
            return None
        path = [src]
        while path[-1] != dst:
            here = path[-1]
            path.append(min(v for v in self.adj[here] if dist.get(v) == dist[here] - 1))
        return path


def simulate(
    net: NetworkModel,
    packets: int,
    seed: int,
    endpoints: tuple[int, int] | None = None,
) -> list[TraceRecord]:
    """Trace ``packets`` packets with uniformly drawn distinct endpoints.

    ``endpoints`` pins every packet to one (src, dst) pair instead.
    """
    if packets < 0:
        raise ValueError("packet count must be non-negative")
    ids = list(net.ids)
    if endpoints is not None:
        src, dst = endpoints
        if src not in ids or dst not in ids or src == dst:
            raise ValueError(f"bad endpoints {endpoints}")
    elif packets and len(ids) < 2:
        raise ValueError("need at least two nodes to draw distinct endpoints")
    router = Router(adjacency(ids, link_edges(net)))
    rng = random.Random(seed)
    trace: list[TraceRecord] = []
    for pid in range(packets):
        if endpoints is None:
            src = rng.choice(ids)
            dst = rng.choice(ids)
            while dst == src:
                dst = rng.choice(ids)
        trace.append(TraceRecord(pid, src, dst, src, "send"))
        path = router.route(src, dst)
        if path is None:
            trace.append(TraceRecord(pid, src, dst, src, "drop"))
            continue
        trace.extend(TraceRecord(pid, src, dst, hop, "forward") for hop in path[1:-1])
        trace.append(TraceRecord(pid, src, dst, dst, "recv"))
    return trace


TRACE_HEADER = ["packet_id", "src", "dst", "hop_node", "action"]


def write_trace_csv(trace: Iterable[TraceRecord], sink: io.TextIOBase) -> None:
    sink.write(",".join(TRACE_HEADER) + "\n")
    for r in trace:
        sink.write(f"{r.packet_id},{r.src},{r.dst},{r.hop_node},{r.action}\n")


def ingest_trace(
    source: str | Path | io.TextIOBase, nodes: Iterable[int] | None = None
) -> list[TraceRecord]:
    """Read and validate a trace CSV; errors carry the line number."""
    if isinstance(source, (str, Path)):
        with open(source, newline="", encoding="utf-8") as fh:
            return ingest_trace(fh, nodes)
    known = None if nodes is None else set(nodes)
    reader = csv.reader(source)
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != TRACE_HEADER:
        raise InputFormatError(f"expected header {','.join(TRACE_HEADER)}, got {header}", line=1)
    records = []
    sends: set[int] = set()
    recvs: set[int] = set()
    for row in reader:
        line = reader.line_num
        if not row:
            continue
        if len(row) != 5:
            raise InputFormatError(f"expected 5 fields, got {len(row)}", line=line)
        try:
            pid, src, dst, hop = (int(v) for v in row[:4])
        except ValueError as exc:
            raise InputFormatError(str(exc), line=line) from None
        action = row[4].strip()
        if action not in ACTIONS:
            raise InputFormatError(f"unknown action {action!r}", line=line)
        if known is not None:
            for v in (src, dst, hop):
                if v not in known:
                    raise InputFormatError(f"unknown node id {v}", line=line)
        if action == "send":
            if pid in sends:
                raise InputFormatError(f"duplicate send for packet {pid}", line=line)
            sends.add(pid)
        elif action == "recv":
            if pid in recvs:
                raise InputFormatError(f"duplicate recv for packet {pid}", line=line)
            recvs.add(pid)
        records.append(TraceRecord(pid, src, dst, hop, action))
    orphans = {r.packet_id for r in records} - sends
    if orphans:
        raise InputFormatError(f"packet {min(orphans)} has no send record")
    return records


@dataclass(frozen=True)
class ForwardingStats:
    counts: dict[int, int]
    total_packets: int

    @property
    def probabilities(self) -> dict[int, float]:
        if not self.total_packets:
            return {n: 0.0 for n in self.counts}
        return {n: c / self.total_packets for n, c in self.counts.items()}

    @property
    def total_forwards(self) -> int:
        return sum(self.counts.values())

    def ranked(self) -> list[tuple[int, int, float]]:
        """(node, count, probability), most-forwarding first, ties by node id."""
        probs = self.probabilities
        return sorted(
            ((n, c, probs[n]) for n, c in self.counts.items()), key=lambda t: (-t[1], t[0])
        )


def forwarding_stats(trace: Iterable[TraceRecord], nodes: Iterable[int] | None = None) -> ForwardingStats:
    """Per-node forward counts; ``nodes`` adds zero rows for silent nodes."""
    counts: dict[int, int] = {n: 0 for n in nodes or ()}
    packets: set[int] = set()
    for r in trace:
        packets.add(r.packet_id)
        for v in (r.src, r.dst, r.hop_node):
            counts.setdefault(v, 0)
        if r.action == "forward":
            counts[r.hop_node] += 1
    return ForwardingStats(dict(sorted(counts.items())), len(packets))


def top_forwarders(stats: ForwardingStats, top_percent: float = DEFAULT_TOP_PERCENT) -> list[int]:
    """Nodes ranked in the top ``top_percent`` by forward count.

    The bin holds ceil(top_percent% of nodes), at least one, widened to keep
    tied counts together; nodes forwarding nothing are never included.
    """
    ranked = stats.ranked()
    if not ranked:
        return []
    k = max(1, math.ceil(len(ranked) * top_percent / 100.0))
    threshold = ranked[min(k, len(ranked)) - 1][1]
    return sorted(n for n, c, _ in ranked if c >= threshold and c > 0)


@dataclass
class CorrelationReport:
    lh_dim: int
    bin_edges: list[float]
    bins: list[dict]
    top_percent: float
    top_nodes: list[int]
    top_bin_all_high_lh: bool
    converse_nodes: list[int]
    forwarding: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "lh_dim": self.lh_dim,
            "binning": {
                "method": "equal-width",
                "bins": len(self.bins),
                "edges": self.bin_edges,
                "top_percent": self.top_percent,
            },
            "bins": self.bins,
            "top_nodes": self.top_nodes,
            "top_bin_all_high_lh": self.top_bin_all_high_lh,
            "converse": {
                "high_lh_outside_top": len(self.converse_nodes),
                "nodes": self.converse_nodes,
            },
            "forwarding": self.forwarding,
        }


def correlate(
    stats: ForwardingStats,
    lh: Sequence[LocalHomologyScore],
    bins: int = DEFAULT_BINS,
    top_percent: float = DEFAULT_TOP_PERCENT,
    lh_dim: int = 1,
) -> CorrelationReport:
    """Empirical P(LH = v | forward count in bin) over equal-width count bins.

    High LH means LH >= 1. The flag checks that every top forwarder scores
    high; the converse population is high-LH nodes outside the top bin.
    """
    if bins < 1:
        raise ValueError("need at least one bin")
    node_lh = {s.cell[0]: s.lh.get(lh_dim, 0) for s in lh if len(s.cell) == 1}
    missing = [n for n in stats.counts if n not in node_lh]
    if missing:
        raise MissingScoreError(f"no LH score for node {missing[0]}")
    peak = max(stats.counts.values(), default=0)
    width = peak / bins if peak else 1.0 / bins
    edges = [round(i * width, 9) for i in range(bins + 1)]
    grouped: list[list[int]] = [[] for _ in range(bins)]
    for n, c in stats.counts.items():
        grouped[min(int(c / width), bins - 1)].append(n)
    values = sorted(set(node_lh[n] for n in stats.counts))
    bin_rows = []
    for i, members in enumerate(grouped):
        dist = {}
        if members:
            for v in values:
                dist[str(v)] = sum(1 for n in members if node_lh[n] == v) / len(members)
        bin_rows.append({"lo": edges[i], "hi": edges[i + 1], "nodes": len(members), "distribution": dist})
    top = top_forwarders(stats, top_percent)
    top_set = set(top)
    converse = sorted(n for n in stats.counts if node_lh[n] >= 1 and n not in top_set)
    forwarding = [
        {"node": n, "count": c, "probability": p, f"lh{lh_dim}": node_lh[n]} for n, c, p in stats.ranked()
    ]
    return CorrelationReport(
        lh_dim=lh_dim,
        bin_edges=edges,
        bins=bin_rows,
        top_percent=top_percent,
        top_nodes=top,
        top_bin_all_high_lh=all(node_lh[n] >= 1 for n in top),
        converse_nodes=converse,
        forwarding=forwarding,
    )
