"""Link and interference complexes of a planar network under the disk model.

A node covers the open disk of its radius around its position. Two nodes are
linked when each lies strictly inside the other's disk; a set of nodes
interferes when their open disks share a point.
"""

from __future__ import annotations

import csv
import io
import math
import random
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path

from sheafnet.complex import Cell, Complex, build_closure, facets
from sheafnet.errors import DegenerateGeometryError, InputFormatError

DEFAULT_EPS = 1e-9


@dataclass(frozen=True)
class NodeGeom:
    id: int
    x: float
    y: float
    radius: float

    @property
    def position(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class NetworkModel:
    nodes: tuple[NodeGeom, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", tuple(sorted(self.nodes, key=lambda n: n.id)))
        if not self.nodes:
            raise ValueError("network has no nodes")
        seen = set()
        for n in self.nodes:
            if n.id < 0:
                raise ValueError(f"negative node id {n.id}")
            if n.id in seen:
                raise ValueError(f"duplicate node id {n.id}")
            seen.add(n.id)
            if not (math.isfinite(n.x) and math.isfinite(n.y)):
                raise ValueError(f"node {n.id} has a non-finite position")
            if not (math.isfinite(n.radius) and n.radius > 0):
                raise ValueError(f"node {n.id} radius must be positive, got {n.radius}")

    @property
    def ids(self) -> tuple[int, ...]:
        return tuple(n.id for n in self.nodes)

    def node(self, node_id: int) -> NodeGeom:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise KeyError(node_id)


def _dist(a: NodeGeom, b: NodeGeom) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


def link_edges(net: NetworkModel) -> list[tuple[int, int]]:
    """Pairs that can decode each other: distance below both radii."""
    out = []
    for a, b in combinations(net.nodes, 2):
        d = _dist(a, b)
        if d < a.radius and d < b.radius:
            out.append((a.id, b.id))
    return out


def adjacency(vertices: Iterable[int], edges: Iterable[tuple[int, int]]) -> dict[int, set[int]]:
    adj: dict[int, set[int]] = {v: set() for v in vertices}
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    return adj


def bron_kerbosch(adj: Mapping[int, set[int]]) -> list[Cell]:
    """Maximal cliques via Bron-Kerbosch with Tomita pivoting, sorted."""
    out: list[Cell] = []

    def expand(r: list[int], p: set[int], x: set[int]) -> None:
        if not p and not x:
            out.append(tuple(sorted(r)))
            return
        pivot = max(p | x, key=lambda u: len(adj[u] & p))
        for v in sorted(p - adj[pivot]):
            expand(r + [v], p & adj[v], x & adj[v])
            p.discard(v)
            x.add(v)

    expand([], set(adj), set())
    return sorted(out, key=lambda c: (len(c), c))


def link_graph(net: NetworkModel) -> Complex:
    return build_closure([(i,) for i in net.ids] + link_edges(net))


def link_complex(net: NetworkModel, max_dim: int | None = None) -> Complex:
    """Clique complex of the link graph."""
    cliques = bron_kerbosch(adjacency(net.ids, link_edges(net)))
    return build_closure(cliques, max_dim=max_dim)


def _classify(margin: float, eps: float) -> int:
    if margin > eps:
        return 1
    if margin < -eps:
        return -1
    return 0


def disks_intersect(a: NodeGeom, b: NodeGeom, eps: float = DEFAULT_EPS) -> bool:
    """Whether two open disks overlap; near-tangent pairs raise."""
    verdict = _classify(a.radius + b.radius - _dist(a, b), eps)
    if verdict == 0:
        raise DegenerateGeometryError(f"disks of nodes {a.id} and {b.id} are tangent within {eps}")
    return verdict > 0


def circle_crossings(a: NodeGeom, b: NodeGeom) -> list[tuple[float, float]]:
    """Points where two circles cross transversally (empty unless |ra-rb| < d < ra+rb)."""
    d = _dist(a, b)
    if not abs(a.radius - b.radius) < d < a.radius + b.radius:
        return []
    along = (a.radius**2 - b.radius**2 + d**2) / (2 * d)
    h = math.sqrt(max(a.radius**2 - along**2, 0.0))
    ux, uy = (b.x - a.x) / d, (b.y - a.y) / d
    mx, my = a.x + along * ux, a.y + along * uy
    return [(mx - h * uy, my + h * ux), (mx + h * uy, my - h * ux)]


def _margin(p: tuple[float, float], disk: NodeGeom) -> float:
    return disk.radius - math.hypot(p[0] - disk.x, p[1] - disk.y)


def triple_intersect(a: NodeGeom, b: NodeGeom, c: NodeGeom, eps: float = DEFAULT_EPS) -> bool:
    """Whether three open disks share a point.

    If the common region of the closed disks has a corner, that corner is a
    crossing of two circles inside the third disk; if it has none, it is a
    whole disk and that disk's center lies in the other two. A candidate
    within ``eps`` of deciding either way makes the triple degenerate unless
    another candidate is a clear witness.
    """
    disks = (a, b, c)
    ambiguous = False
    for i, j, k in ((0, 1, 2), (0, 2, 1), (1, 2, 0)):
        p = (disks[k].x, disks[k].y)
        verdict = _classify(min(_margin(p, disks[i]), _margin(p, disks[j])), eps)
        if verdict > 0:
            return True
        ambiguous |= verdict == 0
        for q in circle_crossings(disks[i], disks[j]):
            verdict = _classify(_margin(q, disks[k]), eps)
            if verdict > 0:
                return True
            ambiguous |= verdict == 0
    if ambiguous:
        raise DegenerateGeometryError(
            f"disks of nodes {a.id}, {b.id}, {c.id} meet within {eps} of a single point"
        )
    return False


def interference_complex(
    net: NetworkModel, eps: float = DEFAULT_EPS, max_dim: int | None = None
) -> Complex:
    """Nerve of the open coverage disks.

    By Helly's theorem in the plane a family of disks has a common point iff
    every three of them do, so cells are the vertex sets all of whose pairs
    and triples intersect.
    """
    nodes = {n.id: n for n in net.nodes}
    ids = net.ids
    adj: dict[int, set[int]] = {i: set() for i in ids}
    for u, v in combinations(ids, 2):
        if disks_intersect(nodes[u], nodes[v], eps):
            adj[u].add(v)
            adj[v].add(u)
    triples: set[Cell] = set()
    for u in ids:
        for v, w in combinations(sorted(x for x in adj[u] if x > u), 2):
            if w in adj[v] and triple_intersect(nodes[u], nodes[v], nodes[w], eps):
                triples.add((u, v, w))

    cells: list[Cell] = []
    limit = math.inf if max_dim is None else max_dim + 1

    def grow(cell: Cell, candidates: list[int]) -> None:
        cells.append(cell)
        if len(cell) >= limit:
            return
        for idx, v in enumerate(candidates):
            if all((a, b, v) in triples for a, b in combinations(cell, 2)):
                nxt = cell + (v,)
                grow(nxt, [w for w in candidates[idx + 1 :] if w in adj[v]])

    for u in ids:
        grow((u,), sorted(x for x in adj[u] if x > u))
    return Complex(cells)


def maximal_interference_sets(net: NetworkModel, eps: float = DEFAULT_EPS) -> list[Cell]:
    return facets(interference_complex(net, eps))


def read_nodes_csv(source: str | Path | io.TextIOBase) -> NetworkModel:
    """Parse ``id,x,y,radius`` rows. Errors name the offending line."""
    if isinstance(source, (str, Path)):
        with open(source, newline="", encoding="utf-8") as fh:
            return read_nodes_csv(fh)
    reader = csv.reader(source)
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != ["id", "x", "y", "radius"]:
        raise InputFormatError(f"expected header id,x,y,radius, got {header}", line=1)
    nodes = []
    seen: set[int] = set()
    for row in reader:
        line = reader.line_num
        if not row or all(not f.strip() for f in row):
            continue
        if len(row) != 4:
            raise InputFormatError(f"expected 4 fields, got {len(row)}", line=line)
        try:
            node = NodeGeom(int(row[0]), float(row[1]), float(row[2]), float(row[3]))
        except ValueError as exc:
            raise InputFormatError(str(exc), line=line) from None
        if node.id < 0 or node.id in seen:
            raise InputFormatError(f"node id {node.id} is negative or repeated", line=line)
        if not (math.isfinite(node.x) and math.isfinite(node.y)):
            raise InputFormatError(f"non-finite position for node {node.id}", line=line)
        if not (math.isfinite(node.radius) and node.radius > 0):
            raise InputFormatError(f"radius must be positive for node {node.id}", line=line)
        seen.add(node.id)
        nodes.append(node)
    if not nodes:
        raise InputFormatError("no nodes")
    return NetworkModel(tuple(nodes))


def write_nodes_csv(net: NetworkModel, sink: io.TextIOBase) -> None:
    sink.write("id,x,y,radius\n")
    for n in net.nodes:
        sink.write(f"{n.id},{n.x!r},{n.y!r},{n.radius!r}\n")


def random_network(count: int, area: float, radius: float, seed: int) -> NetworkModel:
    """Uniform node placement in an ``area`` x ``area`` square, equal radii."""
    if count < 1:
        raise ValueError("count must be positive")
    rng = random.Random(seed)
    nodes = []
    for i in range(count):
        x = round(rng.uniform(0.0, area), 3)
        y = round(rng.uniform(0.0, area), 3)
        nodes.append(NodeGeom(i, x, y, float(radius)))
    return NetworkModel(tuple(nodes))


def dumbbell_network(
    left: int, right: int, bridges: int = 1, seed: int = 0, radius: float = 100.0
) -> NetworkModel:
    """Two tight clusters joined through a chain of 1 or 2 bridge nodes.

    Each cluster is a clique of the link graph, every bridge reaches the whole
    cluster (or neighbouring bridge) on each side, and nothing else is in
    range. Cluster nodes get the lowest ids, bridges the highest.
    """
    if bridges not in (1, 2):
        raise ValueError("bridges must be 1 or 2")
    rng = random.Random(seed)
    spread = 0.15 * radius
    step = 0.7 * radius if bridges == 1 else 0.75 * radius
    bridge_x = [step] if bridges == 1 else [step, step + 0.8 * radius]
    right_center = bridge_x[-1] + step

    def cluster(cx: float, count: int, start: int) -> list[NodeGeom]:
        out = []
        for i in range(count):
            r = spread * math.sqrt(rng.random())
            t = rng.uniform(0.0, 2 * math.pi)
            out.append(NodeGeom(start + i, round(cx + r * math.cos(t), 3), round(r * math.sin(t), 3), radius))
        return out

    nodes = cluster(0.0, left, 0) + cluster(right_center, right, left)
    nodes += [NodeGeom(left + right + i, bx, 0.0, radius) for i, bx in enumerate(bridge_x)]
    return NetworkModel(tuple(nodes))
