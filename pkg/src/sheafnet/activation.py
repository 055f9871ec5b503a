"""The activation sheaf of a complex and its sections.

The stalk over a cell is the set of nodes sharing a coface with it, plus the
bottom symbol. A section picks, per cell, the node that cell is listening to
(or bottom); restrictions push a node value up to a coface only if that node
is still in the coface's stalk.
"""

from __future__ import annotations

import enum
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from itertools import combinations

from sheafnet.complex import Cell, Complex, faces, is_closed
from sheafnet.errors import (
    EnumerationCapError,
    IncompleteSectionError,
    InputFormatError,
    InvalidRestrictionError,
    NotClosedError,
    NotInComplexError,
)

DEFAULT_CAP = 20


class _Bottom(enum.Enum):
    BOTTOM = "⊥"

    def __repr__(self) -> str:
        return "BOTTOM"


BOTTOM = _Bottom.BOTTOM


@dataclass(frozen=True)
class Stalk:
    cell: Cell
    members: frozenset[int]

    @property
    def includes_bottom(self) -> bool:
        return True

    def __contains__(self, value: object) -> bool:
        return value is BOTTOM or value in self.members

    def __len__(self) -> int:
        return len(self.members) + 1


def stalk_members(X: Complex, c: Cell) -> frozenset[int]:
    return frozenset(v for d in X.cofaces(c) for v in d)


def stalk(X: Complex, c: Cell) -> Stalk:
    return Stalk(c, stalk_members(X, c))


def all_stalk_members(X: Complex) -> dict[Cell, frozenset[int]]:
    """Stalk members for every cell at once.

    A node v is in the stalk of c iff c ∪ {v} is a cell, so it suffices to
    look one dimension up.
    """
    members: dict[Cell, set[int]] = {c: set(c) for c in X}
    for d in X:
        for i, f in enumerate(faces(d)):
            members[f].add(d[i])
    return {c: frozenset(m) for c, m in members.items()}


def restrict(X: Complex, c: Cell, d: Cell, n: int | _Bottom) -> int | _Bottom:
    if c not in X:
        raise NotInComplexError(f"cell {list(c)} not in complex")
    if d not in X:
        raise NotInComplexError(f"cell {list(d)} not in complex")
    if not set(c) <= set(d):
        raise InvalidRestrictionError(f"{list(c)} is not a face of {list(d)}")
    if n is BOTTOM:
        return BOTTOM
    return n if n in stalk_members(X, d) else BOTTOM


@dataclass(frozen=True)
class Section:
    """A (partial) assignment of stalk values to cells."""

    assignment: Mapping[Cell, int | _Bottom] = field(default_factory=dict)

    @property
    def support_domain(self) -> frozenset[Cell]:
        return frozenset(self.assignment)

    @property
    def support(self) -> frozenset[Cell]:
        """Cells carrying a node rather than bottom."""
        return frozenset(c for c, v in self.assignment.items() if v is not BOTTOM)

    @property
    def transmitters(self) -> tuple[int, ...]:
        return tuple(sorted(c[0] for c, v in self.assignment.items() if len(c) == 1 and v == c[0]))

    def __getitem__(self, c: Cell) -> int | _Bottom:
        return self.assignment[c]

    def to_json(self) -> dict:
        return {
            "transmitters": list(self.transmitters),
            "assignment": {
                ",".join(map(str, c)): (None if v is BOTTOM else v)
                for c, v in sorted(self.assignment.items(), key=lambda kv: (len(kv[0]), kv[0]))
            },
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> Section:
        try:
            raw = obj["assignment"]
            assignment = {
                tuple(int(v) for v in key.split(",")): (BOTTOM if val is None else int(val))
                for key, val in raw.items()
            }
        except (KeyError, AttributeError, TypeError, ValueError) as exc:
            raise InputFormatError(f"bad section JSON: {exc}") from None
        return cls(assignment)


def active_set(s: Section, n: int) -> frozenset[Cell]:
    """Cells assigned to ``n`` by the section."""
    return frozenset(c for c, v in s.assignment.items() if v == n)


def section_violations(X: Complex, s: Section) -> list[tuple[Cell, Cell]]:
    """Face pairs (c, d) on which the section fails the sheaf condition.

    Pairs of codimension one suffice: restrictions compose, so agreement on
    each step of a chain c ⊂ ... ⊂ d gives agreement on the pair c ⊂ d.
    A pair (c, c) reports a value outside the stalk.
    """
    members = all_stalk_members(X)
    bad = []
    for c in X:
        v = s.assignment[c]
        if v is not BOTTOM and v not in members[c]:
            bad.append((c, c))
    for d in X:
        for c in faces(d):
            v = s.assignment[c]
            pushed = v if v is not BOTTOM and v in members[d] else BOTTOM
            if pushed != s.assignment[d]:
                bad.append((c, d))
    return bad


def is_global_section(X: Complex, s: Section) -> bool:
    missing = [c for c in X if c not in s.assignment]
    if missing:
        raise IncompleteSectionError(f"section misses {len(missing)} cells, first {list(missing[0])}")
    return not section_violations(X, s)


@dataclass(frozen=True)
class ActiveRegion:
    node: int
    cells: frozenset[Cell]


def active_region(X: Complex, n: int) -> ActiveRegion:
    """Closure of the star of a node: all faces of cells containing it."""
    if (n,) not in X:
        raise NotInComplexError(f"unknown node {n}")
    cells = {f for d in X.vertex_star(n) for k in range(1, len(d) + 1) for f in combinations(d, k)}
    return ActiveRegion(n, frozenset(cells))


def region_of_influence(X: Complex, F: Iterable[Cell]) -> frozenset[Cell]:
    """Union of the stars of the closures of the cells in ``F``.

    A cell meets the closure of f exactly when it shares a vertex with f, so
    this is the union of the vertex stars over the vertices of ``F``.
    """
    verts: set[int] = set()
    for f in F:
        if f not in X:
            raise NotInComplexError(f"cell {list(f)} not in complex")
        verts.update(f)
    return frozenset(c for v in verts for c in X.vertex_star(v))


def complement_complex(X: Complex, roi: Iterable[Cell]) -> Complex:
    rest = X.cellset - frozenset(roi)
    if not is_closed(rest):
        raise NotClosedError("complement of region of influence is not closed")
    return Complex(rest)


def transmitter_conflicts(X: Complex, transmitters: Iterable[int]) -> list[Cell]:
    """Vertices claimed by the active regions of two or more transmitters.

    Active regions are closed, so two of them overlap (equivalently, one meets
    the star of the other) iff they share a vertex.
    """
    owner: dict[int, int] = {}
    clashes: set[int] = set()
    for n in sorted(set(transmitters)):
        for c in active_region(X, n).cells:
            if len(c) == 1:
                if c[0] in owner:
                    clashes.add(c[0])
                owner[c[0]] = n
    return [(v,) for v in sorted(clashes)]


def section_from_transmitters(X: Complex, transmitters: Iterable[int]) -> Section:
    """The assignment induced by a set of transmitting nodes.

    Does not check for interference; see :func:`transmitter_conflicts`.
    """
    assignment: dict[Cell, int | _Bottom] = {c: BOTTOM for c in X}
    for n in sorted(set(transmitters)):
        for c in active_region(X, n).cells:
            assignment[c] = n
    return Section(assignment)


def _neighbourhoods(X: Complex) -> dict[int, frozenset[int]]:
    """Vertices of each node's active region."""
    return {
        v: frozenset(w for d in X.vertex_star(v) for w in d) for v in X.vertices
    }


def interference_free_sets(X: Complex, cap: int = DEFAULT_CAP) -> list[tuple[int, ...]]:
    """Transmitter sets whose active regions are pairwise star-disjoint.

    Ordered by size, then lexicographically.
    """
    if X.vertex_count > cap:
        raise EnumerationCapError(X.vertex_count, cap)
    hood = _neighbourhoods(X)
    nodes = list(X.vertices)
    out: list[tuple[int, ...]] = []

    def extend(chosen: tuple[int, ...], start: int, blocked: frozenset[int]) -> None:
        out.append(chosen)
        for i in range(start, len(nodes)):
            n = nodes[i]
            if hood[n] & blocked:
                continue
            extend(chosen + (n,), i + 1, blocked | hood[n])

    extend((), 0, frozenset())
    return sorted(out, key=lambda t: (len(t), t))


def enumerate_global_sections(X: Complex, cap: int = DEFAULT_CAP) -> list[Section]:
    """Every global section, one per interference-free transmitter set."""
    return [section_from_transmitters(X, t) for t in interference_free_sets(X, cap)]


def sections_to_json(sections: Iterable[Section]) -> dict:
    items = [s.to_json() for s in sections]
    return {"count": len(items), "sections": items}
