"""Abstract simplicial complexes and their chain complexes over GF(2).

Cells are canonical tuples of strictly increasing non-negative vertex ids.
Every ordering in this module is (dimension, lexicographic), so matrices built
from a complex are reproducible bit for bit.
"""

from __future__ import annotations

import json
from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from itertools import combinations

from sheafnet.errors import InputFormatError, MalformedCellError, NotClosedError, NotInComplexError

Cell = tuple[int, ...]


def as_cell(vertices: Iterable[int]) -> Cell:
    """Return the canonical form of a vertex collection."""
    vs = list(vertices)
    if not vs:
        raise MalformedCellError("empty cell")
    for v in vs:
        if isinstance(v, bool) or not isinstance(v, int) or v < 0:
            raise MalformedCellError(f"bad vertex id {v!r} in {vs}")
    cell = tuple(sorted(vs))
    if len(set(cell)) != len(cell):
        raise MalformedCellError(f"duplicate vertex in cell {vs}")
    return cell


def cell_key(c: Cell) -> tuple[int, Cell]:
    return (len(c), c)


def faces(c: Cell) -> list[Cell]:
    """Codimension-one faces, in the order of the removed vertex."""
    return [c[:i] + c[i + 1 :] for i in range(len(c))] if len(c) > 1 else []


def subsets(c: Cell) -> Iterator[Cell]:
    for k in range(1, len(c) + 1):
        yield from combinations(c, k)


def closure(cells: Iterable[Iterable[int]], max_dim: int | None = None) -> frozenset[Cell]:
    """All non-empty faces of the given cells, optionally truncated to a skeleton."""
    out: set[Cell] = set()
    for raw in cells:
        c = as_cell(raw)
        if c in out:
            continue
        top = len(c) if max_dim is None else min(len(c), max_dim + 1)
        for k in range(1, top + 1):
            out.update(combinations(c, k))
    return frozenset(out)


class Complex:
    """An immutable abstract simplicial complex.

    The constructor expects a face-closed collection and raises
    :class:`NotClosedError` otherwise; use :func:`build_closure` to close an
    arbitrary collection first.
    """

    def __init__(self, cells: Iterable[Cell] = ()) -> None:
        cellset = frozenset(as_cell(c) for c in cells)
        for c in cellset:
            for f in faces(c):
                if f not in cellset:
                    raise NotClosedError(f"face {list(f)} of {list(c)} missing")
        by_dim: dict[int, list[Cell]] = {}
        for c in cellset:
            by_dim.setdefault(len(c) - 1, []).append(c)
        top = max(by_dim, default=-1)
        self._by_dim: tuple[tuple[Cell, ...], ...] = tuple(
            tuple(sorted(by_dim.get(k, ()))) for k in range(top + 1)
        )
        self._cells = cellset
        self._index = [{c: i for i, c in enumerate(layer)} for layer in self._by_dim]
        vertex_star: dict[int, list[Cell]] = {}
        for layer in self._by_dim:
            for c in layer:
                for v in c:
                    vertex_star.setdefault(v, []).append(c)
        self._vertex_star = {v: tuple(cs) for v, cs in vertex_star.items()}

    @property
    def dim(self) -> int:
        """Largest cell dimension; -1 for the empty complex."""
        return len(self._by_dim) - 1

    @property
    def vertices(self) -> tuple[int, ...]:
        return tuple(c[0] for c in self.cells(0))

    @property
    def vertex_count(self) -> int:
        return len(self.cells(0))

    def cells(self, k: int | None = None) -> tuple[Cell, ...]:
        """Cells of dimension ``k``, or all cells in canonical order."""
        if k is None:
            return tuple(c for layer in self._by_dim for c in layer)
        if 0 <= k < len(self._by_dim):
            return self._by_dim[k]
        return ()

    def index(self, c: Cell) -> int:
        """Position of ``c`` among the cells of its dimension."""
        try:
            return self._index[len(c) - 1][c]
        except (IndexError, KeyError):
            raise NotInComplexError(f"cell {list(c)} not in complex") from None

    def vertex_star(self, v: int) -> tuple[Cell, ...]:
        return self._vertex_star.get(v, ())

    def cofaces(self, c: Cell) -> tuple[Cell, ...]:
        """Every cell containing ``c``, including ``c`` itself."""
        if c not in self._cells:
            raise NotInComplexError(f"cell {list(c)} not in complex")
        s = set(c)
        return tuple(d for d in self._vertex_star[c[0]] if s.issubset(d))

    def counts(self) -> list[int]:
        return [len(layer) for layer in self._by_dim]

    def skeleton(self, k: int) -> Complex:
        return Complex(c for c in self._cells if len(c) <= k + 1)

    def relabel(self, mapping: dict[int, int]) -> Complex:
        return Complex(as_cell(mapping[v] for v in c) for c in self._cells)

    def __contains__(self, c: object) -> bool:
        return c in self._cells

    def __iter__(self) -> Iterator[Cell]:
        return iter(self.cells())

    def __len__(self) -> int:
        return len(self._cells)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Complex):
            return NotImplemented
        return self._cells == other._cells

    def __hash__(self) -> int:
        return hash(self._cells)

    def __repr__(self) -> str:
        return f"Complex(vertices={self.vertex_count}, counts={self.counts()})"

    @property
    def cellset(self) -> frozenset[Cell]:
        return self._cells


def build_closure(cells: Iterable[Iterable[int]], max_dim: int | None = None) -> Complex:
    """Smallest complex containing ``cells`` (or its ``max_dim`` skeleton)."""
    return Complex(closure(cells, max_dim))


def star(X: Complex, Y: Iterable[Cell]) -> frozenset[Cell]:
    """Cells of ``X`` having at least one face in ``Y``."""
    out: set[Cell] = set()
    for b in Y:
        out.update(X.cofaces(b))
    return frozenset(out)


def facets(X: Complex) -> list[Cell]:
    """Cells with no strict coface, in canonical order."""
    covered: set[Cell] = set()
    for k in range(1, X.dim + 1):
        for c in X.cells(k):
            covered.update(faces(c))
    return [c for c in X.cells() if c not in covered]


def is_closed(cells: Iterable[Cell]) -> bool:
    cs = set(cells)
    return all(f in cs for c in cs for f in faces(c))


def is_connected(cells: Iterable[Cell]) -> bool:
    """Connectivity under the relation "shares a vertex"; empty sets count as connected."""
    cs = list(cells)
    if not cs:
        return True
    by_vertex: dict[int, list[Cell]] = {}
    for c in cs:
        for v in c:
            by_vertex.setdefault(v, []).append(c)
    seen_v: set[int] = set()
    todo = [cs[0][0]]
    while todo:
        v = todo.pop()
        if v in seen_v:
            continue
        seen_v.add(v)
        for c in by_vertex[v]:
            todo.extend(w for w in c if w not in seen_v)
    return all(c[0] in seen_v for c in cs)


@dataclass(frozen=True)
class BinaryMatrix:
    """Sparse matrix over GF(2) stored as per-column sorted row indices."""

    rows: int
    cols: int
    columns: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if len(self.columns) != self.cols:
            raise ValueError(f"expected {self.cols} columns, got {len(self.columns)}")
        for col in self.columns:
            if any(not 0 <= r < self.rows for r in col):
                raise ValueError(f"row index out of range in column {col}")

    @classmethod
    def zeros(cls, rows: int, cols: int) -> BinaryMatrix:
        return cls(rows, cols, ((),) * cols)

    @classmethod
    def from_dense(cls, dense: Iterable[Iterable[int]], cols: int | None = None) -> BinaryMatrix:
        data = [list(r) for r in dense]
        ncols = cols if cols is not None else (len(data[0]) if data else 0)
        columns = tuple(tuple(i for i, r in enumerate(data) if r[j] % 2) for j in range(ncols))
        return cls(len(data), ncols, columns)

    def to_dense(self) -> list[list[int]]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for j, col in enumerate(self.columns):
            for i in col:
                out[i][j] = 1
        return out

    def column_masks(self) -> list[int]:
        masks = []
        for col in self.columns:
            m = 0
            for i in col:
                m |= 1 << i
            masks.append(m)
        return masks

    def transpose(self) -> BinaryMatrix:
        cols: list[list[int]] = [[] for _ in range(self.rows)]
        for j, col in enumerate(self.columns):
            for i in col:
                cols[i].append(j)
        return BinaryMatrix(self.cols, self.rows, tuple(tuple(c) for c in cols))

    def __matmul__(self, other: BinaryMatrix) -> BinaryMatrix:
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        mine = self.column_masks()
        out = []
        for col in other.columns:
            acc = 0
            for k in col:
                acc ^= mine[k]
            out.append(tuple(i for i in range(self.rows) if acc >> i & 1))
        return BinaryMatrix(self.rows, other.cols, tuple(out))

    def is_zero(self) -> bool:
        return not any(self.columns)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)


def rank_of_masks(masks: Iterable[int]) -> int:
    pivots: dict[int, int] = {}
    for v in masks:
        while v:
            lead = v.bit_length() - 1
            p = pivots.get(lead)
            if p is None:
                pivots[lead] = v
                break
            v ^= p
    return len(pivots)


def rank(M: BinaryMatrix) -> int:
    """Rank over GF(2) by Gaussian elimination on bit-packed columns."""
    return rank_of_masks(M.column_masks())


def boundary_matrix(X: Complex, k: int) -> BinaryMatrix:
    """Matrix of the boundary map from k-chains to (k-1)-chains of ``X``."""
    col_cells = X.cells(k)
    nrows = len(X.cells(k - 1)) if k >= 1 else 0
    if not col_cells or k < 1:
        return BinaryMatrix.zeros(nrows, len(col_cells))
    columns = tuple(tuple(sorted(X.index(f) for f in faces(c))) for c in col_cells)
    return BinaryMatrix(nrows, len(col_cells), columns)


@dataclass(frozen=True)
class ChainComplex:
    """A GF(2) chain complex with explicit cell bases.

    ``boundaries[k]`` maps degree k to degree k-1; ``boundaries[0]`` is the
    zero map out of degree 0.
    """

    bases: tuple[tuple[Cell, ...], ...]
    boundaries: tuple[BinaryMatrix, ...]

    def boundary(self, k: int) -> BinaryMatrix:
        if 0 <= k < len(self.boundaries):
            return self.boundaries[k]
        below = len(self.bases[k - 1]) if 0 <= k - 1 < len(self.bases) else 0
        here = len(self.bases[k]) if 0 <= k < len(self.bases) else 0
        return BinaryMatrix.zeros(below, here)

    def homology_dims(self, max_k: int) -> dict[int, int]:
        ranks = [rank(self.boundary(k)) for k in range(max_k + 2)]
        dims = {}
        for k in range(max_k + 1):
            n = len(self.bases[k]) if k < len(self.bases) else 0
            dims[k] = n - ranks[k] - ranks[k + 1]
        return dims


def chain_complex(
    X: Complex, cells: Iterable[Cell] | None = None, max_dim: int | None = None
) -> ChainComplex:
    """Chain complex spanned by ``cells`` (default: all of ``X``).

    Faces outside ``cells`` are dropped from boundaries, which is the quotient
    by the complementary chains. This is only a chain complex when that
    complement is closed; callers are responsible for that.
    """
    chosen = X.cellset if cells is None else frozenset(cells)
    top = X.dim if max_dim is None else min(X.dim, max_dim)
    layers: list[list[Cell]] = [[] for _ in range(top + 1)]
    for c in chosen:
        if len(c) - 1 <= top:
            layers[len(c) - 1].append(c)
    bases = tuple(tuple(sorted(layer)) for layer in layers)
    index = [{c: i for i, c in enumerate(b)} for b in bases]
    boundaries = [BinaryMatrix.zeros(0, len(bases[0]))] if bases else []
    for k in range(1, len(bases)):
        below = index[k - 1]
        cols = tuple(
            tuple(sorted(below[f] for f in faces(c) if f in below)) for c in bases[k]
        )
        boundaries.append(BinaryMatrix(len(bases[k - 1]), len(bases[k]), cols))
    return ChainComplex(bases, tuple(boundaries))


def betti_numbers(X: Complex) -> dict[int, int]:
    return chain_complex(X).homology_dims(max(X.dim, 0))


def to_json(X: Complex) -> dict:
    return {"vertices": list(X.vertices), "facets": [list(f) for f in facets(X)]}


def from_json(obj: object, max_dim: int | None = None) -> Complex:
    """Load ``{"vertices": [...], "facets": [[...]]}``, recomputing the closure."""
    if not isinstance(obj, dict) or "facets" not in obj:
        raise InputFormatError("complex JSON must be an object with a 'facets' list")
    raw_facets = obj["facets"]
    raw_vertices = obj.get("vertices", [])
    if not isinstance(raw_facets, list) or not isinstance(raw_vertices, list):
        raise InputFormatError("'facets' and 'vertices' must be lists")
    try:
        fs = [as_cell(f) for f in raw_facets]
        vs = {as_cell([v])[0] for v in raw_vertices}
    except (MalformedCellError, TypeError) as exc:
        raise InputFormatError(f"bad cell: {exc}") from None
    stray = {v for f in fs for v in f} - vs
    if raw_vertices and stray:
        raise InputFormatError(f"facets use undeclared vertices {sorted(stray)}")
    return build_closure(fs + [(v,) for v in sorted(vs)], max_dim=max_dim)


def dumps(X: Complex) -> str:
    return json.dumps(to_json(X)) + "\n"
