"""Local homology scores and cohomology of the vector activation sheaf."""

from __future__ import annotations

import csv
import io
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Literal

from sheafnet.activation import all_stalk_members, region_of_influence
from sheafnet.complex import (
    BinaryMatrix,
    Cell,
    ChainComplex,
    Complex,
    as_cell,
    chain_complex,
    faces,
    is_closed,
    rank,
)
from sheafnet.errors import InputFormatError, NotClosedError, NotInComplexError

DEFAULT_MAX_K = 2


@dataclass(frozen=True)
class LocalHomologyScore:
    cell: Cell
    lh: dict[int, int]

    @property
    def dim(self) -> int:
        return len(self.cell) - 1


def relative_chain_complex(
    X: Complex, roi: Iterable[Cell], max_dim: int | None = None, check: bool = True
) -> ChainComplex:
    """Chains of the pair (X, X minus roi): cells of ``roi`` with truncated boundaries."""
    roi = frozenset(roi)
    if check:
        if not roi <= X.cellset:
            raise NotInComplexError("region of influence has cells outside the complex")
        if not is_closed(X.cellset - roi):
            raise NotClosedError("complement of region of influence is not closed")
    return chain_complex(X, roi, max_dim=max_dim)


def local_homology(X: Complex, c: Cell, max_k: int = DEFAULT_MAX_K) -> LocalHomologyScore:
    """Dimensions of H_k(X, X minus roi(c)) over GF(2) for k = 0..max_k."""
    if c not in X:
        raise NotInComplexError(f"cell {list(c)} not in complex")
    roi = region_of_influence(X, [c])
    # H_k only sees cells up to dimension k+1
    chains = relative_chain_complex(X, roi, max_dim=max_k + 1, check=False)
    return LocalHomologyScore(c, chains.homology_dims(max_k))


def lh_field(
    X: Complex, max_k: int = DEFAULT_MAX_K, cells: Iterable[Cell] | None = None
) -> list[LocalHomologyScore]:
    targets = X.cells() if cells is None else sorted(cells, key=lambda c: (len(c), c))
    return [local_homology(X, c, max_k) for c in targets]


def lh_averages(scores: Sequence[LocalHomologyScore], k: int) -> dict[str, float | None]:
    """Mean LH_k over nodes only and over all scored cells."""

    def mean(vals: list[int]) -> float | None:
        return sum(vals) / len(vals) if vals else None

    return {
        "nodes": mean([s.lh.get(k, 0) for s in scores if s.dim == 0]),
        "cells": mean([s.lh.get(k, 0) for s in scores]),
    }


def write_lh_csv(scores: Sequence[LocalHomologyScore], sink: io.TextIOBase, max_k: int) -> None:
    sink.write(",".join(["cell", "dim"] + [f"lh{k}" for k in range(max_k + 1)]) + "\n")
    for s in scores:
        values = [s.dim] + [s.lh.get(k, 0) for k in range(max_k + 1)]
        cell = ",".join(map(str, s.cell))
        sink.write(f'"{cell}",' + ",".join(map(str, values)) + "\n")


def read_lh_csv(source: str | Path | io.TextIOBase) -> list[LocalHomologyScore]:
    if isinstance(source, (str, Path)):
        with open(source, newline="", encoding="utf-8") as fh:
            return read_lh_csv(fh)
    reader = csv.reader(source)
    header = next(reader, None)
    if not header or header[:2] != ["cell", "dim"] or any(
        h != f"lh{k}" for k, h in enumerate(header[2:])
    ):
        raise InputFormatError(f"expected header cell,dim,lh0,..., got {header}", line=1)
    out = []
    for row in reader:
        if not row:
            continue
        line = reader.line_num
        if len(row) != len(header):
            raise InputFormatError(f"expected {len(header)} fields, got {len(row)}", line=line)
        try:
            cell = as_cell(int(v) for v in row[0].split(","))
            lh = {k: int(v) for k, v in enumerate(row[2:])}
            if int(row[1]) != len(cell) - 1 or any(v < 0 for v in lh.values()):
                raise ValueError("inconsistent dim or negative score")
        except ValueError as exc:
            raise InputFormatError(str(exc), line=line) from None
        out.append(LocalHomologyScore(cell, lh))
    return out


@dataclass(frozen=True)
class SheafCochainComplex:
    """Cochains of the vector activation sheaf over GF(2).

    ``bases[k]`` lists (cell, node) pairs: one basis vector per node in the
    stalk of each k-cell. ``coboundaries[k]`` maps degree k to degree k+1.
    ``signs[k]`` holds the same matrix with simplicial orientation signs, as
    ``{(row, col): ±1}``, for the rational cross-check.
    """

    bases: tuple[tuple[tuple[Cell, int], ...], ...]
    coboundaries: tuple[BinaryMatrix, ...]
    signs: tuple[dict[tuple[int, int], int], ...]
    node_count: int

    def stalk_dims(self) -> dict[Cell, int]:
        dims: dict[Cell, int] = {}
        for basis in self.bases:
            for c, _ in basis:
                dims[c] = dims.get(c, 0) + 1
        return dims

    def coboundary(self, k: int) -> BinaryMatrix:
        here = len(self.bases[k]) if 0 <= k < len(self.bases) else 0
        above = len(self.bases[k + 1]) if 0 <= k + 1 < len(self.bases) else 0
        if 0 <= k < len(self.coboundaries):
            return self.coboundaries[k]
        return BinaryMatrix.zeros(above, here)


def vector_sheaf_cochain(X: Complex) -> SheafCochainComplex:
    members = all_stalk_members(X)
    bases = tuple(
        tuple((c, n) for c in X.cells(k) for n in sorted(members[c])) for k in range(X.dim + 1)
    )
    index = [{b: i for i, b in enumerate(basis)} for basis in bases]
    cobs = []
    signs = []
    for k in range(X.dim):
        above = index[k + 1]
        cols: list[list[int]] = [[] for _ in bases[k]]
        signed: dict[tuple[int, int], int] = {}
        for d in X.cells(k + 1):
            for pos, c in enumerate(faces(d)):
                for n in members[d]:
                    # basis projection: node n survives from c to d iff n is in d's stalk
                    col = index[k][(c, n)]
                    row = above[(d, n)]
                    cols[col].append(row)
                    signed[(row, col)] = -1 if pos % 2 else 1
        cobs.append(BinaryMatrix(len(bases[k + 1]), len(bases[k]), tuple(tuple(sorted(c)) for c in cols)))
        signs.append(signed)
    return SheafCochainComplex(bases, tuple(cobs), tuple(signs), X.vertex_count)


def rank_rational(entries: dict[tuple[int, int], int], rows: int, cols: int) -> int:
    """Rank over the rationals by exact fraction elimination."""
    matrix: dict[int, dict[int, Fraction]] = {}
    for (r, c), v in entries.items():
        if v:
            matrix.setdefault(r, {})[c] = Fraction(v)
    rank_ = 0
    pivots: dict[int, dict[int, Fraction]] = {}
    for r in range(rows):
        row = dict(matrix.get(r, {}))
        while row:
            lead = min(row)
            p = pivots.get(lead)
            if p is None:
                pivots[lead] = row
                rank_ += 1
                break
            factor = row[lead] / p[lead]
            for c, v in p.items():
                nv = row.get(c, Fraction(0)) - factor * v
                if nv:
                    row[c] = nv
                else:
                    row.pop(c, None)
    return rank_


def sheaf_cohomology_dims(
    cc: SheafCochainComplex, field: Literal["gf2", "rational"] = "gf2"
) -> dict[int, int]:
    """dim H^k = dim C^k - rank δ^k - rank δ^(k-1)."""
    top = len(cc.bases)
    if field == "gf2":
        ranks = [rank(cc.coboundary(k)) for k in range(top)]
    elif field == "rational":
        ranks = [
            rank_rational(cc.signs[k], len(cc.bases[k + 1]), len(cc.bases[k])) if k < len(cc.signs) else 0
            for k in range(top)
        ]
    else:
        raise ValueError(f"unknown field {field!r}")
    return {
        k: len(cc.bases[k]) - ranks[k] - (ranks[k - 1] if k else 0) for k in range(top)
    }


def cohomology_report(X: Complex, field: Literal["gf2", "rational"] = "gf2") -> dict:
    cc = vector_sheaf_cochain(X)
    dims = sheaf_cohomology_dims(cc, field)
    holds = all(v == (X.vertex_count if k == 0 else 0) for k, v in dims.items())
    return {
        "h": {str(k): v for k, v in dims.items()},
        "node_count": X.vertex_count,
        "theorem_holds": holds,
    }
