"""Independent reference computations used by the test-suite.

Nothing here calls into the library's algebra: cells are plain tuples,
homology is counted by exhaustive enumeration of chain spaces, sections are
found by backtracking straight from the sheaf definition, and disk nerves are
sampled on a jittered grid.
"""

from __future__ import annotations

import math
import random
from itertools import combinations

import numpy as np


def all_faces(cell):
    return [f for k in range(1, len(cell) + 1) for f in combinations(cell, k)]


def closure_of(cells):
    return {f for c in cells for f in all_faces(tuple(sorted(c)))}


def _span_images(columns: list[int]) -> np.ndarray:
    """Images of every GF(2) combination of ``columns`` (bitmasks)."""
    images = np.zeros(1, dtype=np.int64)
    for col in columns:
        images = np.concatenate([images, images ^ np.int64(col)])
    return images


def brute_relative_homology(cells, roi, k: int) -> int:
    """dim H_k of the chains on ``roi`` modulo everything else, by counting.

    |Z_k| is the number of k-chains with zero boundary and |B_k| the number of
    distinct boundaries of (k+1)-chains; both are powers of two.
    """
    roi = {tuple(c) for c in roi}
    layer = lambda d: sorted(c for c in roi if len(c) == d + 1)  # noqa: E731

    def boundary_masks(d):
        below = {c: i for i, c in enumerate(layer(d - 1))} if d >= 1 else {}
        masks = []
        for c in layer(d):
            m = 0
            for f in combinations(c, len(c) - 1) if d >= 1 else ():
                if f in below:
                    m ^= 1 << below[f]
            masks.append(m)
        return masks

    cycles = int(np.count_nonzero(_span_images(boundary_masks(k)) == 0))
    boundaries = len(np.unique(_span_images(boundary_masks(k + 1))))
    z, b = math.log2(cycles), math.log2(boundaries)
    assert z.is_integer() and b.is_integer()
    return int(z - b)


def roi_of(cells, c):
    """Literal star of the closure of ``c``."""
    cl = set(all_faces(tuple(c)))
    return {d for d in cells if any(set(b) <= set(d) for b in cl)}


def random_complex(rng: random.Random, max_vertices: int = 8, max_chain: int = 20):
    """Random face-closed cell set whose relative chain groups stay small."""
    while True:
        n = rng.randint(1, max_vertices)
        verts = list(range(n))
        facets = [tuple(sorted(rng.sample(verts, rng.randint(1, min(4, n))))) for _ in range(rng.randint(1, 6))]
        cells = closure_of(facets + [(v,) for v in verts])
        sizes = [sum(1 for c in cells if len(c) == d) for d in range(1, 6)]
        if max(sizes) <= max_chain:
            return cells


def stalks_of(cells):
    return {c: {v for d in cells if set(c) <= set(d) for v in d} for c in cells}


BOT = None


def brute_global_sections(cells):
    """All global sections, found by backtracking over vertex values.

    Every cell value is pushed up from any of its vertices, so vertex values
    determine a section; each candidate is then checked on every face pair.
    """
    cells = sorted(cells, key=lambda c: (len(c), c))
    stalks = stalks_of(cells)
    verts = sorted(c[0] for c in cells if len(c) == 1)
    by_top = {}
    for d in cells:
        by_top.setdefault(max(d), []).append(d)

    def push(value, d):
        return value if value is not BOT and value in stalks[d] else BOT

    out = []
    values = {}

    def check_cells_ending_at(v):
        for d in by_top.get(v, []):
            pushed = {push(values[u], d) for u in d}
            if len(pushed) > 1:
                return False
        return True

    def search(i):
        if i == len(verts):
            s = {d: push(values[d[0]], d) for d in cells}
            for d in cells:
                for c in all_faces(d):
                    if s[c] is not BOT and s[c] not in stalks[c]:
                        return
                    if push(s[c], d) != s[d]:
                        return
            out.append(s)
            return
        v = verts[i]
        for value in [BOT] + sorted(stalks[(v,)]):
            values[v] = value
            if check_cells_ending_at(v):
                search(i + 1)
        del values[v]

    search(0)
    return out


def jittered_margins(disks, per_side: int = 1000, seed: int = 0):
    """Best sampled witness margin for every subset of disks.

    ``disks`` is a list of (x, y, r). One uniform sample per cell of a
    ``per_side`` x ``per_side`` grid over the bounding box; the margin of a
    point for a subset is min over its disks of (r - distance). Returns
    (margins, slack) where the true margin lies in [sampled, sampled + slack].
    """
    xs = [x - r for x, y, r in disks] + [x + r for x, y, r in disks]
    ys = [y - r for x, y, r in disks] + [y + r for x, y, r in disks]
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    hx, hy = (x1 - x0) / per_side, (y1 - y0) / per_side
    rng = np.random.default_rng(seed)
    gx, gy = np.meshgrid(np.arange(per_side), np.arange(per_side), indexing="ij")
    px = (x0 + (gx + rng.random(gx.shape)) * hx).ravel()
    py = (y0 + (gy + rng.random(gy.shape)) * hy).ravel()
    per_disk = [r - np.hypot(px - x, py - y) for x, y, r in disks]
    slack = 2 * math.hypot(hx, hy)
    margins = {}

    def walk(subset, running, start):
        for i in range(start, len(disks)):
            nxt = per_disk[i] if running is None else np.minimum(running, per_disk[i])
            best = float(nxt.max())
            cell = subset + (i,)
            margins[cell] = best
            if best + slack > 0:
                walk(cell, nxt, i + 1)
            else:
                # every superset is at least as bad
                for extra in range(1, len(disks) - i):
                    for rest in combinations(range(i + 1, len(disks)), extra):
                        margins[cell + rest] = best

    walk((), None, 0)
    return margins, slack
