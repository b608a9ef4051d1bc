"""Mod-2 Betti numbers of cubical complexes and of arrangement cell posets.

Cubes live in doubled integer coordinates: an even entry ``2k`` is the
lattice coordinate ``k``, an odd entry ``2k+1`` the unit interval
``[k, k+1]``.  The dimension of a cube is its number of odd entries.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .dyadic import Dyadic
from .geometry import Lattice, SpanComplex


class BoundaryError(AssertionError):
    """The boundary of a boundary came out nonzero."""


def _graph_rank(columns: list) -> int:
    """Rank of a graph incidence matrix: vertices minus components touched."""
    parent: dict = {}

    def find(a):
        while parent.setdefault(a, a) != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    rank = 0
    for col in columns:
        lo = (col & -col).bit_length() - 1
        hi = col.bit_length() - 1
        ra, rb = find(lo), find(hi)
        if ra != rb:
            parent[ra] = rb
            rank += 1
    return rank


def reduce_ranks(columns_by_dim: dict) -> tuple:
    """Ranks of boundary maps over GF(2).

    ``columns_by_dim[k]`` lists the boundary of each ``k``-cell as an int
    bitmask over the indices of ``(k-1)``-cells.  Reduction runs from the
    top dimension down; a ``k``-cell already used as a pivot of the
    ``(k+1)``-boundary has a vanishing reduced column and is skipped.
    """
    ranks = {}
    pivots_of = {}
    cleared: set = set()
    for k in sorted(columns_by_dim, reverse=True):
        if k == 0:
            ranks[0] = 0
            continue
        if k == 1 and all(c.bit_count() == 2 for c in columns_by_dim[1]):
            ranks[1] = _graph_rank(columns_by_dim[1])
            continue
        pivots: dict = {}
        for j, col in enumerate(columns_by_dim[k]):
            if j in cleared:
                continue
            while col:
                p = col.bit_length() - 1
                other = pivots.get(p)
                if other is None:
                    pivots[p] = col
                    break
                col ^= other
        ranks[k] = len(pivots)
        pivots_of[k] = pivots
        cleared = set(pivots)
    return ranks, pivots_of


def betti_from_columns(counts: dict, columns_by_dim: dict, length: int) -> tuple:
    """``beta_0 .. beta_{length-1}``."""
    ranks, _ = reduce_ranks(columns_by_dim)
    out = []
    for k in range(length):
        out.append(counts.get(k, 0) - ranks.get(k, 0) - ranks.get(k + 1, 0))
    return tuple(out)


@dataclass
class CubicalComplex:
    """Elementary cubes grouped by dimension."""

    n: int
    cells: dict = field(default_factory=dict)
    lattice: Lattice | None = None

    @classmethod
    def from_complex(cls, complex_: SpanComplex, grid: Lattice) -> "CubicalComplex":
        """All elementary cubes of ``grid`` inside a closed, grid aligned complex."""
        if not complex_.is_closed:
            raise ValueError("cubical homology needs a closed complex")
        n = complex_.dim
        if not complex_.boxes:
            return cls(n, {}, grid)
        ranges = []
        for b in complex_.boxes:
            r = []
            for i, iv in enumerate(b.intervals):
                lo = grid.floor_index(i, iv.lo)
                hi = grid.ceil_index(i, iv.hi)
                if grid.point_coord(i, lo) != iv.lo or grid.point_coord(i, hi) != iv.hi:
                    raise ValueError(f"box endpoint {iv} is not on the grid")
                r.append((lo, hi))
            ranges.append(r)
        base = [min(r[i][0] for r in ranges) for i in range(n)]
        top = [max(r[i][1] for r in ranges) for i in range(n)]
        occ = np.zeros(tuple(2 * (t - b) + 1 for b, t in zip(base, top)), dtype=bool)
        for r in ranges:
            occ[tuple(slice(2 * (lo - b), 2 * (hi - b) + 1) for (lo, hi), b in zip(r, base))] = True
        cells: dict = {}
        idx = np.argwhere(occ)
        if len(idx):
            dims = (idx % 2).sum(axis=1)
            shift = np.array([2 * b for b in base])
            for k in range(n + 1):
                sel = idx[dims == k] + shift
                cells[k] = [tuple(int(v) for v in row) for row in sel]
        return cls(n, cells, grid)

    @classmethod
    def from_voxels(cls, voxels, n: int) -> "CubicalComplex":
        """Closed cubes of the given unit voxels (integer index tuples)."""
        vox = np.array(sorted(voxels), dtype=np.int64).reshape(-1, n)
        if not len(vox):
            return cls(n, {})
        base = vox.min(axis=0)
        top = vox.max(axis=0) + 1
        occ = np.zeros(tuple(2 * (top - base) + 1), dtype=bool)
        rel = vox - base
        for off in itertools.product((0, 1, 2), repeat=n):
            occ[tuple((2 * rel[:, i] + off[i]) for i in range(n))] = True
        cells: dict = {}
        idx = np.argwhere(occ)
        dims = (idx % 2).sum(axis=1)
        for k in range(n + 1):
            sel = idx[dims == k] + 2 * base
            cells[k] = [tuple(int(v) for v in row) for row in sel]
        return cls(n, cells)

    def count(self, k: int) -> int:
        return len(self.cells.get(k, ()))

    @staticmethod
    def faces(cube):
        for i, c in enumerate(cube):
            if c & 1:
                yield cube[:i] + (c - 1,) + cube[i + 1 :]
                yield cube[:i] + (c + 1,) + cube[i + 1 :]

    def boundary_columns(self, k: int) -> list:
        rows = {c: j for j, c in enumerate(self.cells.get(k - 1, ()))}
        cols = []
        for cube in self.cells.get(k, ()):
            mask = 0
            for f in self.faces(cube):
                mask ^= 1 << rows[f]
            cols.append(mask)
        return cols

    def check_boundary_squared(self) -> None:
        for k in range(2, self.n + 1):
            for cube in self.cells.get(k, ()):
                acc: dict = {}
                for f in self.faces(cube):
                    for g in self.faces(f):
                        acc[g] = acc.get(g, 0) ^ 1
                if any(acc.values()):
                    raise BoundaryError(f"boundary of boundary of {cube} is nonzero")

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * len(v) for k, v in self.cells.items())

    def betti_numbers(self, check: bool = True) -> tuple:
        if check:
            self.check_boundary_squared()
        counts = {k: len(v) for k, v in self.cells.items() if v}
        if not counts:
            return (0,) * (self.n + 1)
        cols = {k: self.boundary_columns(k) for k in counts}
        betti = betti_from_columns(counts, cols, self.n + 1)
        if check and sum((-1) ** k * b for k, b in enumerate(betti)) != self.euler_characteristic():
            raise BoundaryError("Betti numbers disagree with the Euler characteristic")
        return betti

    def one_cycle(self):
        """A 1-cycle (list of vertex cubes) that is not a boundary, or None."""
        verts = self.cells.get(0, [])
        edges = self.cells.get(1, [])
        if not edges:
            return None
        vidx = {v: j for j, v in enumerate(verts)}
        _, pivots_of = reduce_ranks({2: self.boundary_columns(2)} if self.cells.get(2) else {})
        pivots = pivots_of.get(2, {})
        parent = list(range(len(verts)))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        tree: dict = {j: [] for j in range(len(verts))}
        for ei, e in enumerate(edges):
            a, b = (vidx[f] for f in self.faces(e))
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
                tree[a].append((b, ei))
                tree[b].append((a, ei))
                continue
            path = _tree_path(tree, a, b)
            if path is None:
                continue
            mask = 1 << ei
            for _, te in path:
                mask ^= 1 << te
            reduced = mask
            while reduced:
                p = reduced.bit_length() - 1
                if p not in pivots:
                    break
                reduced ^= pivots[p]
            if reduced:
                loop = [verts[a]] + [verts[v] for v, _ in path]
                return loop
        return None

    def coords(self, cube) -> tuple:
        """Real coordinates of a vertex cube."""
        if self.lattice is None:
            return tuple(Fraction(c, 2) for c in cube)
        return tuple(self.lattice.point_coord(i, c // 2) for i, c in enumerate(cube))


def _tree_path(tree, a, b):
    """Vertices and edges along the forest path from ``a`` to ``b``."""
    prev = {a: None}
    stack = [a]
    while stack:
        u = stack.pop()
        if u == b:
            break
        for v, e in tree[u]:
            if v not in prev:
                prev[v] = (u, e)
                stack.append(v)
    if b not in prev:
        return None
    out = []
    u = b
    while prev[u] is not None:
        p, e = prev[u]
        out.append((u, e))
        u = p
    out.reverse()
    return out


def coordinate_unit(complex_: SpanComplex):
    """Largest ``2**-e`` dividing every box endpoint (at most 1)."""
    e = 0
    for b in complex_.boxes:
        for iv in b.intervals:
            for v in (iv.lo, iv.hi):
                e = max(e, Dyadic.of(v).exponent)
    return Dyadic(1, e)


def betti_numbers(complex_: SpanComplex, grid: Lattice = None) -> tuple:
    """Mod-2 Betti numbers ``(beta_0, ..., beta_n)``.

    Closed complexes go through the cubical complex on ``grid`` (default:
    the coarsest dyadic lattice carrying every endpoint).  Anything else
    uses the order complex of the occupied arrangement cells.
    """
    if complex_.is_closed:
        if grid is None:
            grid = Lattice.cubic(complex_.dim, coordinate_unit(complex_))
        return CubicalComplex.from_complex(complex_, grid).betti_numbers()
    if grid is not None:
        raise ValueError("a cubical grid needs a closed complex")
    return poset_betti(complex_)


def poset_betti(complex_: SpanComplex) -> tuple:
    """Betti numbers of the order complex of the occupied arrangement cells.

    For a union of relatively open cells this order complex is homotopy
    equivalent to the union, so half-open complexes are handled as well.
    """
    arr = complex_.arrangement
    occupied = set(arr.occupied_cells())
    if not occupied:
        return (0,) * (complex_.dim + 1)

    def proper_faces(cell):
        odd = [i for i, c in enumerate(cell) if c & 1]
        for choice in itertools.product((-1, 0, 1), repeat=len(odd)):
            if not any(choice):
                continue
            f = list(cell)
            for i, d in zip(odd, choice):
                f[i] += d
            yield tuple(f)

    def dim(cell):
        return sum(c & 1 for c in cell)

    chains_top: dict = {}
    for cell in sorted(occupied, key=dim):
        chains = [(cell,)]
        for f in proper_faces(cell):
            if f in occupied:
                chains.extend(ch + (cell,) for ch in chains_top[f])
        chains_top[cell] = chains
    by_dim: dict = {}
    for chains in chains_top.values():
        for ch in chains:
            by_dim.setdefault(len(ch) - 1, []).append(ch)
    index = {k: {s: j for j, s in enumerate(v)} for k, v in by_dim.items()}
    cols = {}
    for k, simplices in by_dim.items():
        if k == 0:
            cols[0] = [0] * len(simplices)
            continue
        rows = index[k - 1]
        col = []
        for s in simplices:
            mask = 0
            for i in range(len(s)):
                mask ^= 1 << rows[s[:i] + s[i + 1 :]]
            col.append(mask)
        cols[k] = col
    counts = {k: len(v) for k, v in by_dim.items()}
    betti = betti_from_columns(counts, cols, max(counts) + 1)
    return (betti + (0,) * complex_.dim)[: complex_.dim + 1]


def cycle_to_off(loop, coords) -> str:
    """A closed polyline as an OFF file with a single polygonal face."""
    pts = [coords(v) for v in loop]
    dim = len(pts[0])
    lines = ["OFF", f"{len(pts)} 1 0"]
    for p in pts:
        xyz = [float(c) for c in p] + [0.0] * (3 - dim)
        lines.append(" ".join(repr(c) for c in xyz[:3]))
    lines.append(f"{len(pts)} " + " ".join(str(i) for i in range(len(pts))))
    return "\n".join(lines) + "\n"
