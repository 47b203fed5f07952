"""Graph approximations V_{m,n} of the m-branch tree.

Level 0 is the complete graph K_m on the boundary vertices.  Each refinement
replaces every cell (a K_m) by m sub-cells glued at a new epicenter; sub-cell
j keeps vertex j of its parent.  The construction is purely combinatorial.

Vertex order is level by level: the vertices of V_{m,n-1} form a prefix of
V_{m,n}.  The interior vertices of one refined cell are contiguous and laid
out as (m-2) blocks of m (block k holds the k-th new vertex of sub-cells
0..m-1) followed by the epicenter.  At n = 1 this is exactly the boundary /
interior layout used for the A, B; C, D block partition.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Sequence

from .errors import DomainError, ResourceError

DEFAULT_MAX_VERTICES = 10**6


@dataclass(frozen=True)
class Vertex:
    """A vertex labelled by the cell it was created in and its slot there."""

    word: tuple[int, ...]
    slot: int

    def label(self, m: int) -> str:
        sep = "" if m <= 10 else "."
        word = sep.join(str(i) for i in self.word) or "e"
        return f"{word}/{self.slot}"


def num_vertices(m: int, n: int) -> int:
    """dim_n = 1 + (m-1) m^n."""
    return 1 + (m - 1) * m**n


def num_junctions(m: int, n: int) -> int:
    return (m**n - 1) // (m - 1)


def interior_size(m: int) -> int:
    """Number of vertices added when one cell is refined: m(m-2) + 1."""
    return m * (m - 2) + 1


@dataclass(frozen=True)
class TreeGraph:
    m: int
    n: int
    vertices: tuple[Vertex, ...]
    adjacency: tuple[tuple[int, ...], ...]
    boundary: tuple[int, ...]
    cells: tuple[tuple[int, ...], ...]
    cell_words: tuple[tuple[int, ...], ...]

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u, nbrs in enumerate(self.adjacency) for v in nbrs if u < v]

    def num_edges(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def cell_counts(self) -> list[int]:
        counts = [0] * self.num_vertices
        for cell in self.cells:
            for v in cell:
                counts[v] += 1
        return counts

    def junctions(self) -> list[int]:
        return [v for v, c in enumerate(self.cell_counts()) if c == self.m]

    def degrees(self) -> list[int]:
        return [len(a) for a in self.adjacency]

    def labels(self) -> list[str]:
        return [v.label(self.m) for v in self.vertices]


def _check_params(m, n):
    if not isinstance(m, int) or m < 3:
        raise DomainError(f"m must be an integer >= 3, got {m!r}")
    if not isinstance(n, int) or n < 0:
        raise DomainError(f"n must be an integer >= 0, got {n!r}")


def build_graph(
    m: int,
    n: int,
    max_vertices: int = DEFAULT_MAX_VERTICES,
    branch_order: Sequence[int] | None = None,
) -> TreeGraph:
    """Construct V_{m,n}.

    ``branch_order`` permutes the order in which the m sub-cells of every cell
    are enumerated (and hence the vertex numbering); the graph is isomorphic
    for every choice.  Default is 0, 1, ..., m-1.
    """
    _check_params(m, n)
    if num_vertices(m, n) > max_vertices:
        raise ResourceError(
            f"V_({m},{n}) has {num_vertices(m, n)} vertices, over the cap of {max_vertices}"
        )
    order = list(range(m)) if branch_order is None else list(branch_order)
    if sorted(order) != list(range(m)):
        raise DomainError(f"branch_order must be a permutation of 0..{m - 1}")

    vertices = [Vertex((), j) for j in range(m)]
    cells: list[tuple[int, ...]] = [tuple(range(m))]
    words: list[tuple[int, ...]] = [()]

    for _ in range(n):
        new_cells, new_words = [], []
        for cell, word in zip(cells, words):
            base = len(vertices)
            # interior in block layout: new vertex (k, j) for k < m-2, then center
            center = base + m * (m - 2)
            children = {}
            for j in range(m):
                free_slots = [s for s in range(m) if s != j]
                members = [base + k * m + j for k in range(m - 2)] + [center]
                sub = [0] * m
                sub[j] = cell[j]
                for s, v in zip(free_slots, members):
                    sub[s] = v
                children[j] = tuple(sub)
            for k in range(m - 2):
                for j in range(m):
                    slot = [s for s in range(m) if s != j][k]
                    vertices.append(Vertex(word + (j,), slot))
            vertices.append(Vertex(word + (order[0],), children[order[0]].index(center)))
            for j in order:
                new_cells.append(children[j])
                new_words.append(word + (j,))
        cells, words = new_cells, new_words

    nbrs: list[set[int]] = [set() for _ in vertices]
    for cell in cells:
        for u in cell:
            for v in cell:
                if u != v:
                    nbrs[u].add(v)
    return TreeGraph(
        m=m,
        n=n,
        vertices=tuple(vertices),
        adjacency=tuple(tuple(sorted(s)) for s in nbrs),
        boundary=tuple(range(m)),
        cells=tuple(cells),
        cell_words=tuple(words),
    )


def degree(g: TreeGraph, v: int) -> int:
    if not 0 <= v < g.num_vertices:
        raise IndexError(f"vertex {v} out of range for V_({g.m},{g.n})")
    return len(g.adjacency[v])


def export_graph(g: TreeGraph, format: str = "csv") -> bytes:
    """Serialize as a DOT graph or a CSV edge list with header ``u,v``."""
    buf = io.StringIO()
    if format == "csv":
        buf.write("u,v\n")
        for u, v in g.edges():
            buf.write(f"{u},{v}\n")
    elif format == "dot":
        buf.write(f"graph V_{g.m}_{g.n} {{\n")
        for i, label in enumerate(g.labels()):
            buf.write(f'  {i} [label="{label}"];\n')
        for u, v in g.edges():
            buf.write(f"  {u} -- {v};\n")
        buf.write("}\n")
    else:
        raise DomainError(f"unknown graph format {format!r} (expected 'dot' or 'csv')")
    return buf.getvalue().encode()
