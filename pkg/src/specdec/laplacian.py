"""Probabilistic Laplacian M_{m,n} = I - (neighbour averaging) and its block partition."""

from __future__ import annotations

import io
import json
from fractions import Fraction
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ResourceError
from .exact import RationalMatrix
from .graph import TreeGraph, build_graph

DEFAULT_MAX_ENTRIES = 4000 * 4000


@dataclass(frozen=True)
class ProbLaplacian:
    m: int
    n: int
    matrix: RationalMatrix
    degrees: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def boundary_count(self) -> int:
        return self.m

    def entry(self, i, j):
        return self.matrix.entry(i, j)

    def to_float(self) -> np.ndarray:
        return self.matrix.to_float()


@dataclass(frozen=True)
class BlockPartition:
    A: RationalMatrix
    B: RationalMatrix
    C: RationalMatrix
    D: RationalMatrix

    def reassemble(self) -> RationalMatrix:
        top = np.hstack([self.A.num, self.B.num])
        bottom = np.hstack([self.C.num, self.D.num])
        return RationalMatrix(np.vstack([top, bottom]), self.A.den)


def assemble(g: TreeGraph, max_entries: int = DEFAULT_MAX_ENTRIES) -> ProbLaplacian:
    """Dense M_{m,n}: 1 on the diagonal, -1/deg(i) at (i, j) for each neighbour j.

    Degrees are m-1 or m(m-1), so the common denominator m(m-1) keeps the
    numerators integral.
    """
    dim = g.num_vertices
    if dim * dim > max_entries:
        raise ResourceError(f"{dim}x{dim} Laplacian exceeds the budget of {max_entries} entries")
    m = g.m
    den = m * (m - 1)
    num = np.zeros((dim, dim), dtype=np.int64)
    degrees = np.array(g.degrees(), dtype=np.int64)
    for i, nbrs in enumerate(g.adjacency):
        num[i, i] = den
        if nbrs:
            num[i, list(nbrs)] = -(den // len(nbrs))
    return ProbLaplacian(m=m, n=g.n, matrix=RationalMatrix(num, den), degrees=degrees)


def laplacian(m: int, n: int) -> ProbLaplacian:
    return assemble(build_graph(m, n))


def block_partition(M: ProbLaplacian) -> BlockPartition:
    if M.n != 1:
        raise DomainError(f"block partition needs the depth-1 Laplacian, got n={M.n}")
    b = M.m
    mat = M.matrix
    return BlockPartition(A=mat[:b, :b], B=mat[:b, b:], C=mat[b:, :b], D=mat[b:, b:])


def symmetrize(M: ProbLaplacian) -> np.ndarray:
    """Similarity transform diag(deg)^{1/2} M diag(deg)^{-1/2}, which is symmetric."""
    root = np.sqrt(M.degrees.astype(np.float64))
    return M.to_float() * root[:, None] / root[None, :]


def _fraction_str(num, den):
    f = Fraction(int(num), den)
    return f"{f.numerator}/{f.denominator}"


def export_matrix(M: ProbLaplacian, format: str = "csv") -> bytes:
    """Row-major exact entries as ``p/q`` strings, in CSV or JSON."""
    rows = [[_fraction_str(x, M.matrix.den) for x in row] for row in M.matrix.num]
    if format == "csv":
        buf = io.StringIO()
        for row in rows:
            buf.write(",".join(row) + "\n")
        return buf.getvalue().encode()
    if format == "json":
        return json.dumps({"m": M.m, "n": M.n, "dim": M.dim, "entries": rows}).encode()
    raise DomainError(f"unknown matrix format {format!r}")
