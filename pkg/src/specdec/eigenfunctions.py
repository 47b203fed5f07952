"""Eigenvector extension from V_{m,n-1} to V_{m,n}, and oracle eigenspaces at exceptional values."""

from __future__ import annotations

import io
from fractions import Fraction

import numpy as np
import scipy.linalg as la

from . import decimation as dec
from .errors import DomainError, ResourceError
from .exact import solve_fractions
from .graph import TreeGraph, build_graph, interior_size, num_vertices
from .laplacian import ProbLaplacian, symmetrize
from .oracle import MAX_DIM
from .schur import _check_distance, depth_one_blocks

INPUT_RESIDUAL_TOL = 1e-9


def extension_matrix(m: int, z) -> np.ndarray:
    """-(D - z)^{-1} C: boundary values of a cell -> values at its interior vertices."""
    _check_distance(m, z)
    blocks = depth_one_blocks(m)
    if isinstance(z, (int, Fraction)):
        z = Fraction(z)
        shifted = blocks.D - blocks.D.identity(blocks.D.shape[0]).scale(z)
        X = solve_fractions(shifted.to_fractions(), blocks.C.to_fractions())
        return -np.array([[float(x) for x in row] for row in X])
    z = float(z)
    D, C = blocks.D.to_float(), blocks.C.to_float()
    return -la.solve(D - z * np.eye(D.shape[0]), C)


def apply_laplacian(g: TreeGraph, f: np.ndarray) -> np.ndarray:
    """M_{m,n} f without forming the matrix."""
    f = np.asarray(f, dtype=np.float64)
    out = f.copy()
    for i, nbrs in enumerate(g.adjacency):
        out[i] -= f[list(nbrs)].sum() / len(nbrs)
    return out


def eigen_residual(g: TreeGraph, f: np.ndarray, z: float) -> float:
    """||M f - z f||_inf / ||f||_inf."""
    f = np.asarray(f, dtype=np.float64)
    scale = np.max(np.abs(f))
    if scale == 0:
        raise DomainError("zero vector")
    return float(np.max(np.abs(apply_laplacian(g, f) - z * f)) / scale)


def _exact_or_float(node):
    key = node.exact if isinstance(node, dec.EigNode) else node
    if isinstance(key, (int, Fraction)):
        return Fraction(key)
    return float(node.value) if isinstance(node, dec.EigNode) else float(node)


def extend_eigenvector(m: int, n: int, node, v, tol: float = INPUT_RESIDUAL_TOL) -> np.ndarray:
    """Extend an eigenvector of M_{m,n-1} (eigenvalue R(z)) to one of M_{m,n} (eigenvalue z).

    ``node`` must be non-exceptional.  Old vertices keep their values; each
    level-(n-1) cell fills its interior with the extension matrix at z.
    """
    if n < 1:
        raise DomainError("target level must be >= 1")
    case, _ = dec.classify(m, node)
    if case != 1:
        raise DomainError(f"extension needs a non-exceptional value, got case {case}")
    zk = _exact_or_float(node)
    z = float(zk)
    coarse = build_graph(m, n - 1)
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (coarse.num_vertices,):
        raise DomainError(f"vector has length {v.shape}, expected {coarse.num_vertices}")
    parent = dec.R(m, z)
    res = eigen_residual(coarse, v, parent)
    if res > tol:
        raise DomainError(f"input is not an eigenvector for R(z)={parent}: residual {res:.3g}")

    X = extension_matrix(m, zk)
    s = interior_size(m)
    w = np.zeros(num_vertices(m, n))
    w[: coarse.num_vertices] = v
    for p, cell in enumerate(coarse.cells):
        start = coarse.num_vertices + p * s
        w[start : start + s] = X @ v[list(cell)]
    return w


def exceptional_eigenspace(M: ProbLaplacian, z, tol: float = 1e-8) -> np.ndarray:
    """Orthonormal basis (columns) of the numerical null space of symmetrize(M) - z.

    Singular values below ``tol`` times the largest count as zero.  Columns
    are eigenvectors of the symmetric transform; see :func:`right_eigenvectors`.
    """
    if M.dim > MAX_DIM:
        raise ResourceError(f"null space capped at dim {MAX_DIM}, got {M.dim}")
    S = symmetrize(M) - float(z) * np.eye(M.dim)
    return la.null_space(S, rcond=tol)


def right_eigenvectors(M: ProbLaplacian, basis: np.ndarray) -> np.ndarray:
    return basis / np.sqrt(M.degrees.astype(np.float64))[:, None]


def support_statistics(M: ProbLaplacian, z, tol: float = 1e-8) -> dict:
    """How much of the eigenspace at z vanishes on V_{m,n-1}, and basis support sizes."""
    V = right_eigenvectors(M, exceptional_eigenspace(M, z, tol))
    dim = V.shape[1]
    old = num_vertices(M.m, M.n - 1) if M.n >= 1 else M.dim
    rank_old = np.linalg.matrix_rank(V[:old], tol=1e-8) if dim else 0
    thresh = 1e-10 * (np.max(np.abs(V)) if dim else 1)
    return {
        "dimension": dim,
        "vanishing_on_coarse_dim": dim - int(rank_old),
        "support_sizes": [int(np.sum(np.abs(V[:, j]) > thresh)) for j in range(dim)],
    }


def export_eigenvector(g: TreeGraph, f) -> bytes:
    buf = io.StringIO()
    buf.write("address,value\n")
    for label, x in zip(g.labels(), f):
        buf.write(f"{label},{float(x)!r}\n")
    return buf.getvalue().encode()
