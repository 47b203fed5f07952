"""Dense-matrix ground truth: eigensolves, multiplicity clustering, spectrum diffs,
and effective resistance."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .decimation import SpectrumReport
from .errors import ResourceError
from .graph import TreeGraph
from .laplacian import ProbLaplacian, symmetrize

MAX_DIM = 4000
CLUSTER_TOL = 1e-8
VALUE_TOL = 1e-9


def _check_dim(M):
    if M.dim > MAX_DIM:
        raise ResourceError(f"dense eigensolve capped at dim {MAX_DIM}, got {M.dim}")


def dense_spectrum(M: ProbLaplacian) -> np.ndarray:
    """Eigenvalues of M (ascending) from the symmetric similarity transform."""
    _check_dim(M)
    return np.linalg.eigvalsh(symmetrize(M))


def dense_eigenpairs(M: ProbLaplacian):
    """Eigenvalues and right eigenvectors of M (columns), from the symmetric transform."""
    _check_dim(M)
    vals, U = np.linalg.eigh(symmetrize(M))
    V = U / np.sqrt(M.degrees.astype(np.float64))[:, None]
    return vals, V


def cluster(values, tol: float = CLUSTER_TOL) -> list[tuple[float, int]]:
    """Greedy gap clustering of sorted values; each cluster is (mean, count)."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    out = []
    group = []
    for x in values:
        if group and x - group[-1] > tol:
            out.append((float(np.mean(group)), len(group)))
            group = []
        group.append(float(x))
    if group:
        out.append((float(np.mean(group)), len(group)))
    return out


@dataclass(frozen=True)
class DiffEntry:
    label: str
    value: float
    expected_mult: int
    observed_mult: int
    value_error: float


@dataclass(frozen=True)
class SpectrumDiff:
    m: int
    n: int
    entries: tuple[DiffEntry, ...]
    matched: int = field(default=0)

    @property
    def ok(self) -> bool:
        return not self.entries

    def to_json(self) -> str:
        return json.dumps(
            {
                "m": self.m,
                "n": self.n,
                "ok": self.ok,
                "matched_atoms": self.matched,
                "diff": [
                    {
                        "atom": e.label,
                        "value": e.value,
                        "expected_mult": e.expected_mult,
                        "observed_mult": e.observed_mult,
                        "abs_value_error": e.value_error,
                    }
                    for e in self.entries
                ],
            },
            indent=2,
        )


def compare(report: SpectrumReport, oracle, tol: float = VALUE_TOL) -> SpectrumDiff:
    """Match report atoms with oracle clusters by value; record every disagreement."""
    clusters = list(oracle)
    used = [False] * len(clusters)
    entries = []
    matched = 0
    for atom in report.atoms:
        x = float(atom.node.value)
        best, err = None, np.inf
        for i, (v, _) in enumerate(clusters):
            if not used[i] and abs(v - x) < err:
                best, err = i, abs(v - x)
        if best is None or err > tol:
            entries.append(DiffEntry(atom.node.label(), x, atom.multiplicity, 0, float(err)))
            continue
        used[best] = True
        count = clusters[best][1]
        if count != atom.multiplicity:
            entries.append(DiffEntry(atom.node.label(), x, atom.multiplicity, count, float(err)))
        else:
            matched += 1
    for i, (v, count) in enumerate(clusters):
        if not used[i]:
            entries.append(DiffEntry("unexpected", v, 0, count, float("nan")))
    return SpectrumDiff(report.m, report.n, tuple(entries), matched)


def oracle_check(m: int, n: int, cluster_tol: float = CLUSTER_TOL, value_tol: float = VALUE_TOL) -> SpectrumDiff:
    from .decimation import spectrum
    from .laplacian import laplacian

    vals = dense_spectrum(laplacian(m, n))
    return compare(spectrum(m, n), cluster(vals, cluster_tol), value_tol)


def combinatorial_laplacian(g: TreeGraph) -> np.ndarray:
    L = np.zeros((g.num_vertices, g.num_vertices))
    for i, nbrs in enumerate(g.adjacency):
        L[i, i] = len(nbrs)
        L[i, list(nbrs)] = -1.0
    return L


def effective_resistance(g: TreeGraph, u: int, v: int) -> float:
    """Unit-resistor effective resistance L+_uu + L+_vv - 2 L+_uv."""
    for x in (u, v):
        if not 0 <= x < g.num_vertices:
            raise IndexError(f"vertex {x} out of range")
    if u == v:
        raise ValueError("u and v must differ")
    Lp = np.linalg.pinv(combinatorial_laplacian(g), hermitian=True)
    return float(Lp[u, u] + Lp[v, v] - 2 * Lp[u, v])
