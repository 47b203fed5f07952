"""Schur complement of M_{m,1} - z and the spectral projectors of the interior block D.

Two independent routes to (D - z)^{-1}: a direct LU solve, and the
projector sum  sum_i P_i / (lambda_i - z).  Comparing them checks the
block forms of P_1, P_3 (and the complement P_2) entry by entry.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
import scipy.linalg as la

from . import decimation as dec
from .errors import PoleError, SingularityError
from .exact import RationalMatrix, solve_fractions
from .laplacian import BlockPartition, block_partition, laplacian, symmetrize

SINGULAR_DISTANCE = 1e-9
RESIDUAL_TOL = 1e-10


def eigenvalues_D(m: int) -> tuple[Fraction, Fraction, Fraction]:
    """(lambda_1, lambda_2, lambda_3) = (1/(m-1), m/(m-1), 2/(m-1))."""
    return Fraction(1, m - 1), Fraction(m, m - 1), Fraction(2, m - 1)


@lru_cache(maxsize=None)
def depth_one_blocks(m: int) -> BlockPartition:
    return block_partition(laplacian(m, 1))


@lru_cache(maxsize=None)
def _float_blocks(m):
    b = depth_one_blocks(m)
    return b.A.to_float(), b.B.to_float(), b.C.to_float(), b.D.to_float()


@lru_cache(maxsize=None)
def level0_matrix(m: int) -> RationalMatrix:
    return laplacian(m, 0).matrix


def _is_exact(z):
    return isinstance(z, (int, Fraction))


def _check_distance(m, z):
    gap = min(abs(float(z) - float(lam)) for lam in eigenvalues_D(m))
    if gap <= SINGULAR_DISTANCE:
        raise SingularityError(f"z={z} is within {SINGULAR_DISTANCE} of sigma(D) for m={m}")


@dataclass(frozen=True)
class SchurEval:
    m: int
    z: object
    S: object  # RationalMatrix for rational z, else ndarray
    phi_val: object
    R_val: object
    residual: float

    def S_float(self) -> np.ndarray:
        return self.S.to_float() if isinstance(self.S, RationalMatrix) else self.S


def schur_complement(m: int, z) -> SchurEval:
    """S(z) = (A - z) - B (D - z)^{-1} C by direct solves.

    Rational z is handled in exact arithmetic; anything else in floating
    point (LU with partial pivoting).
    """
    _check_distance(m, z)
    if _is_exact(z):
        z = Fraction(z)
        blocks = depth_one_blocks(m)
        size = blocks.D.shape[0]
        shift = RationalMatrix.identity(size).scale(z)
        X = solve_fractions((blocks.D - shift).to_fractions(), blocks.C.to_fractions())
        S = blocks.A - RationalMatrix.identity(m).scale(z) - blocks.B @ RationalMatrix.from_fractions(X)
        S = S.reduced()
        f, r = dec.phi(m, z), dec.R(m, z)
        target = (level0_matrix(m) - RationalMatrix.identity(m).scale(r)).scale(f)
        diff = (S - target).to_fractions()
        residual = float(max(abs(x) for row in diff for x in row))
        return SchurEval(m, z, S, f, r, residual)
    z = float(z)
    A, B, C, D = _float_blocks(m)
    X = la.solve(D - z * np.eye(D.shape[0]), C)
    S = (A - z * np.eye(m)) - B @ X
    f, r = dec.phi(m, z), dec.R(m, z)
    residual = float(np.max(np.abs(S - f * (level0_matrix(m).to_float() - r * np.eye(m)))))
    return SchurEval(m, z, S, f, r, residual)


def closed_form_entries(m: int, z):
    """(S_11, S_12) from the general-m closed forms."""
    a = m - 1
    p = (1 - z * a) * (2 - z * a)
    if p == 0:
        raise PoleError(f"S(z) has a pole at z={z} for m={m}")
    s11 = (1 - z) - (m - z * a * a) / (m * p)
    s12 = -(m - z * a) / (m * a * p)
    return s11, s12


def phi_from_schur(m: int, S) -> float:
    return -(m - 1) * S[0, 1]


def R_from_schur(m: int, S) -> float:
    return 1 - S[0, 0] / phi_from_schur(m, S)


# --- projectors ------------------------------------------------------------


def _J(m):
    return m * np.eye(m, dtype=np.int64) - np.ones((m, m), dtype=np.int64)


def _block_grid(block, reps, corner_row, corner_col, corner):
    """(reps x reps) grid of ``block`` bordered by one final row and column."""
    body = np.block([[block] * reps] * reps).astype(object)
    size = body.shape[0] + 1
    out = np.empty((size, size), dtype=object)
    out[:-1, :-1] = body
    out[:-1, -1] = corner_col
    out[-1, :-1] = corner_row
    out[-1, -1] = corner
    return out


@dataclass(frozen=True)
class ProjectorSet:
    m: int
    lambdas: tuple[Fraction, Fraction, Fraction]
    P1: RationalMatrix
    P2: RationalMatrix
    P3: RationalMatrix

    @property
    def all(self):
        return (self.P1, self.P2, self.P3)

    def idempotent(self) -> bool:
        return all(P @ P == P for P in self.all)

    def mutually_annihilating(self) -> bool:
        Ps = self.all
        return all((Ps[i] @ Ps[j]).is_zero() for i in range(3) for j in range(3) if i != j)

    def resolves_identity(self) -> bool:
        size = self.P1.shape[0]
        return self.P1 + self.P2 + self.P3 == RationalMatrix.identity(size)

    def reconstructs(self, D: RationalMatrix) -> bool:
        total = self.P1.scale(self.lambdas[0]) + self.P2.scale(self.lambdas[1]) + self.P3.scale(self.lambdas[2])
        return total == D

    def checks(self, D: RationalMatrix | None = None) -> dict[str, bool]:
        D = depth_one_blocks(self.m).D if D is None else D
        return {
            "idempotent": self.idempotent(),
            "mutually_annihilating": self.mutually_annihilating(),
            "resolution_of_identity": self.resolves_identity(),
            "spectral_reconstruction": self.reconstructs(D),
            "trace_P2": self.P2.trace() == self.m**2 - 3 * self.m + 1,
        }

    def resolvent(self, z) -> np.ndarray:
        """(D - z)^{-1} as sum_i P_i / (lambda_i - z)."""
        return sum(P.to_float() / (float(lam) - z) for P, lam in zip(self.all, self.lambdas))


@lru_cache(maxsize=None)
def projectors(m: int) -> ProjectorSet:
    """P_1 and P_3 from their block forms, P_2 = I - P_1 - P_3."""
    size = (m - 1) ** 2
    reps = m - 2
    p1_num = np.ones((size, size), dtype=object)
    p1_num[:, -1] = m
    P1 = RationalMatrix(p1_num, m * (m - 1))
    P3 = RationalMatrix(_block_grid(_J(m), reps, 0, 0, 0), m * (m - 2))
    P2 = RationalMatrix.identity(size) - P1 - P3
    lam = eigenvalues_D(m)
    return ProjectorSet(m, lam, P1.reduced(), P2.reduced(), P3.reduced())


def displayed_P2(m: int) -> RationalMatrix:
    """P_2 written out with the K blocks (for comparison with the complement)."""
    den = m * (m - 1) * (m - 2)
    K = np.full((m, m), -1, dtype=object)
    np.fill_diagonal(K, m * m - m - 1)
    eye = np.eye(m, dtype=object) * den
    reps = m - 2
    body = np.block([[(eye - K) if i == j else -K for j in range(reps)] for i in range(reps)])
    size = body.shape[0] + 1
    out = np.empty((size, size), dtype=object)
    out[:-1, :-1] = body
    out[:-1, -1] = -den // (m - 1)
    out[-1, :-1] = -den // (m * (m - 1))
    out[-1, -1] = den * (m - 2) // (m - 1)
    return RationalMatrix(out, den)


def projector_terms(m: int, z) -> dict[str, tuple]:
    """Per-projector contributions (B P_i C)_{1,j} / (lambda_i - z) for j = 1, 2."""
    blocks = depth_one_blocks(m)
    ps = projectors(m)
    out = {}
    for name, P, lam in zip(("P1", "P2", "P3"), ps.all, ps.lambdas):
        BPC = blocks.B @ P @ blocks.C
        out[name] = tuple(BPC.entry(0, j) / (lam - z) for j in (0, 1))
    return out


def sigma_D(m: int) -> dict[Fraction, int]:
    """Closed-form spectrum of D as {eigenvalue: multiplicity}."""
    return {lam: dec.mult_D(m, lam) for lam in sorted(eigenvalues_D(m))}


def dense_sigma_D(m: int) -> np.ndarray:
    """Eigenvalues of D from a symmetric dense eigensolve (degree similarity)."""
    b = m
    S = symmetrize(laplacian(m, 1))[b:, b:]
    return np.linalg.eigvalsh(S)


def random_nonexceptional(m: int, count: int, rng: np.random.Generator, lo=-1.0, hi=2.0, exclusion=1e-3):
    """Uniform samples from [lo, hi] keeping ``exclusion`` away from the exceptional set."""
    bad = [float(q) for q in dec.exceptional_set(m)]
    out = []
    while len(out) < count:
        z = float(rng.uniform(lo, hi))
        if min(abs(z - q) for q in bad) > exclusion:
            out.append(z)
    return out


def verification_report(m: int, zs, check_projectors: bool = True) -> dict:
    """Residuals of S(z) - phi(z)(M_0 - R(z)) at each z, plus projector checks."""
    rows = []
    for z in zs:
        ev = schur_complement(m, z)
        A, B, C, D = _float_blocks(m)
        direct = np.linalg.inv(D - float(z) * np.eye(D.shape[0]))
        rows.append(
            {
                "z": float(z),
                "residual": ev.residual,
                "phi_recovered_error": abs(phi_from_schur(m, ev.S_float()) - float(ev.phi_val)),
                "R_recovered_error": abs(R_from_schur(m, ev.S_float()) - float(ev.R_val)),
                "resolvent_route_error": float(np.max(np.abs(projectors(m).resolvent(float(z)) - direct))),
            }
        )
    report = {
        "m": m,
        "samples": rows,
        "max_residual": max((r["residual"] for r in rows), default=0.0),
    }
    if check_projectors:
        report["projectors"] = projectors(m).checks()
    return report
