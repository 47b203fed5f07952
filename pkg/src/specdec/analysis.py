"""Spectral measures, the large-m limit, Julia-set sampling and geometric constants."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np
from scipy.optimize import bisect

from . import decimation as dec
from .errors import DomainError
from .graph import build_graph, num_vertices
from .oracle import effective_resistance

MAX_GENERATIONS = 24


# --- spectral measure ------------------------------------------------------


@dataclass(frozen=True)
class SpectralMeasure:
    m: int
    n: int
    atoms: tuple[tuple[dec.EigNode, Fraction], ...]

    def total(self) -> Fraction:
        return sum((w for _, w in self.atoms), Fraction(0))

    def weight(self, node: dec.EigNode) -> Fraction:
        return dict(self.atoms).get(node, Fraction(0))

    def cumulative(self) -> tuple[np.ndarray, np.ndarray]:
        """(value, cumulative weight) pairs in ascending value order, as floats."""
        xs = np.array([float(node.value) for node, _ in self.atoms])
        ws = np.cumsum([float(w) for _, w in self.atoms])
        return xs, ws

    def to_csv(self) -> bytes:
        buf = io.StringIO()
        buf.write("value,weight_numerator,weight_denominator\n")
        for node, w in self.atoms:
            buf.write(f"{mpmath.nstr(node.value, 20)},{w.numerator},{w.denominator}\n")
        return buf.getvalue().encode()


def spectral_measure(m: int, n: int) -> SpectralMeasure:
    """Normalized eigenvalue-counting measure of M_{m,n}: weight = mult / dim_n."""
    report = dec.spectrum(m, n)
    dim = num_vertices(m, n)
    return SpectralMeasure(m, n, tuple((a.node, Fraction(a.multiplicity, dim)) for a in report.atoms))


def top_weight(m: int, n: int) -> Fraction:
    return Fraction(1 + (m - 2) * m**n, 1 + (m - 1) * m**n)


def remainder_mass(m: int, n: int) -> Fraction:
    """Mass on eigenvalues other than 0 and m/(m-1)."""
    return 1 - top_weight(m, n) - Fraction(1, num_vertices(m, n))


@dataclass(frozen=True)
class LimitDensity:
    m: int

    def top_weight(self, n: int) -> Fraction:
        return top_weight(self.m, n)

    def remainder_mass(self, n: int) -> Fraction:
        return remainder_mass(self.m, n)

    @property
    def limit_n_infinity(self) -> Fraction:
        return Fraction(self.m - 2, self.m - 1)

    @property
    def limit_m_infinity(self) -> Fraction:
        return Fraction(1)

    @property
    def remainder_bound(self) -> Fraction:
        """Upper bound 1/(m-1) on the remainder mass at every n (so O(1/m))."""
        return Fraction(1, self.m - 1)


def limit_density(m: int) -> LimitDensity:
    return LimitDensity(m)


def atoms_within(m: int, n: int, eps: float) -> bool:
    """True when every atom of sigma(M_{m,n}) lies within eps of {0, 1}."""
    for atom in dec.spectrum(m, n).atoms:
        x = float(atom.node.value)
        if min(abs(x), abs(x - 1)) > eps:
            return False
    return True


def containment_bound_threshold(eps: float) -> int:
    """Smallest m with [0, 2/(m-1)] u {m/(m-1)} inside the eps-neighbourhood of {0, 1}."""
    m = 3
    while Fraction(2, m - 1) > Fraction(eps) or Fraction(1, m - 1) > Fraction(eps):
        m += 1
    return m


def hausdorff_threshold(eps: float, n: int = 4, m_max: int = 120) -> int:
    """Smallest M such that atoms_within(m, n, eps) holds for every M <= m <= m_max."""
    threshold = None
    for m in range(m_max, 2, -1):
        if not atoms_within(m, n, eps):
            break
        threshold = m
    if threshold is None:
        raise DomainError(f"property fails at m={m_max}")
    return threshold


# --- Julia set -------------------------------------------------------------


def _inverse_branches(m: int, w: np.ndarray):
    mm1 = m * (m - 1)
    disc = np.maximum(m * m - mm1 * w, 0.0)
    hi = (m + np.sqrt(disc)) / mm1
    lo = w / (mm1 * hi)
    return lo, hi


def julia_backward_orbit(m: int, generations: int, seed: float | None = None) -> np.ndarray:
    """Points of R^{-generations}(seed), sorted.

    Both inverse branches are applied at every step; the double root at the
    critical value m/(m-1) is kept once, so seeding at m/(m-1) gives
    2^(generations-1) points.
    """
    t = m / (m - 1)
    seed = t if seed is None else float(seed)
    if not 0 <= seed <= t:
        raise DomainError(f"seed must lie in [0, {t}], got {seed}")
    if not 0 <= generations <= MAX_GENERATIONS:
        raise DomainError(f"generations must be in [0, {MAX_GENERATIONS}]")
    pts = np.array([seed])
    for _ in range(generations):
        lo, hi = _inverse_branches(m, pts)
        if pts.size == 1 and pts[0] == t:
            pts = lo
        else:
            pts = np.concatenate([lo, hi])
    return np.sort(pts)


def orbit_interval_check(m: int, generations: int) -> bool:
    """Interval-arithmetic proof that every backward-orbit point of m/(m-1) lies in [0, 2/(m-1)]."""
    iv = mpmath.iv
    mm1 = m * (m - 1)
    lower, upper = iv.mpf(0), iv.mpf(2) / (m - 1)
    pts = [iv.mpf(m) / (m - 1)]
    for g in range(generations):
        nxt = []
        for w in pts:
            disc = m * m - mm1 * w
            if disc.a < 0:
                # w <= m/(m-1) holds for the exact point, so the true discriminant is >= 0
                disc = iv.mpf([0, disc.b])
            hi = (m + iv.sqrt(disc)) / mm1
            nxt.append(w / (mm1 * hi))
            if g > 0:
                nxt.append(hi)
        if any(x.a < lower.a or x.b > upper.b for x in nxt):
            return False
        pts = nxt
    return True


def hausdorff_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Hausdorff distance between two finite subsets of the real line."""
    a, b = np.sort(np.asarray(a)), np.sort(np.asarray(b))

    def directed(x, y):
        idx = np.clip(np.searchsorted(y, x), 1, len(y) - 1) if len(y) > 1 else np.zeros(len(x), int)
        left = np.abs(x - y[idx - 1]) if len(y) > 1 else np.abs(x - y[0])
        right = np.abs(x - y[idx])
        return float(np.max(np.minimum(left, right)))

    return max(directed(a, b), directed(b, a))


def fixed_points(m: int) -> tuple[Fraction, Fraction]:
    """Solutions of R(z) = z: 0 and (2m-1)/(m(m-1))."""
    return Fraction(0), Fraction(2 * m - 1, m * (m - 1))


# --- geometry --------------------------------------------------------------


def contraction_factor(m: int) -> Fraction:
    """Contraction ratio of every map of the IFS in the effective resistance metric."""
    if m < 3:
        raise DomainError("m must be >= 3")
    return Fraction(1, 2)


def boundary_resistance(m: int, n: int, u: int = 0, v: int = 1) -> float:
    return effective_resistance(build_graph(m, n), u, v)


def resistance_ratio(m: int, n: int = 1) -> float:
    """R_eff between boundary vertices of V_{m,n} over that of V_{m,n-1}."""
    return boundary_resistance(m, n) / boundary_resistance(m, n - 1)


@dataclass(frozen=True)
class DimensionReport:
    m: int
    moran: float
    paper: float
    discrepancy: bool


def hausdorff_dimension(m: int, convention: str = "moran") -> float:
    """Similarity dimension of the m-branch tree.

    ``moran`` solves m (1/2)^s = 1 by bisection (log m / log 2).  ``paper``
    returns the closed form 2 log m / log 2, which is twice the Moran root;
    use :func:`dimension_report` to get both with a discrepancy flag.
    """
    if m < 3:
        raise DomainError("m must be >= 3")
    c = float(contraction_factor(m))
    if convention == "moran":
        return bisect(lambda s: m * c**s - 1, 0.0, 64.0, xtol=1e-13, rtol=4 * np.finfo(float).eps)
    if convention == "paper":
        return -2 * math.log(m) / math.log(c)
    raise DomainError(f"unknown convention {convention!r}")


def dimension_report(m: int) -> DimensionReport:
    moran = hausdorff_dimension(m, "moran")
    paper = hausdorff_dimension(m, "paper")
    return DimensionReport(m, moran, paper, discrepancy=abs(moran - paper) > 1e-9)
