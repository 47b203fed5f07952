"""Spectral decimation for the m-branch tree.

The scalar maps are

    phi(z) = (m - (m-1) z) / (m (2 - (m-1) z) (1 - (m-1) z))
    R(z)   = 2 m z - m (m-1) z^2

and every eigenvalue of M_{m,n} other than 0 is a node of the binary preimage
tree of m/(m-1) under R.  Multiplicities follow from the eight-case
dispatch in :func:`classify` applied recursively down to the level-0 data
sigma(M_{m,0}) = {0: 1, m/(m-1): m-1}.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from math import gcd, isqrt
from typing import Union

import mpmath
import numpy as np

from .errors import DomainError, PoleError
from .graph import num_vertices
from .precision import precision_bits, workprec

log = logging.getLogger(__name__)

LO, HI = "lo", "hi"


# --- scalar maps -----------------------------------------------------------


def top(m: int) -> Fraction:
    return Fraction(m, m - 1)


def phi(m: int, z):
    """phi(z); exact for Fraction input.  Raises PoleError at 1/(m-1), 2/(m-1)."""
    a = m - 1
    den = m * (2 - a * z) * (1 - a * z)
    if den == 0:
        raise PoleError(f"phi has a pole at z={z} for m={m}")
    return (m - a * z) / den


def R(m: int, z):
    return 2 * m * z - m * (m - 1) * z * z


def R_prime(m: int, z):
    return 2 * m - 2 * m * (m - 1) * z


def _rational_sqrt(q: Fraction):
    if q < 0:
        return None
    a, b = isqrt(q.numerator), isqrt(q.denominator)
    if a * a == q.numerator and b * b == q.denominator:
        return Fraction(a, b)
    return None


def inverse_R(m: int, w):
    """Both roots of R(z) = w, returned as (lo, hi) with lo <= 1/(m-1) <= hi.

    Rational w with a rational discriminant root gives Fractions; otherwise
    the roots are mpmath floats at the working precision.  The small root is
    taken from the product of roots to avoid cancellation near 0.
    """
    t = top(m)
    mm1 = m * (m - 1)
    if isinstance(w, (int, Fraction)):
        w = Fraction(w)
        if w > t:
            raise DomainError(f"R(z) = {w} has no real root for m={m} (needs w <= {t})")
        s = _rational_sqrt(Fraction(m * m) - mm1 * w)
        if s is not None:
            return (m - s) / mm1, (m + s) / mm1
    # float input carries its own rounding; clamp at that scale instead of the working one
    slack = 8 * m * m * float(np.finfo(float).eps) if isinstance(w, float) else None
    with workprec():
        w = mpmath.mpf(w.numerator) / w.denominator if isinstance(w, Fraction) else mpmath.mpf(w)
        disc = m * m - mm1 * w
        if disc < 0:
            if slack is None:
                slack = mpmath.mpf(2) ** (-mpmath.mp.prec // 2)
            if -disc > slack:
                raise DomainError(f"R(z) = {w} has no real root for m={m} (needs w <= {t})")
            disc = mpmath.mpf(0)
        s = mpmath.sqrt(disc)
        hi = (m + s) / mm1
        lo = w / (mm1 * hi)
        return +lo, +hi


def exceptional_set(m: int) -> frozenset:
    """E(M_0, M) = sigma(D) together with the zeros of phi."""
    return frozenset({Fraction(m, m - 1), Fraction(2, m - 1), Fraction(1, m - 1)})


def mult_D(m: int, z) -> int:
    """Multiplicity of z as an eigenvalue of the interior block D (closed form)."""
    table = {Fraction(m, m - 1): m * m - 3 * m + 1, Fraction(2, m - 1): m - 1, Fraction(1, m - 1): 1}
    if isinstance(z, (int, Fraction)):
        return table.get(Fraction(z), 0)
    return 0


# --- quadratic surds -------------------------------------------------------


def _squarefree_split(k: int):
    """k = s^2 d with d squarefree."""
    s, d, p = 1, 1, 2
    while p * p <= k:
        while k % (p * p) == 0:
            s *= p
            k //= p * p
        if k % p == 0:
            d *= p
            k //= p
        p += 1
    return s, d * k


@dataclass(frozen=True)
class Surd:
    """(a + b sqrt(d)) / c with integers and d > 1 squarefree."""

    a: int
    b: int
    d: int
    c: int

    @classmethod
    def make(cls, a, b, radicand, c):
        s, d = _squarefree_split(radicand)
        b *= s
        g = gcd(gcd(a, b), c)
        if c < 0:
            g = -g
        return cls(a // g, b // g, d, c // g)

    def value(self):
        with workprec():
            return (self.a + self.b * mpmath.sqrt(self.d)) / self.c

    def __str__(self):
        sign = "+" if self.b > 0 else "-"
        coef = "" if abs(self.b) == 1 else str(abs(self.b))
        return f"({self.a}{sign}{coef}√{self.d})/{self.c}"


# --- eigenvalue nodes ------------------------------------------------------

ZERO, TOP, PREIMAGE = "zero", "top", "preimage"


@dataclass(frozen=True)
class EigNode:
    """Node of the preimage tree of m/(m-1).

    Identity is (m, kind, depth, word).  ``depth`` is the generation under
    R-preimages (top is 0, the double root 1/(m-1) is 1); ``word`` picks
    the inverse branch at generations 2..depth.
    """

    m: int
    kind: str
    depth: int = 0
    word: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind == PREIMAGE:
            if self.depth < 1 or len(self.word) != self.depth - 1:
                raise DomainError(f"preimage node needs depth >= 1 and a word of length depth-1")
            if any(b not in (LO, HI) for b in self.word):
                raise DomainError(f"branch letters must be {LO!r} or {HI!r}")
        elif self.kind in (ZERO, TOP):
            if self.depth != 0 or self.word:
                raise DomainError(f"{self.kind} node has depth 0 and an empty word")
        else:
            raise DomainError(f"unknown node kind {self.kind!r}")

    @classmethod
    def zero(cls, m):
        return cls(m, ZERO)

    @classmethod
    def top(cls, m):
        return cls(m, TOP)

    @classmethod
    def preimage(cls, m, word=()):
        word = tuple(word)
        return cls(m, PREIMAGE, len(word) + 1, word)

    @property
    def generation(self) -> int:
        return self.depth

    @property
    def exact(self):
        """Fraction for depth <= 1 and zero, Surd at depth 2, else None."""
        m = self.m
        if self.kind == ZERO:
            return Fraction(0)
        if self.kind == TOP:
            return top(m)
        if self.depth == 1:
            return Fraction(1, m - 1)
        if self.depth == 2:
            sign = -1 if self.word[0] == LO else 1
            return Surd.make(m, sign, m * (m - 1), m * (m - 1))
        return None

    @cached_property
    def value(self):
        ex = self.exact
        if isinstance(ex, Fraction):
            with workprec():
                return mpmath.mpf(ex.numerator) / ex.denominator
        if isinstance(ex, Surd):
            return ex.value()
        w = Fraction(1, self.m - 1)
        with workprec():
            for b in self.word:
                lo, hi = inverse_R(self.m, w)
                w = lo if b == LO else hi
            return w

    def parent(self):
        """R applied to the node: a node, or a Fraction when it leaves the tree."""
        if self.kind == ZERO:
            return self
        if self.kind == TOP:
            return R(self.m, top(self.m))
        if self.depth == 1:
            return EigNode.top(self.m)
        return EigNode.preimage(self.m, self.word[:-1])

    def children(self):
        if self.kind == TOP:
            return [EigNode.preimage(self.m)]
        if self.kind == PREIMAGE:
            return [EigNode.preimage(self.m, self.word + (b,)) for b in (LO, HI)]
        return []

    def label(self) -> str:
        ex = self.exact
        if ex is not None:
            return str(ex)
        return "R^-1:" + "".join("l" if b == LO else "h" for b in self.word)

    def __float__(self):
        return float(self.value)


Value = Union[EigNode, Fraction, int]


def _as_key(z):
    if isinstance(z, EigNode):
        ex = z.exact
        if isinstance(ex, Fraction):
            return ex
        return z
    return Fraction(z)


def apply_R(m: int, z):
    z = _as_key(z)
    if isinstance(z, EigNode):
        return _as_key(z.parent())
    return R(m, z)


# --- exceptional-value case analysis --------------------------------------


@dataclass(frozen=True)
class CaseEvidence:
    in_sigma_D: bool
    mult_D: int
    phi_zero: bool
    phi_pole: bool
    phiR_pole: bool
    R_pole: bool
    R_prime_zero: bool


def _evidence(m: int, z) -> CaseEvidence:
    z = _as_key(z)
    if isinstance(z, Fraction):
        a = m - 1
        phi_den_zero = (2 - a * z) * (1 - a * z) == 0
        phi_num_zero = m - a * z == 0
        # phi R = z (m - (m-1) z) / (1 - (m-1) z): R cancels the pole at 2/(m-1)
        phiR_pole = (1 - a * z) == 0 and z * (m - a * z) != 0
        return CaseEvidence(
            in_sigma_D=mult_D(m, z) > 0,
            mult_D=mult_D(m, z),
            phi_zero=phi_num_zero and not phi_den_zero,
            phi_pole=phi_den_zero and not phi_num_zero,
            phiR_pole=phiR_pole,
            R_pole=False,
            R_prime_zero=R_prime(m, z) == 0,
        )
    # irrational node: evaluate the same predicates numerically
    with workprec():
        x = z.value
        tol = mpmath.mpf(2) ** (-(precision_bits() // 2))
        near = lambda q: abs(x - mpmath.mpf(q.numerator) / q.denominator) < tol  # noqa: E731
        hits = [q for q in exceptional_set(m) if near(q)]
        if hits:
            return _evidence(m, hits[0])
        return CaseEvidence(False, 0, False, False, False, False, abs(R_prime(m, x)) < tol)


def _dispatch(ev: CaseEvidence) -> int:
    if not ev.in_sigma_D:
        if ev.phi_pole:
            raise DomainError("phi has a pole outside sigma(D); no case applies")
        if not ev.phi_zero:
            return 1
        return 7 if ev.R_pole else 2
    if ev.phi_pole:
        # keyed on the pole of phi; at 2/(m-1) phi*R has only a removable singularity
        return 6 if ev.R_prime_zero else 3
    if not ev.phi_zero:
        return 4
    return 8 if ev.R_pole else 5


def classify(m: int, z) -> tuple[int, CaseEvidence]:
    """Case id 1..8 together with the predicates that selected it."""
    ev = _evidence(m, z)
    return _dispatch(ev), ev


# --- multiplicities --------------------------------------------------------


def mult_level0(m: int, z) -> int:
    z = _as_key(z)
    if z == 0:
        return 1
    if z == top(m):
        return m - 1
    return 0


def case6_alternative(m: int, n: int) -> tuple[int, int]:
    """Both case-6 formulas at z = 1/(m-1) for n >= 1: (proviso form, general form)."""
    z = Fraction(1, m - 1)
    prev = multiplicity(m, n - 1, R(m, z))
    general = m ** (n - 1) * mult_D(m, z) - num_vertices(m, n - 1) + 2 * prev
    return prev, general


@lru_cache(maxsize=None)
def _mult(m: int, n: int, z) -> int:
    if isinstance(z, Fraction) and not (0 <= z <= 2):
        # sigma(I - P) lies in [0, 2] for any stochastic P
        return 0
    if n == 0:
        return mult_level0(m, z)
    ev = _evidence(m, z)
    case = _dispatch(ev)
    prev = _mult(m, n - 1, apply_R(m, z))
    dim_prev = num_vertices(m, n - 1)
    localized = m ** (n - 1) * ev.mult_D
    if case == 1:
        out = prev
    elif case == 2:
        out = dim_prev
    elif case == 3:
        out = localized - dim_prev + prev
    elif case == 4:
        out = localized + prev
    elif case == 5:
        out = localized + prev + dim_prev
    elif case == 6:
        out = prev
    elif case == 7:
        out = 0
    else:
        out = localized
    if out < 0:
        raise ArithmeticError(f"negative multiplicity {out} at z={z}, n={n}, case {case}")
    return out


def multiplicity(m: int, n: int, z) -> int:
    """mult_n(z) by the case-dispatch recursion."""
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    return _mult(m, n, _as_key(z))


# --- spectrum reports ------------------------------------------------------


@dataclass(frozen=True)
class Atom:
    node: EigNode
    multiplicity: int
    case: int


@dataclass(frozen=True)
class SpectrumReport:
    m: int
    n: int
    atoms: tuple[Atom, ...]
    total_count: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "total_count", sum(a.multiplicity for a in self.atoms))

    def as_dict(self) -> dict[EigNode, int]:
        return {a.node: a.multiplicity for a in self.atoms}

    def multiplicity_of(self, node: EigNode) -> int:
        return self.as_dict().get(node, 0)

    def values(self) -> list[float]:
        return [float(a.node.value) for a in self.atoms]


def tree_nodes(m: int, n: int):
    """0, top, then every preimage node of generations 1..n."""
    yield EigNode.zero(m)
    yield EigNode.top(m)
    for k in range(1, n + 1):
        for word in itertools.product((LO, HI), repeat=k - 1):
            yield EigNode.preimage(m, word)


def _sorted_atoms(atoms):
    return tuple(sorted(atoms, key=lambda a: a.node.value))


def _check_mn(m, n):
    if not isinstance(m, int) or m < 3:
        raise DomainError(f"m must be an integer >= 3, got {m!r}")
    if not isinstance(n, int) or n < 0:
        raise DomainError(f"n must be an integer >= 0, got {n!r}")


@lru_cache(maxsize=None)
def verify_sigma_D(m: int, max_side: int = 1024) -> bool:
    """Check the closed-form sigma(D) against a dense eigensolve of D.

    Skipped (returns False) when D is larger than ``max_side``.
    """
    from .laplacian import block_partition, laplacian

    side = (m - 1) ** 2
    if side > max_side:
        log.debug("skipping dense sigma(D) check for m=%d (side %d)", m, side)
        return False
    D = block_partition(laplacian(m, 1)).D.to_float()
    eig = np.sort(np.linalg.eigvals(D).real)
    expected = np.sort(np.concatenate([np.full(mult_D(m, q), float(q)) for q in exceptional_set(m)]))
    if not np.allclose(eig, expected, atol=1e-8):
        raise AssertionError(f"closed-form sigma(D) disagrees with the dense eigensolve for m={m}")
    return True


def spectrum(m: int, n: int) -> SpectrumReport:
    """sigma(M_{m,n}) with multiplicities, via the recursion."""
    _check_mn(m, n)
    verify_sigma_D(m)
    atoms = []
    for node in tree_nodes(m, n):
        k = multiplicity(m, n, node)
        if k > 0:
            atoms.append(Atom(node, k, classify(m, node)[0]))
    return SpectrumReport(m, n, _sorted_atoms(atoms))


def closed_form_multiplicity(m: int, n: int, node: EigNode) -> int:
    if node.kind == ZERO:
        return 1
    if node.depth > n:
        return 0
    return 1 + (m - 2) * m ** (n - node.depth)


def spectrum_closed_form(m: int, n: int) -> SpectrumReport:
    """Same report as :func:`spectrum`, with multiplicities from the closed formulas."""
    _check_mn(m, n)
    atoms = [Atom(node, closed_form_multiplicity(m, n, node), classify(m, node)[0]) for node in tree_nodes(m, n)]
    return SpectrumReport(m, n, _sorted_atoms(atoms))


def counting_identity(m: int, n: int) -> tuple[int, int]:
    """Both sides of the eigenvalue count: atoms summed by generation, and dim_n."""
    lhs = 1 + (1 + (m - 2) * m**n) + sum(2 ** (k - 1) * (1 + (m - 2) * m ** (n - k)) for k in range(1, n + 1))
    return lhs, num_vertices(m, n)


# --- export ----------------------------------------------------------------

SPECTRUM_COLUMNS = ("value_decimal", "value_exact_or_word", "generation", "branch_word", "multiplicity", "case")


def _atom_row(atom: Atom) -> dict:
    node = atom.node
    exact = node.exact
    word = ".".join(node.word)
    return {
        "value_decimal": mpmath.nstr(node.value, 30),
        "value_exact_or_word": str(exact) if exact is not None else word,
        "generation": node.depth,
        "branch_word": word,
        "multiplicity": atom.multiplicity,
        "case": atom.case,
    }


def export_spectrum(report: SpectrumReport, format: str = "csv") -> bytes:
    rows = [_atom_row(a) for a in report.atoms]
    if format == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=SPECTRUM_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        return buf.getvalue().encode()
    if format == "json":
        for row, atom in zip(rows, report.atoms):
            row["kind"] = atom.node.kind
        doc = {
            "m": report.m,
            "n": report.n,
            "total_count": report.total_count,
            "dim": num_vertices(report.m, report.n),
            "atoms": rows,
        }
        return json.dumps(doc, indent=2).encode()
    raise DomainError(f"unknown spectrum format {format!r}")
