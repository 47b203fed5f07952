import csv
import io
import itertools
import json
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from specdec import decimation as dec
from specdec.decimation import EigNode, Surd
from specdec.errors import DomainError, PoleError
from specdec.precision import precision_bits, workprec

F = Fraction


def test_phi_m3_matches_reduced_form():
    rng = np.random.default_rng(1)
    for z in rng.uniform(-1, 2, 10):
        expected = (3 - 2 * z) / (6 * (z - 1) * (2 * z - 1))
        assert dec.phi(3, z) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("m", range(3, 9))
def test_phi_special_values(m):
    assert dec.phi(m, F(m, m - 1)) == 0
    for pole in (F(1, m - 1), F(2, m - 1)):
        with pytest.raises(PoleError):
            dec.phi(m, pole)
    assert dec.phi(m, 0) == F(1, 2)


def test_phi_pole_is_zero_division():
    with pytest.raises(ZeroDivisionError):
        dec.phi(4, F(1, 3))


def test_R_values():
    rng = np.random.default_rng(2)
    for z in rng.uniform(-1, 2, 10):
        assert dec.R(3, z) == pytest.approx(6 * z - 6 * z * z, rel=1e-12, abs=1e-12)
    for m in range(3, 9):
        assert dec.R(m, 0) == 0
        assert dec.R(m, F(1, m - 1)) == F(m, m - 1)
        assert dec.R_prime(m, F(1, m - 1)) == 0


def test_inverse_R_half():
    lo, hi = dec.inverse_R(3, F(1, 2))
    with workprec():
        assert abs(lo - (3 - mpmath.sqrt(6)) / 6) < mpmath.mpf(2) ** -120
        assert abs(hi - (3 + mpmath.sqrt(6)) / 6) < mpmath.mpf(2) ** -120


@pytest.mark.parametrize("m", range(3, 9))
def test_inverse_R_rational_cases(m):
    assert dec.inverse_R(m, 0) == (0, F(2, m - 1))
    assert dec.inverse_R(m, F(m, m - 1)) == (F(1, m - 1), F(1, m - 1))
    with pytest.raises(DomainError):
        dec.inverse_R(m, F(m, m - 1) + F(1, 1000))


@pytest.mark.parametrize("m", [3, 4, 7])
def test_R_inverse_round_trip(m):
    t = m / (m - 1)
    for w in np.linspace(0, t, 1000):
        lo, hi = dec.inverse_R(m, float(w))
        assert lo <= 1 / (m - 1) + 1e-15 <= hi + 2e-15
        assert abs(float(dec.R(m, lo)) - w) <= 1e-12
        assert abs(float(dec.R(m, hi)) - w) <= 1e-12


@settings(max_examples=200, deadline=None)
@given(st.integers(3, 40), st.fractions(min_value=0, max_value=1))
def test_R_inverse_property(m, frac):
    w = frac * F(m, m - 1)
    lo, hi = dec.inverse_R(m, w)
    with workprec():
        for z in (lo, hi):
            zz = mpmath.mpf(z.numerator) / z.denominator if isinstance(z, F) else z
            assert abs(dec.R(m, zz) - (mpmath.mpf(w.numerator) / w.denominator)) < mpmath.mpf(2) ** -100


def test_exceptional_set():
    assert dec.exceptional_set(3) == {F(3, 2), F(1), F(1, 2)}
    assert dec.exceptional_set(4) == {F(4, 3), F(2, 3), F(1, 3)}


@pytest.mark.parametrize("m", range(3, 9))
def test_exceptional_set_is_sigma_D_and_phi_roots(m):
    from specdec.schur import sigma_D

    phi_roots = {F(m, m - 1)}
    assert dec.exceptional_set(m) == set(sigma_D(m)) | phi_roots


@pytest.mark.parametrize("m", range(3, 9))
def test_classify_exceptional(m):
    assert dec.classify(m, F(m, m - 1))[0] == 5
    assert dec.classify(m, F(2, m - 1))[0] == 3
    assert dec.classify(m, F(1, m - 1))[0] == 6
    case, ev = dec.classify(m, F(1, m - 1))
    assert ev.phi_pole and ev.R_prime_zero and ev.in_sigma_D and ev.mult_D == 1
    assert dec.classify(m, 0)[0] == 1
    for word in itertools.product(("lo", "hi"), repeat=3):
        assert dec.classify(m, EigNode.preimage(m, word))[0] == 1


@pytest.mark.parametrize("m", range(3, 9))
def test_unused_cases_never_fire(m):
    cases = {a.case for n in range(0, 6) for a in dec.spectrum(m, n).atoms}
    zero_mult = {dec.classify(m, F(2, m - 1))[0]}
    assert not (cases | zero_mult) & {2, 4, 7, 8}


def test_dispatch_covers_every_case():
    E = dec.CaseEvidence
    assert dec._dispatch(E(False, 0, False, False, False, False, False)) == 1
    assert dec._dispatch(E(False, 0, True, False, False, False, False)) == 2
    assert dec._dispatch(E(True, 1, False, True, False, False, False)) == 3
    assert dec._dispatch(E(True, 1, False, False, False, False, False)) == 4
    assert dec._dispatch(E(True, 1, True, False, False, False, False)) == 5
    assert dec._dispatch(E(True, 1, False, True, True, False, True)) == 6
    assert dec._dispatch(E(False, 0, True, False, False, True, False)) == 7
    assert dec._dispatch(E(True, 1, True, False, False, True, False)) == 8


MULT_M3 = {
    # n: {label: multiplicity}
    0: {"0": 1, "3/2": 2},
    1: {"0": 1, "3/2": 4, "1/2": 2},
    2: {"0": 1, "3/2": 10, "1/2": 4, "(3-√6)/6": 2, "(3+√6)/6": 2},
    3: {"0": 1, "3/2": 28, "1/2": 10, "(3-√6)/6": 4, "(3+√6)/6": 4,
        "R^-1:ll": 2, "R^-1:lh": 2, "R^-1:hl": 2, "R^-1:hh": 2},
}


@pytest.mark.parametrize("n", range(4))
def test_three_branch_multiplicities(n):
    report = dec.spectrum(3, n)
    assert {a.node.label(): a.multiplicity for a in report.atoms} == MULT_M3[n]
    assert dec.multiplicity(3, n, F(1)) == 0


def test_multiplicity_examples():
    assert dec.multiplicity(3, 2, EigNode.top(3)) == 10
    assert dec.multiplicity(3, 2, F(1, 2)) == 4
    assert dec.multiplicity(3, 3, EigNode.preimage(3, ("lo",))) == 4
    assert dec.multiplicity(3, 3, EigNode.preimage(3, ("hi",))) == 4
    for m in range(3, 9):
        for n in range(0, 6):
            assert dec.multiplicity(m, n, F(2, m - 1)) == 0
            assert dec.multiplicity(m, n, 0) == 1
    with pytest.raises(DomainError):
        dec.multiplicity(3, -1, 0)


def test_spectrum_small():
    assert {a.node.label(): a.multiplicity for a in dec.spectrum(3, 0).atoms} == {"0": 1, "3/2": 2}
    r = dec.spectrum(4, 2)
    assert r.total_count == 49
    assert sorted(a.multiplicity for a in r.atoms) == [1, 3, 3, 9, 33]
    assert r.multiplicity_of(EigNode.top(4)) == 33
    assert r.multiplicity_of(EigNode.preimage(4)) == 9
    assert str(EigNode.preimage(4, ("lo",)).exact) == "(2-√3)/6"


def test_closed_form_powers_of_three():
    r = dec.spectrum_closed_form(3, 3)
    for k in range(4):
        node = EigNode.top(3) if k == 0 else EigNode.preimage(3, ("lo",) * (k - 1))
        assert r.multiplicity_of(node) == 1 + 3 ** (3 - k)
    assert dec.spectrum_closed_form(3, 1) == dec.spectrum(3, 1)


@pytest.mark.parametrize("m", range(3, 9))
def test_recursion_equals_closed_form(m):
    for n in range(0, 7):
        rec, closed = dec.spectrum(m, n), dec.spectrum_closed_form(m, n)
        assert rec.as_dict() == closed.as_dict()
        assert rec.total_count == closed.total_count == 1 + (m - 1) * m**n


@pytest.mark.parametrize("m", range(3, 9))
def test_counting_identity(m):
    for n in range(0, 9):
        lhs, rhs = dec.counting_identity(m, n)
        assert lhs == rhs == 1 + (m - 1) * m**n


@pytest.mark.parametrize("m", range(3, 9))
def test_case6_formulas_agree(m):
    for n in range(1, 7):
        proviso, general = dec.case6_alternative(m, n)
        assert proviso == general == 1 + (m - 2) * m ** (n - 1)


@pytest.mark.parametrize("m", [3, 4, 5, 8])
def test_generation_counts_and_bounds(m):
    n = 6
    report = dec.spectrum(m, n)
    by_gen = {}
    for a in report.atoms:
        if a.node.kind == "preimage":
            by_gen[a.node.depth] = by_gen.get(a.node.depth, 0) + 1
    assert by_gen == {k: 2 ** (k - 1) for k in range(1, n + 1)}
    with workprec():
        t = mpmath.mpf(m) / (m - 1)
        for a in report.atoms:
            x = a.node.value
            assert x == t or 0 <= x < mpmath.mpf(2) / (m - 1)


@pytest.mark.parametrize("m", [3, 5])
def test_branch_separation(m):
    n = 7
    with workprec():
        c = mpmath.mpf(1) / (m - 1)
        tol = mpmath.mpf(2) ** (-(precision_bits() - 8))
        for k in range(2, n + 1):
            nodes = list(dec.tree_nodes(m, n))
            gen = [x for x in nodes if x.kind == "preimage" and x.depth == k]
            vals = sorted(x.value for x in gen)
            assert len(gen) == 2 ** (k - 1)
            assert all(b - a > 1e-6 for a, b in zip(vals, vals[1:]))
            for x in gen:
                if x.word[-1] == "lo":
                    assert 0 <= x.value <= c
                else:
                    assert c <= x.value <= 2 * c
                assert abs(dec.R(m, x.value) - x.parent().value) < tol


def test_node_identity_is_the_word():
    a, b = EigNode.preimage(3, ("lo", "hi")), EigNode.preimage(3, ["lo", "hi"])
    assert a == b and hash(a) == hash(b)
    assert a != EigNode.preimage(3, ("hi", "lo"))
    assert EigNode.top(3).children() == [EigNode.preimage(3)]
    assert EigNode.preimage(3).parent() == EigNode.top(3)
    assert a.label() == "R^-1:lh"
    with pytest.raises(DomainError):
        EigNode(3, "preimage", 2, ())
    with pytest.raises(DomainError):
        EigNode(3, "preimage", 2, ("up",))


def test_node_exact_forms():
    assert EigNode.zero(5).exact == 0
    assert EigNode.top(5).exact == F(5, 4)
    assert EigNode.preimage(5).exact == F(1, 4)
    s = EigNode.preimage(3, ("hi",)).exact
    assert isinstance(s, Surd) and str(s) == "(3+√6)/6"
    assert EigNode.preimage(3, ("lo", "lo")).exact is None


def test_precision_env(monkeypatch):
    monkeypatch.setenv("SPECDEC_PRECISION", "200")
    assert precision_bits() == 200
    monkeypatch.setenv("SPECDEC_PRECISION", "32")
    with pytest.raises(ValueError):
        precision_bits()
    monkeypatch.delenv("SPECDEC_PRECISION")
    assert precision_bits() == 128


def test_precision_changes_deep_values(monkeypatch):
    word = ("lo", "hi") * 4
    monkeypatch.setenv("SPECDEC_PRECISION", "256")
    hp = EigNode.preimage(3, word).value
    monkeypatch.setenv("SPECDEC_PRECISION", "64")
    lp = EigNode.preimage(3, word).value
    monkeypatch.setenv("SPECDEC_PRECISION", "256")
    parent = EigNode.preimage(3, word[:-1]).value
    with mpmath.workprec(256):
        assert abs(hp - lp) < mpmath.mpf(2) ** -55
        assert abs(hp - lp) > 0
        assert abs(dec.R(3, hp) - parent) < mpmath.mpf(2) ** -240


def test_sigma_D_startup_check():
    assert all(dec.verify_sigma_D(m) for m in range(3, 9))
    assert dec.verify_sigma_D(40) is False


def test_export_csv_columns_and_rows():
    text = dec.export_spectrum(dec.spectrum(3, 2), "csv").decode()
    rows = list(csv.DictReader(io.StringIO(text)))
    assert list(rows[0]) == list(dec.SPECTRUM_COLUMNS)
    assert [int(r["multiplicity"]) for r in rows] == [1, 2, 4, 2, 10]
    assert [r["value_exact_or_word"] for r in rows] == ["0", "(3-√6)/6", "1/2", "(3+√6)/6", "3/2"]
    assert [r["case"] for r in rows] == ["1", "1", "6", "1", "5"]


def test_export_json_mirror():
    doc = json.loads(dec.export_spectrum(dec.spectrum(4, 2), "json"))
    assert doc["total_count"] == 49
    assert sum(a["multiplicity"] for a in doc["atoms"]) == 49


def test_bad_arguments():
    with pytest.raises(DomainError):
        dec.spectrum(2, 1)
    with pytest.raises(DomainError):
        dec.spectrum(3, -1)
    with pytest.raises(DomainError):
        dec.export_spectrum(dec.spectrum(3, 1), "xml")
