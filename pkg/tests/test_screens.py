import itertools

import numpy as np
import pytest

from butson.algebra import fourier, is_butson, kronecker, unity_matrix
from butson.exceptions import NotApplicable, ParameterError
from butson.screens import (
    SearchResults,
    cocyclic_verdict,
    delauney_screen,
    format_table,
    group_developed_sum_screen,
    lam_leung_screen,
    multiplicative_order,
    sum_screen_witness,
    table_parameters,
)

# published exclusion lists for group-developed matrices
SUM_EXCLUDED_3 = [6, 15, 18, 24, 30, 33, 42, 45, 51, 54, 60, 66, 69, 72, 78, 87, 90, 96, 99]
SUM_EXCLUDED_5 = [10, 15]


def float_sum_screen(n, k):
    """Brute force over compositions of n into k parts, in floating point."""
    z = np.exp(2j * np.pi * np.arange(k) / k)
    for cuts in itertools.combinations(range(n + k - 1), k - 1):
        parts = np.diff((-1,) + cuts + (n + k - 1,)) - 1
        if abs(abs(parts @ z) ** 2 - n) < 1e-7:
            return True
    return False


def test_lam_leung():
    assert lam_leung_screen(6, 6) and lam_leung_screen(5, 6)
    assert not lam_leung_screen(1, 6)
    assert [n for n in range(1, 20) if lam_leung_screen(n, 3)] == list(range(3, 20, 3))
    assert not lam_leung_screen(3, 10) and lam_leung_screen(7, 10)
    with pytest.raises(ParameterError):
        lam_leung_screen(0, 3)


def test_multiplicative_order():
    assert multiplicative_order(2, 7) == 3
    assert multiplicative_order(5, 3) == 2
    with pytest.raises(ParameterError):
        multiplicative_order(3, 3)


def test_delauney_rejections():
    bad = [(n, p) for p, n in table_parameters(100) if n % 2 and not delauney_screen(n, p, p)]
    assert sorted(bad) == [(15, 3), (15, 5), (33, 3)]


def test_delauney_not_applicable():
    with pytest.raises(NotApplicable):
        delauney_screen(12, 3, 3)
    with pytest.raises(NotApplicable):
        delauney_screen(15, 4, 2)


def test_sum_screen_lists():
    assert [n for n in range(3, 101, 3) if not group_developed_sum_screen(n, 3)] == SUM_EXCLUDED_3
    assert [n for n in range(5, 26, 5) if not group_developed_sum_screen(n, 5)] == SUM_EXCLUDED_5


@pytest.mark.parametrize("k,nmax", [(3, 30), (4, 20), (5, 20), (6, 14), (7, 14)])
def test_sum_screen_against_floats(k, nmax):
    for n in range(1, nmax + 1):
        assert group_developed_sum_screen(n, k) == float_sum_screen(n, k), n


def test_sum_screen_witness():
    x = sum_screen_witness(9, 3)
    assert sum(x) == 9
    z = np.exp(2j * np.pi * np.arange(3) / 3)
    assert abs(abs(np.dot(x, z)) ** 2 - 9) < 1e-9
    assert sum_screen_witness(6, 3) is None


def test_sum_screen_for_hadamard_orders():
    # for k = 2 the condition is that n is a square; k = 4 sums of two squares
    assert [n for n in range(1, 30) if group_developed_sum_screen(n, 2)] == [1, 4, 9, 16, 25]
    two_sq = {a * a + b * b for a in range(6) for b in range(6)}
    assert [n for n in range(1, 30) if group_developed_sum_screen(n, 4)] == [n for n in range(1, 30) if n in two_sq]


@pytest.mark.parametrize("n,p,letter", [
    (3, 3, "F"), (5, 5, "F"), (7, 7, "F"), (15, 3, "N"), (33, 3, "N"), (15, 5, "N"),
    (6, 3, "NC"), (24, 3, "NC"), (30, 3, "NC"), (10, 5, "NC"),
])
def test_verdicts_without_search(n, p, letter):
    assert cocyclic_verdict(n, p).verdict == letter


def test_verdicts_with_search_outcomes():
    F = fourier(3)
    assert cocyclic_verdict(9, 3, SearchResults(matrix=kronecker(F, F))).verdict == "E"
    assert cocyclic_verdict(9, 3, SearchResults(matrix=F)).verdict == "UNKNOWN"
    assert cocyclic_verdict(21, 3, SearchResults(rds_complete_none=True)).verdict == "S1"
    assert cocyclic_verdict(18, 3, SearchResults(cocycle_complete_none=True)).verdict == "S2"
    assert cocyclic_verdict(18, 3).verdict == "UNKNOWN"
    # screens take precedence over anything a search reports
    assert cocyclic_verdict(6, 3, SearchResults(rds_complete_none=True)).verdict == "NC"
    with pytest.raises(ParameterError):
        cocyclic_verdict(4, 2)


def test_rejected_matrix_is_recorded():
    bad = unity_matrix(np.zeros((9, 9), dtype=int), 3)
    assert not is_butson(bad)
    v = cocyclic_verdict(9, 3, SearchResults(matrix=bad))
    assert v.verdict == "UNKNOWN" and ("verified matrix", "rejected") in v.justification


def test_format_table():
    verdicts = {(n, p): cocyclic_verdict(n, p) for p, n in table_parameters(100) if n <= 15}
    text = format_table(verdicts)
    lines = text.splitlines()
    assert lines[2].split("|")[1].split()[:2] == ["F", "NC"]
    assert "(15,3) N" in text
