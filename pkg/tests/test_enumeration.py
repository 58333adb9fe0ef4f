import math
from fractions import Fraction

import pytest

from bipsym.enumeration import (EnumerationStats, bounded_multisets, chi_oracle, count_matrices,
                                enumerate_matrices, first_rows, interpolate, iter_matrices,
                                min_factorial_product_oracle, mu_oracle, stanley_fit, valid_sequences)
from bipsym.errors import BudgetExceeded, DegreeMismatch
from bipsym.extremal import MultiplicitySequence, mu_formula
from bipsym.matrix_core import cyclic_shift, identity
from bipsym.stabilizer import aut_order, factorial_product


def test_small_counts():
    assert [count_matrices(3, l) for l in range(7)] == [1, 6, 21, 55, 120, 231, 406]
    assert [count_matrices(4, l) for l in range(4)] == [1, 24, 282, 2008]
    assert count_matrices(1, 5) == 1


def test_h2_linear():
    for l in range(51):
        assert count_matrices(2, l) == l + 1


def test_iteration_matches_count():
    for k in range(1, 5):
        for l in range(4):
            mats = list(iter_matrices(k, l))
            assert len(mats) == count_matrices(k, l)
            assert len(set(mats)) == len(mats)
            assert all(N.l == l for N in mats)
    assert set(iter_matrices(2, 3)) == {cyclic_shift((a, 3 - a)) for a in range(4)}
    assert set(iter_matrices(3, 1)) == {N for N in iter_matrices(3, 1) if set(N.multiset()) <= {0, 1}}


def test_row_lexicographic_order():
    mats = [tuple(x for row in N.entries for x in row) for N in iter_matrices(3, 2)]
    assert mats == sorted(mats)


def test_visitor_and_budget():
    seen = []
    stats = enumerate_matrices(3, 2, visitor=seen.append)
    assert stats.count == len(seen) == 21
    with pytest.raises(BudgetExceeded):
        enumerate_matrices(4, 3, budget=100)


def test_stats_fields():
    s = enumerate_matrices(3, 2)
    assert (s.min_aut, s.max_aut) == (6, 48)
    assert s.max_witness == identity(3, 2)
    assert aut_order(s.min_witness) == s.min_aut
    assert s.sum_factorial_products == sum(factorial_product(N) for N in iter_matrices(3, 2))
    assert s.trivial_KN_count <= s.count
    assert s.mean_factorial_product() == Fraction(72, 21)


def test_sharded_run_matches_single():
    a = enumerate_matrices(3, 4)
    b = enumerate_matrices(3, 4, workers=2)
    assert a.to_json() == b.to_json()
    merged = EnumerationStats(3, 4)
    for row in first_rows(3, 4):
        part = EnumerationStats(3, 4)
        for N in iter_matrices(3, 4, first_row=row):
            part.add(N)
        merged = merged.merge(part)
    assert merged.to_json() == a.to_json()


def test_oracles():
    assert chi_oracle(3, 2)[0] == 6
    value, witness = chi_oracle(2, 3)
    assert value == 8 and witness.entries in (((1, 2), (2, 1)), ((2, 1), (1, 2)))
    value, witness = mu_oracle(2, 2)
    assert value == 8 and witness == identity(2, 2)
    for k, l in [(2, 3), (3, 2), (2, 4)]:
        value, witness = mu_oracle(k, l)
        assert value == mu_formula(k, l) and witness == identity(k, l)


def test_interpolate():
    assert interpolate([1, 2, 3, 4]) == [1, 1]
    assert interpolate([0, 1, 4, 9]) == [0, 0, 1]


def test_stanley_fit():
    fit = stanley_fit(2)
    assert fit.degree == 1 and fit.coefficients == [1, 1]
    fit = stanley_fit(3, 5)
    assert fit.degree == 4
    assert fit.coefficients == [Fraction(1), Fraction(9, 4), Fraction(15, 8), Fraction(3, 4), Fraction(1, 8)]
    assert fit(1) == 6 and fit(2) == 21
    assert fit.held_out_ok and fit.actual_next == 406
    with pytest.raises(DegreeMismatch):
        stanley_fit(3, 3)
    with pytest.raises(DegreeMismatch):
        stanley_fit(2, 3, counter=lambda k, l: l * l + 1)


@pytest.mark.slow
def test_stanley_fit_k4():
    fit = stanley_fit(4)
    assert fit.degree == 9 and fit.held_out_ok


def test_factexp_ratio_exact():
    s = enumerate_matrices(3, 2)
    expected = Fraction(72 * 2 ** 4, 21 * math.factorial(2) ** 3)
    assert abs(float(s.factexp_ratio()) - float(expected)) < 1e-20


def test_factorial_oracle_examples():
    assert min_factorial_product_oracle(4, 4)[0] == 1
    assert min_factorial_product_oracle(9, 4, [(1, 4)])[0] == 96
    value, witness = min_factorial_product_oracle(9, 4, [(1, 0)])
    assert value == 216 and witness == (3, 3, 3, 0)


def test_bounded_multisets_and_sequences():
    ms = list(bounded_multisets(4, 3))
    assert sorted(ms) == sorted({tuple(sorted(c, reverse=True)) for c in
                                 [(a, b, 4 - a - b) for a in range(5) for b in range(5 - a)]})
    for pairs in valid_sequences(9, 4):
        MultiplicitySequence(pairs, 9, 4)
