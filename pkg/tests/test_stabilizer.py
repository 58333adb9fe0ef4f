import itertools
import json
import math

import pytest

from bipsym.errors import EqualInputs, NotFixedPointFree, NotInvolution
from bipsym.extremal import minimizer_r0, minimizer_r_pm2
from bipsym.matrix_core import RectMatrix, all_ones, cyclic_shift, identity, truncated_staircase, validate
from bipsym.stabilizer import (FppInvolution, PermPair, StabilizerReport, aut_order, factorial_product,
                               fpf_involutions, group_elements, involution_centralizer_order,
                               is_partwise_fixed, order_by_row_arrangements, order_KN, stabilizer)

from conftest import random_matrix


def brute_force_order(N):
    a, b = N.shape
    e = N.entries
    count = 0
    for rho in itertools.permutations(range(a)):
        for gamma in itertools.permutations(range(b)):
            if all(e[rho[i]][gamma[j]] == e[i][j] for i in range(a) for j in range(b)):
                count += 1
    return count


def test_examples():
    assert order_KN(all_ones(3)) == 36
    rep = stabilizer(identity(3, 2))
    assert rep.order_KN == 6 and rep.aut_order == 48
    assert order_KN(cyclic_shift((2, 1, 0))) == 3
    assert brute_force_order(cyclic_shift((2, 1, 0))) == 3
    assert order_KN(minimizer_r0(8, 2)) == 1


def test_partwise_fixed_examples():
    assert not is_partwise_fixed(all_ones(2))
    assert not is_partwise_fixed(validate([[2, 1, 0], [0, 2, 1], [1, 0, 2]]))
    assert is_partwise_fixed(minimizer_r_pm2(7, 1, 1))


def test_matches_brute_force(rng):
    for _ in range(150):
        a, b = int(rng.integers(1, 5)), int(rng.integers(1, 5))
        N = RectMatrix(rng.integers(0, 3, size=(a, b)).tolist())
        expected = brute_force_order(N)
        assert order_KN(N) == expected
        assert order_by_row_arrangements(N) == expected
        assert is_partwise_fixed(N) == (expected == 1)


def test_generators_generate(rng):
    for _ in range(60):
        k = int(rng.integers(2, 5))
        N = validate(random_matrix(rng, k, int(rng.integers(1, 4))))
        rep = stabilizer(N, generators=True)
        for g in rep.generators:
            assert g.fixes(N)
            # equal entry multisets on rows swapped by an element
            for i, j in enumerate(g.rho):
                assert sorted(N.entries[i]) == sorted(N.entries[j])
        assert len(group_elements(rep.generators, k, k)) == rep.order_KN


def test_large_symmetric_cases_fast():
    assert order_KN(all_ones(12)) == math.factorial(12) ** 2
    assert order_KN(identity(12, 3)) == math.factorial(12)


def test_aut_order_is_product():
    N = validate([[3, 1, 0], [0, 3, 1], [1, 0, 3]])
    assert factorial_product(N) == 6 ** 3
    assert aut_order(N) == 3 * 6 ** 3


def test_invariances(rng):
    for _ in range(200):
        k = int(rng.integers(2, 7))
        N = validate(random_matrix(rng, k, int(rng.integers(1, 11))))
        base = order_KN(N)
        sigma, tau = rng.permutation(k).tolist(), rng.permutation(k).tolist()
        assert order_KN(N.permuted(sigma, tau)) == base
        assert order_KN(N.transpose()) == base
        lam = int(rng.integers(1, 4))
        assert order_KN(validate((N + all_ones(k) * lam).entries)) == base


def test_shift_invariance_as_sets(rng):
    for _ in range(30):
        k = int(rng.integers(2, 4))
        N = validate(random_matrix(rng, k, int(rng.integers(1, 4))))
        M = validate((N + all_ones(k) * 2).entries)
        g1 = group_elements(stabilizer(N, generators=True).generators, k, k)
        g2 = group_elements(stabilizer(M, generators=True).generators, k, k)
        assert g1 == g2


def test_theta_lower_bound(rng):
    for _ in range(100):
        k = int(rng.integers(1, 8))
        v = rng.integers(0, 6, size=k).tolist()
        assert order_KN(cyclic_shift(v)) >= k


def _restricted_row_action(N, t):
    """Elements of K_N that setwise fix the first t rows, restricted to those rows."""
    rep = stabilizer(N, generators=True)
    elems = group_elements(rep.generators, N.rows, N.cols)
    return {g.rho[:t] for g in elems if set(g.rho[:t]) == set(range(t))}, elems


@pytest.mark.parametrize("t", range(2, 7))
def test_weak_staircase_group_is_c2(t):
    N = truncated_staircase(t, (1, 1) + (0,) * (t - 1)).matrix
    assert N.shape == (t, t + 1)
    elems = group_elements(stabilizer(N, generators=True).generators, t, t + 1)
    assert len(elems) == 2
    flip = next(g for g in elems if not g.is_identity())
    assert flip.rho == tuple(reversed(range(t)))
    assert flip.gamma == tuple(reversed(range(t + 1)))


@pytest.mark.parametrize("t", range(2, 7))
def test_strong_staircase_fixes_rows(t):
    N = truncated_staircase(t, (2, 1) + (0,) * (t - 1)).matrix
    elems = group_elements(stabilizer(N, generators=True).generators, t, t + 1)
    assert all(g.rho == tuple(range(t)) for g in elems)


def test_single_peak_matrices_have_symmetry(rng):
    """Largest entry q+1 once per row and column, margins qk: |K_N| >= 3."""
    for _ in range(100):
        k = int(rng.integers(3, 7))
        q = int(rng.integers(1, 4))
        perm = rng.permutation(k)
        # q+1 at (i, perm(i)); the remaining margin q(k) - (q+1) spread by q-1 ... keep all <= q
        grid = [[q] * k for _ in range(k)]
        for i in range(k):
            grid[i][perm[i]] = q + 1
            grid[i][perm[(i + 1) % k]] -= 1
        N = validate(grid)
        assert order_KN(N) >= 3


def test_permpair_json():
    g = PermPair((1, 0, 2), (0, 2, 1))
    assert g.to_json() == {"rho": [2, 1, 3], "gamma": [1, 3, 2]}
    assert PermPair.from_json(g.to_json()) == g
    rep = stabilizer(all_ones(2), generators=True)
    back = StabilizerReport.from_json(json.loads(json.dumps(rep.to_json())))
    assert back == rep


def test_centralizer_examples():
    x = FppInvolution.from_cycles([(1, 2), (3, 4), (5, 6)])
    y = FppInvolution.from_cycles([(2, 3), (4, 5), (1, 6)])
    prof = involution_centralizer_order(x, y)
    assert prof.order == 6 and prof.components == {3: 1}
    x = FppInvolution.from_cycles([(1, 2), (3, 4)])
    y = FppInvolution.from_cycles([(1, 3), (2, 4)])
    assert involution_centralizer_order(x, y).order == 4
    with pytest.raises(EqualInputs):
        involution_centralizer_order(x, x)
    with pytest.raises(NotFixedPointFree):
        FppInvolution((2, 1, 3))
    with pytest.raises(NotInvolution):
        FppInvolution((2, 3, 1))


def _brute_centralizer(x, y):
    n = x.degree
    count = 0
    for p in itertools.permutations(range(1, n + 1)):
        if all(p[x.images[i] - 1] == x.images[p[i] - 1] for i in range(n)) and \
           all(p[y.images[i] - 1] == y.images[p[i] - 1] for i in range(n)):
            count += 1
    return count


def test_centralizer_matches_brute_force():
    invs = list(fpf_involutions(6))
    assert len(invs) == 15
    x = invs[0]
    for y in invs[1:]:
        assert involution_centralizer_order(x, y).order == _brute_centralizer(x, y)


@pytest.mark.parametrize("k", [3, 4, 5])
def test_centralizer_minimum_is_2k(k):
    # every fixed-point-free involution is conjugate to the first one, so fixing x loses nothing
    invs = list(fpf_involutions(2 * k))
    x = invs[0]
    assert min(involution_centralizer_order(x, y).order for y in invs if y != x) == 2 * k
