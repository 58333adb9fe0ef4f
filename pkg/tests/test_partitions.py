import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bipsym.errors import BadShape, MismatchedShape
from bipsym.matrix_core import identity, validate
from bipsym.partitions import (SetPartition, canonical_partition, format_partition, intersection_matrix,
                               parse_partition, standard_partition)

from conftest import random_matrix


def P(*parts):
    return SetPartition.of(parts)


def test_intersection_matrix_examples():
    A = P({1, 2}, {3, 4})
    assert intersection_matrix(A, A).entries == ((2, 0), (0, 2))
    assert intersection_matrix(A, P({1, 3}, {2, 4})).entries == ((1, 1), (1, 1))
    B = P({1, 2, 3}, {4, 5, 6})
    C = P({1, 2, 4}, {3, 5, 6})
    assert intersection_matrix(B, C).entries == ((2, 1), (1, 2))
    with pytest.raises(MismatchedShape):
        intersection_matrix(A, B)


def test_partition_validation():
    with pytest.raises(BadShape):
        P({1, 2}, {2, 3})
    with pytest.raises(BadShape):
        P({1, 2}, {3})
    with pytest.raises(BadShape):
        P({1, 2}, {3, 5})


def test_canonical_partition_examples():
    base = P({1, 2}, {3, 4})
    Q = canonical_partition(validate([[1, 1], [1, 1]]), base)
    assert Q.parts == ((1, 3), (2, 4))
    R = standard_partition(3, 4)
    assert canonical_partition(identity(3, 4), R) == R
    Q = canonical_partition(validate([[0, 2], [2, 0]]), base)
    assert Q.parts == ((3, 4), (1, 2))
    Qc = canonical_partition(validate([[0, 2], [2, 0]]), base, reorder=True)
    assert Qc.parts == ((1, 2), (3, 4))
    assert intersection_matrix(base, Qc).entries == ((2, 0), (0, 2))
    with pytest.raises(MismatchedShape):
        canonical_partition(identity(3, 2), base)


def test_canonical_partition_realizes_matrix(rng):
    for _ in range(200):
        k = int(rng.integers(1, 6))
        l = int(rng.integers(1, 6))
        N = validate(random_matrix(rng, k, l))
        perm = [int(x) + 1 for x in rng.permutation(k * l)]
        base = standard_partition(k, l).relabel(perm)
        Q = canonical_partition(N, base)
        assert intersection_matrix(base, Q) == N


@settings(max_examples=100)
@given(st.integers(1, 4), st.integers(1, 4), st.randoms(use_true_random=False))
def test_transpose_symmetry(k, l, rnd):
    pts = list(range(1, k * l + 1))
    rnd.shuffle(pts)
    A = SetPartition.of(pts[i * l:(i + 1) * l] for i in range(k))
    rnd.shuffle(pts)
    B = SetPartition.of(pts[i * l:(i + 1) * l] for i in range(k))
    M = intersection_matrix(A, B)
    assert intersection_matrix(B, A) == M.transpose()
    assert set(M.row_sums()) == {l}


def test_canonical_order_and_formats():
    X = P({4, 3}, {2, 1})
    assert not X.is_canonical()
    assert X.canonical().parts == ((1, 2), (3, 4))
    text = format_partition(X)
    assert text == "3 4\n1 2\n"
    assert parse_partition(text).parts == ((1, 2), (3, 4))
    assert X.part_of(3) == (3, 4)
    assert X.shares_part(P({1, 2}, {3, 4}))
    assert not P({1, 3}, {2, 4}).shares_part(X)
