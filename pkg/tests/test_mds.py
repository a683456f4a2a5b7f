from itertools import combinations

import pytest

from ipir.field import FieldError, FieldMatrix, is_prime
from ipir.mds import build_generator, verify_mds

from oracles import leibniz_det


def smallest_prime_at_least(n):
    n = max(n, 2)
    while not is_prime(n):
        n += 1
    return n


def test_repetition_row():
    g = build_generator(3, 1, 2)
    assert g.to_rows() == [[1, 1, 1]]
    assert g.points == ()


def test_vandermonde_example():
    g = build_generator(3, 2, 3)
    assert g.to_rows() == [[1, 1, 1], [0, 1, 2]]
    minors = [leibniz_det([[r[a], r[b]] for r in g.to_rows()], 3) for a, b in combinations(range(3), 2)]
    assert minors == [1, 2, 1]
    assert verify_mds(g)


def test_too_small_field():
    with pytest.raises(FieldError):
        build_generator(5, 2, 3)
    with pytest.raises(FieldError):
        build_generator(3, 2, 4)
    with pytest.raises(FieldError):
        build_generator(2, 3, 5)


def test_verify_rejects_duplicate_rows():
    assert not verify_mds(FieldMatrix.from_rows([[1, 1, 1], [1, 1, 1]], 3))
    assert verify_mds(FieldMatrix.from_rows([[1, 0], [0, 1]], 3))


@pytest.mark.parametrize("T", range(1, 9))
def test_all_small_generators_are_mds(T):
    for d in range(1, T + 1):
        q = smallest_prime_at_least(2 if d == 1 else T)
        assert verify_mds(build_generator(T, d, q)), (T, d, q)


@pytest.mark.parametrize("T,d,q", [(4, 2, 5), (5, 3, 7), (6, 3, 7), (4, 4, 5)])
def test_minors_match_vandermonde_product(T, d, q):
    g = build_generator(T, d, q)
    rows = g.to_rows()
    for cols in combinations(range(T), d):
        det = leibniz_det([[r[c] for c in cols] for r in rows], q)
        prod = 1
        pts = [g.points[c] for c in cols]
        for i in range(d):
            for j in range(i + 1, d):
                prod *= pts[j] - pts[i]
        assert det == prod % q != 0
