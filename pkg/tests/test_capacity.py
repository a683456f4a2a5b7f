from fractions import Fraction
from math import gcd

import pytest

from ipir.capacity import (achievable_rate, conjectured_capacity, known_capacity,
                           linear_capacity_bound, prior_scheme_rate)
from ipir.protocol import derive_params, rate

F = Fraction


def grid(K_max=60, D_max=6, M_max=6):
    for K in range(3, K_max + 1):
        for D in range(2, D_max + 1):
            for M in range(1, M_max + 1):
                if K >= D + M:
                    yield K, D, M


def test_bound_examples():
    assert linear_capacity_bound(6, 2, 1) == F(1, 2)
    assert linear_capacity_bound(5, 2, 3) == 1
    assert linear_capacity_bound(12, 2, 4) == F(1, 2)
    with pytest.raises(ValueError):
        linear_capacity_bound(2, 2, 1)


def test_achievable_examples():
    assert achievable_rate(9, 2, 4) == F(2, 3)
    assert achievable_rate(10, 2, 4) is None
    assert achievable_rate(8, 2, 2) == F(1, 2)


def test_prior_scheme_examples():
    assert prior_scheme_rate(12, 2, 4) == F(1, 2)
    assert prior_scheme_rate(9, 2, 4) == F(1, 2)
    assert prior_scheme_rate(6, 2, 4) == 1


def test_conjecture_examples():
    assert conjectured_capacity(9, 2, 4) == F(2, 3)
    assert conjectured_capacity(10, 2, 4) == F(1, 2)
    assert conjectured_capacity(7, 3, 4) == 1


def test_known_capacity_examples():
    assert known_capacity(6, 2, 1) == F(1, 2)
    assert known_capacity(8, 2, 2) == F(1, 2)
    assert known_capacity(8, 3, 2) is None


def test_rationals_are_reduced():
    r = linear_capacity_bound(12, 2, 4)
    assert (r.numerator, r.denominator) == (1, 2)


def test_agreement_whenever_group_size_divides_K():
    for K, D, M in grid():
        R = gcd(D, M)
        if K % (D // R + M // R):
            assert achievable_rate(K, D, M) is None
            continue
        bound = linear_capacity_bound(K, D, M)
        assert achievable_rate(K, D, M) == bound == conjectured_capacity(K, D, M)
        known = known_capacity(K, D, M)
        assert known is None or known == bound


def test_prior_scheme_never_beats_bound():
    for K, D, M in grid():
        prior = prior_scheme_rate(K, D, M)
        bound = linear_capacity_bound(K, D, M)
        assert prior <= bound
        if K % (D + M):
            assert prior < bound
        else:
            assert prior == bound


def test_protocol_rate_matches_achievable():
    for K, D, M in grid(K_max=30):
        R = gcd(D, M)
        if K % (D // R + M // R):
            continue
        T = D // R + M // R
        q = next(x for x in range(max(T, 2), 100) if all(x % f for f in range(2, x)))
        assert rate(derive_params(K, D, M, q)) == achievable_rate(K, D, M)


def test_linear_scaling_limit():
    # D = K/4, M = K/4: the bound stays at the constant 1/2 along the sequence
    errs = []
    for K in (8, 16, 32, 64):
        D, M = K // 4, K // 4
        assert achievable_rate(K, D, M) is not None
        errs.append(abs(linear_capacity_bound(K, D, M) - F(1, 2)))
    assert errs == sorted(errs, reverse=True) and errs[-1] == 0
