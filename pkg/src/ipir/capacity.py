"""Closed-form rate and capacity expressions, evaluated exactly.

Every function returns a :class:`fractions.Fraction` (always in lowest
terms) or ``None`` when the expression is not defined for the arguments.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Optional

Rational = Fraction


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def _check(K: int, D: int, M: int) -> None:
    if D < 2 or M < 1 or K < D + M:
        raise ValueError(f"need D >= 2, M >= 1, K >= D+M; got K={K}, D={D}, M={M}")


def group_size(D: int, M: int) -> int:
    R = gcd(D, M)
    return D // R + M // R


def linear_capacity_bound(K: int, D: int, M: int) -> Fraction:
    _check(K, D, M)
    return Fraction(D + M, K)


def achievable_rate(K: int, D: int, M: int) -> Optional[Fraction]:
    _check(K, D, M)
    if K % group_size(D, M):
        return None
    return Fraction(D + M, K)


def prior_scheme_rate(K: int, D: int, M: int) -> Fraction:
    """Best rate of the earlier partition-and-code style scheme."""
    _check(K, D, M)
    f = K // (D + M)
    # (K - D)/(D + M) <= floor(K/(D + M)), compared in integers
    if K - D <= f * (D + M):
        return Fraction(D, K - M * f)
    return Fraction(1, _ceil_div(K, D + M))


def min_download(K: int, D: int, M: int) -> int:
    """Fewest linear combinations any linear scheme can download: ceil(DK/(D+M))."""
    _check(K, D, M)
    return _ceil_div(D * K, D + M)


def conjectured_capacity(K: int, D: int, M: int) -> Fraction:
    """Conjectured linear capacity D / ceil(DK/(D+M)); unproven in general."""
    return Fraction(D, min_download(K, D, M))


def known_capacity(K: int, D: int, M: int) -> Optional[Fraction]:
    _check(K, D, M)
    if (D, M) == (2, 1):
        return Fraction(2, _ceil_div(2 * K, 3))
    if (D, M) == (2, 2):
        return Fraction(2, _ceil_div(K, 2))
    return None


def capacity_summary(K: int, D: int, M: int) -> dict[str, Optional[Fraction]]:
    return {
        "bound": linear_capacity_bound(K, D, M),
        "achievable": achievable_rate(K, D, M),
        "prior": prior_scheme_rate(K, D, M),
        "conjecture": conjectured_capacity(K, D, M),
        "known": known_capacity(K, D, M),
    }
