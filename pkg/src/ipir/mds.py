"""[T, d] MDS generator matrices (Vandermonde / repetition)."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .field import FieldError, FieldMatrix, check_prime, mat_rank


@dataclass(frozen=True)
class GeneratorMatrix:
    matrix: FieldMatrix
    points: tuple[int, ...] = ()

    @property
    def d(self) -> int:
        return self.matrix.rows

    @property
    def T(self) -> int:
        return self.matrix.cols

    @property
    def q(self) -> int:
        return self.matrix.q

    def to_rows(self) -> list[list[int]]:
        return self.matrix.to_rows()


def min_field_order(T: int, d: int) -> int:
    """Smallest q admitted by :func:`build_generator` (before the primality check)."""
    return 2 if d == 1 else T


def build_generator(T: int, d: int, q: int) -> GeneratorMatrix:
    """Public, deterministic generator of a [T, d] MDS code over F_q.

    ``d == 1`` gives the all-ones row; otherwise rows are powers 0..d-1 of the
    evaluation points 0, 1, ..., T-1.
    """
    check_prime(q)
    if not 1 <= d <= T:
        raise FieldError(f"need 1 <= d <= T, got T={T}, d={d}")
    if d == 1:
        return GeneratorMatrix(FieldMatrix.from_rows([[1] * T], q))
    if q < T:
        raise FieldError(f"q={q} has fewer than T={T} distinct evaluation points")
    points = tuple(range(T))
    rows = [[pow(x, e, q) for x in points] for e in range(d)]
    return GeneratorMatrix(FieldMatrix.from_rows(rows, q), points)


def verify_mds(g: GeneratorMatrix | FieldMatrix) -> bool:
    m = g.matrix if isinstance(g, GeneratorMatrix) else g
    d, T = m.rows, m.cols
    if d > T:
        return False
    return all(mat_rank(m.select_columns(cols)) == d for cols in combinations(range(T), d))
