"""Prime-field arithmetic and dense linear algebra over F_q.

Elements are stored as plain integers in ``[0, q)``; :class:`FieldElement`
and :class:`FieldMatrix` carry the modulus so that mixing fields is caught
early. Elimination uses the first nonzero pivot in each column, so every
routine is deterministic in its input.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence


class FieldError(ValueError):
    """Raised on modulus mismatch, non-prime modulus or bad shapes."""


class SingularMatrixError(FieldError):
    """Raised when a square system has no unique solution."""


@lru_cache(maxsize=None)
def is_prime(q: int) -> bool:
    if q < 2:
        return False
    if q < 4:
        return True
    if q % 2 == 0:
        return False
    f = 3
    while f * f <= q:
        if q % f == 0:
            return False
        f += 2
    return True


def check_prime(q: int) -> int:
    if not isinstance(q, int) or isinstance(q, bool) or not is_prime(q):
        raise FieldError(f"field order must be a prime integer, got {q!r}")
    return q


@dataclass(frozen=True)
class FieldElement:
    value: int
    q: int

    def __post_init__(self):
        check_prime(self.q)
        if not 0 <= self.value < self.q:
            raise FieldError(f"value {self.value} not reduced mod {self.q}")

    @classmethod
    def of(cls, value: int, q: int) -> FieldElement:
        return cls(value % q, q)

    def _other(self, other: FieldElement) -> int:
        if not isinstance(other, FieldElement):
            return NotImplemented
        if other.q != self.q:
            raise FieldError(f"modulus mismatch: {self.q} vs {other.q}")
        return other.value

    def __add__(self, other):
        return ff_add(self, other)

    def __sub__(self, other):
        b = self._other(other)
        return FieldElement((self.value - b) % self.q, self.q)

    def __mul__(self, other):
        b = self._other(other)
        return FieldElement(self.value * b % self.q, self.q)

    def __neg__(self):
        return FieldElement(-self.value % self.q, self.q)

    def __truediv__(self, other):
        return self * ff_mul_inv(other)

    def __int__(self):
        return self.value


def ff_add(a: FieldElement, b: FieldElement) -> FieldElement:
    if a.q != b.q:
        raise FieldError(f"modulus mismatch: {a.q} vs {b.q}")
    return FieldElement((a.value + b.value) % a.q, a.q)


def inv_mod(a: int, q: int) -> int:
    a %= q
    if a == 0:
        raise ZeroDivisionError("zero has no multiplicative inverse")
    return pow(a, -1, q)


def ff_mul_inv(a: FieldElement) -> FieldElement:
    return FieldElement(inv_mod(a.value, a.q), a.q)


@dataclass(frozen=True)
class FieldMatrix:
    """Row-major matrix over F_q. ``entries`` holds reduced integers."""

    rows: int
    cols: int
    q: int
    entries: tuple[int, ...]

    def __post_init__(self):
        check_prime(self.q)
        if self.rows < 0 or self.cols < 0:
            raise FieldError("negative dimension")
        if len(self.entries) != self.rows * self.cols:
            raise FieldError(
                f"expected {self.rows * self.cols} entries, got {len(self.entries)}"
            )
        if any(not 0 <= e < self.q for e in self.entries):
            raise FieldError(f"entry not reduced mod {self.q}")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], q: int, cols: int | None = None) -> FieldMatrix:
        rows = [list(r) for r in rows]
        if cols is None:
            if not rows:
                raise FieldError("column count required for an empty matrix")
            cols = len(rows[0])
        if any(len(r) != cols for r in rows):
            raise FieldError("ragged rows")
        return cls(len(rows), cols, q, tuple(int(e) % q for r in rows for e in r))

    @classmethod
    def zeros(cls, rows: int, cols: int, q: int) -> FieldMatrix:
        return cls(rows, cols, q, (0,) * (rows * cols))

    @classmethod
    def identity(cls, n: int, q: int) -> FieldMatrix:
        return cls(n, n, q, tuple(int(i == j) for i in range(n) for j in range(n)))

    def row(self, i: int) -> list[int]:
        return list(self.entries[i * self.cols:(i + 1) * self.cols])

    def to_rows(self) -> list[list[int]]:
        return [self.row(i) for i in range(self.rows)]

    def element(self, i: int, j: int) -> FieldElement:
        return FieldElement(self.entries[i * self.cols + j], self.q)

    def select_columns(self, cols: Sequence[int]) -> FieldMatrix:
        return FieldMatrix.from_rows([[r[c] for c in cols] for r in self.to_rows()], self.q, len(cols))

    def matvec(self, x: Sequence[int]) -> list[int]:
        if len(x) != self.cols:
            raise FieldError("dimension mismatch in matvec")
        return [sum(a * b for a, b in zip(r, x)) % self.q for r in self.to_rows()]


def _echelon(rows: list[list[int]], q: int) -> list[list[int]]:
    """Reduce ``rows`` in place to row echelon form; returns the nonzero rows."""
    if not rows:
        return []
    ncols = len(rows[0])
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = pow(rows[r][c], -1, q)
        rows[r] = [v * inv % q for v in rows[r]]
        for i in range(r + 1, len(rows)):
            f = rows[i][c]
            if f:
                rows[i] = [(a - f * b) % q for a, b in zip(rows[i], rows[r])]
        r += 1
        if r == len(rows):
            break
    return rows[:r]


def rank_of_rows(rows: Iterable[Sequence[int]], q: int) -> int:
    return len(_echelon([[v % q for v in r] for r in rows], q))


def mat_rank(m: FieldMatrix) -> int:
    return rank_of_rows(m.to_rows(), m.q)


def solve_square(a: FieldMatrix, b: Sequence[FieldElement | int]) -> list[FieldElement]:
    """Solve ``a @ x = b`` for nonsingular square ``a``."""
    if a.rows != a.cols:
        raise FieldError("matrix is not square")
    rhs = [[_as_int(v, a.q)] for v in b]
    x = solve_square_vectors(a.to_rows(), rhs, a.q)
    return [FieldElement(r[0], a.q) for r in x]


def _as_int(v, q: int) -> int:
    if isinstance(v, FieldElement):
        if v.q != q:
            raise FieldError(f"modulus mismatch: {q} vs {v.q}")
        return v.value
    return int(v) % q


def solve_square_vectors(a: list[list[int]], b: list[list[int]], q: int) -> list[list[int]]:
    """Solve ``a @ X = B`` where B's rows are length-n vectors (one per equation)."""
    n = len(a)
    if any(len(r) != n for r in a) or len(b) != n:
        raise FieldError("matrix is not square or right-hand side mismatched")
    width = len(b[0]) if b else 0
    aug = [[v % q for v in row] + [v % q for v in rhs] for row, rhs in zip(a, b)]
    for c in range(n):
        pivot = next((i for i in range(c, n) if aug[i][c]), None)
        if pivot is None:
            raise SingularMatrixError("matrix is singular")
        aug[c], aug[pivot] = aug[pivot], aug[c]
        inv = pow(aug[c][c], -1, q)
        aug[c] = [v * inv % q for v in aug[c]]
        for i in range(n):
            f = aug[i][c]
            if i != c and f:
                aug[i] = [(x - f * y) % q for x, y in zip(aug[i], aug[c])]
    return [aug[i][n:n + width] for i in range(n)]


def in_rowspace_with_units(coeffs: FieldMatrix, unit_indices: Iterable[int], target: int) -> bool:
    """Whether e_target lies in span(rows of coeffs, e_s for s in unit_indices).

    Indices are 1-based message indices in ``[1, coeffs.cols]``.
    """
    k = coeffs.cols
    units = sorted(set(unit_indices))
    for i in [*units, target]:
        if not 1 <= i <= k:
            raise IndexError(f"index {i} outside [1, {k}]")
    if target in units:
        return True
    # Eliminate the known coordinates, then ask whether e_target is in the
    # row space of what remains.
    keep = [c for c in range(k) if c + 1 not in units]
    reduced = [[r[c] for c in keep] for r in coeffs.to_rows()]
    base = rank_of_rows(reduced, coeffs.q)
    unit = [int(c + 1 == target) for c in keep]
    return rank_of_rows(reduced + [unit], coeffs.q) == base
