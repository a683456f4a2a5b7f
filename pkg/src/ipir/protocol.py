"""Group-and-Code: query generation, server answer, client recovery.

The user splits [K] into P = K/T groups of size T = d + m. R of them each
hold d demand indices and m side-information indices; the rest hold only
unrelated indices. The server returns d MDS-coded combinations per group.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Mapping, Sequence

from .field import FieldError, FieldMatrix, check_prime, solve_square_vectors
from .mds import GeneratorMatrix, build_generator, min_field_order, verify_mds
from .rng import RandomSource, set_partition, shuffle


class ParameterError(ValueError):
    pass


class QueryError(ValueError):
    pass


@dataclass(frozen=True)
class ProtocolParams:
    K: int
    D: int
    M: int
    q: int
    n: int = 1

    def __post_init__(self):
        if self.D < 2 or self.M < 1 or self.K < self.D + self.M:
            raise ParameterError(
                f"need D >= 2, M >= 1, K >= D+M; got K={self.K}, D={self.D}, M={self.M}"
            )
        if self.n < 1:
            raise ParameterError("n must be at least 1")
        try:
            check_prime(self.q)
        except FieldError as e:
            raise ParameterError(str(e)) from None
        if self.K % self.T:
            raise ParameterError(f"group size T={self.T} does not divide K={self.K}")
        if self.q < min_field_order(self.T, self.d):
            raise ParameterError(
                f"q={self.q} too small for a [{self.T},{self.d}] MDS code"
            )

    @property
    def R(self) -> int:
        return gcd(self.D, self.M)

    @property
    def d(self) -> int:
        return self.D // self.R

    @property
    def m(self) -> int:
        return self.M // self.R

    @property
    def T(self) -> int:
        return self.d + self.m

    @property
    def P(self) -> int:
        return self.K // self.T

    @property
    def L(self) -> int:
        return self.P * self.d


def derive_params(K: int, D: int, M: int, q: int, n: int = 1) -> ProtocolParams:
    return ProtocolParams(K, D, M, q, n)


@dataclass(frozen=True)
class MessageDb:
    K: int
    n: int
    q: int
    messages: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        check_prime(self.q)
        if len(self.messages) != self.K:
            raise FieldError(f"expected {self.K} messages, got {len(self.messages)}")
        for i, msg in enumerate(self.messages, 1):
            if len(msg) != self.n:
                raise FieldError(f"message {i} has {len(msg)} symbols, expected {self.n}")
            if any(not 0 <= x < self.q for x in msg):
                raise FieldError(f"message {i} has a symbol outside [0, {self.q})")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], q: int) -> MessageDb:
        rows = tuple(tuple(int(x) % q for x in r) for r in rows)
        n = len(rows[0]) if rows else 0
        return cls(len(rows), n, q, rows)

    @classmethod
    def random(cls, K: int, n: int, q: int, rng: RandomSource) -> MessageDb:
        return cls(K, n, q, tuple(tuple(rng.randbelow(q) for _ in range(n)) for _ in range(K)))

    def message(self, i: int) -> tuple[int, ...]:
        """1-based access."""
        return self.messages[i - 1]


@lru_cache(maxsize=256)
def _is_mds(g: GeneratorMatrix) -> bool:
    return verify_mds(g)


@dataclass(frozen=True)
class Query:
    K: int
    groups: tuple[tuple[int, ...], ...]
    generator: GeneratorMatrix

    def __post_init__(self):
        T = self.generator.T
        seen = []
        for g in self.groups:
            if len(g) != T:
                raise QueryError(f"group {list(g)} has size {len(g)}, expected {T}")
            if any(a >= b for a, b in zip(g, g[1:])):
                raise QueryError(f"group {list(g)} is not strictly increasing")
            seen.extend(g)
        if sorted(seen) != list(range(1, self.K + 1)):
            raise QueryError(f"groups do not partition [1, {self.K}]")
        if not _is_mds(self.generator):
            raise QueryError("generator is not MDS")

    @property
    def P(self) -> int:
        return len(self.groups)

    @property
    def T(self) -> int:
        return self.generator.T

    @property
    def d(self) -> int:
        return self.generator.d

    @property
    def q(self) -> int:
        return self.generator.q

    def canonical(self) -> tuple:
        """Hashable identity of the query as the server sees it (slot order kept)."""
        return (self.groups, self.generator.matrix.entries)


@dataclass(frozen=True)
class Answer:
    P: int
    d: int
    n: int
    q: int
    coded: tuple[tuple[int, ...], ...] = field(repr=False)

    def __post_init__(self):
        if len(self.coded) != self.P * self.d:
            raise FieldError(f"expected {self.P * self.d} coded vectors, got {len(self.coded)}")
        for v in self.coded:
            if len(v) != self.n or any(not 0 <= x < self.q for x in v):
                raise FieldError("coded vector has wrong length or unreduced symbol")

    def z(self, k: int, l: int) -> tuple[int, ...]:
        """Z_{k,l}, 0-based group k and row l."""
        return self.coded[k * self.d + l]


def _check_demand(p: ProtocolParams, W: Iterable[int], S: Iterable[int]) -> tuple[list[int], list[int]]:
    W, S = sorted(set(W)), sorted(set(S))
    if len(W) != p.D or len(S) != p.M:
        raise QueryError(f"need |W|={p.D} and |S|={p.M}, got {len(W)} and {len(S)}")
    if any(not 1 <= i <= p.K for i in W + S):
        raise QueryError(f"indices must lie in [1, {p.K}]")
    if set(W) & set(S):
        raise QueryError("demand and side information overlap")
    return W, S


def generate_query(p: ProtocolParams, W: Iterable[int], S: Iterable[int], rng: RandomSource) -> Query:
    W, S = _check_demand(p, W, S)
    w_blocks = set_partition(rng, W, p.d)
    s_blocks = set_partition(rng, S, p.m)
    shuffle(rng, s_blocks)
    groups = [sorted(a + b) for a, b in zip(w_blocks, s_blocks)]
    used = set(W) | set(S)
    rest = [i for i in range(1, p.K + 1) if i not in used]
    if rest:
        groups.extend(set_partition(rng, rest, p.T))
    # Slot order must not reveal which groups carry the demand.
    shuffle(rng, groups)
    return Query(p.K, tuple(tuple(g) for g in groups), build_generator(p.T, p.d, p.q))


def coefficient_matrix(qy: Query) -> FieldMatrix:
    """L x K matrix whose row (k, l) holds v_{l,j} at column i_{k,j}."""
    V = qy.generator.to_rows()
    rows = []
    for g in qy.groups:
        for v in V:
            row = [0] * qy.K
            for j, i in enumerate(g):
                row[i - 1] = v[j]
            rows.append(row)
    return FieldMatrix.from_rows(rows, qy.q, qy.K)


def compute_answer(qy: Query, db: MessageDb) -> Answer:
    if db.K != qy.K or db.q != qy.q:
        raise FieldError(
            f"database (K={db.K}, q={db.q}) does not match query (K={qy.K}, q={qy.q})"
        )
    q, n = db.q, db.n
    coded = []
    for g in qy.groups:
        members = [db.message(i) for i in g]
        for v in qy.generator.to_rows():
            coded.append(tuple(
                sum(c * x[s] for c, x in zip(v, members)) % q for s in range(n)
            ))
    return Answer(qy.P, qy.d, n, q, tuple(coded))


def recover(p: ProtocolParams, qy: Query, ans: Answer, W: Iterable[int], S: Iterable[int],
            sideinfo: Sequence[Sequence[int]] | Mapping[int, Sequence[int]]) -> list[list[int]]:
    """Decode X_W; ``sideinfo`` is indexed like sorted(S) or keyed by index."""
    W, S = _check_demand(p, W, S)
    if (ans.P, ans.d, ans.q) != (qy.P, qy.d, qy.q) or qy.K != p.K:
        raise QueryError("answer shape does not match the query")
    if isinstance(sideinfo, Mapping):
        side = {i: list(sideinfo[i]) for i in S}
    else:
        if len(sideinfo) != len(S):
            raise QueryError(f"expected {len(S)} side-information messages")
        side = dict(zip(S, (list(v) for v in sideinfo)))
    if any(len(v) != ans.n for v in side.values()):
        raise QueryError("side-information length does not match the answer")

    q = qy.q
    V = qy.generator.to_rows()
    wset, sset = set(W), set(S)
    out: dict[int, list[int]] = {}
    for k, g in enumerate(qy.groups):
        J = [j for j, i in enumerate(g) if i in wset]
        if not J:
            continue
        Js = [j for j, i in enumerate(g) if i in sset]
        if len(J) != qy.d or len(J) + len(Js) != qy.T:
            raise QueryError(f"group {list(g)} is not a demand group of this query")
        rhs = []
        for l, v in enumerate(V):
            z = list(ans.z(k, l))
            for j in Js:
                x = side[g[j]]
                z = [(a - v[j] * b) % q for a, b in zip(z, x)]
            rhs.append(z)
        sol = solve_square_vectors([[v[j] for j in J] for v in V], rhs, q)
        for j, x in zip(J, sol):
            out[g[j]] = x
    if set(out) != wset:
        raise QueryError("query does not cover the whole demand")
    return [out[w] for w in W]


def download_cost(p: ProtocolParams) -> int:
    return p.P * p.d


def rate(p: ProtocolParams) -> Fraction:
    return Fraction(p.D, download_cost(p))
