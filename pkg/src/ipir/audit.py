"""Individual-privacy and converse-bound auditing.

``audit_exact`` does not trust any closed form: it drives the query
generator through every possible sequence of random draws, for every
(W, S), and applies Bayes' rule to the resulting exact likelihoods.
"""

from __future__ import annotations

import os
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Callable, Hashable, Iterator, Optional, Sequence

from .capacity import min_download
from .field import FieldMatrix, in_rowspace_with_units
from .protocol import ProtocolParams, Query, QueryError, coefficient_matrix, generate_query
from .rng import RandomSource, choose_subset

DEFAULT_BUDGET = 10**7

Generator = Callable[[ProtocolParams, Sequence[int], Sequence[int], RandomSource], Query]


class AuditBudgetExceeded(RuntimeError):
    pass


class PrivacyViolation(ValueError):
    """The posterior table does not satisfy alpha_i = D/K, so the converse does not apply."""


def audit_budget() -> int:
    raw = os.environ.get("IPIR_AUDIT_BUDGET")
    return int(raw) if raw else DEFAULT_BUDGET


# -- feasible tuples and posterior tables ------------------------------------

def recoverable_from(coeffs: FieldMatrix, known: Sequence[int]) -> list[int]:
    """Indices outside ``known`` whose message follows from the answer plus X_known."""
    return [w for w in range(1, coeffs.cols + 1)
            if w not in known and in_rowspace_with_units(coeffs, known, w)]


def feasible_tuples(coeffs: FieldMatrix, D: int, M: int) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    K = coeffs.cols
    out = []
    for S in combinations(range(1, K + 1), M):
        rec = recoverable_from(coeffs, S)
        for W in combinations(rec, D):
            out.append((W, S))
    out.sort()
    return out


@dataclass
class PosteriorTable:
    K: int
    tuples: list[tuple[tuple[int, ...], tuple[int, ...]]]
    probs: list[Fraction]
    alpha: list[Fraction]
    beta: list[Fraction]

    @classmethod
    def from_tuples(cls, K: int, tuples, probs: Optional[Sequence[Fraction]] = None) -> PosteriorTable:
        tuples = list(tuples)
        if probs is None:
            probs = [Fraction(1, len(tuples))] * len(tuples)
        alpha = [Fraction(0)] * K
        beta = [Fraction(0)] * K
        for (W, S), p in zip(tuples, probs):
            for i in W:
                alpha[i - 1] += p
            for i in S:
                beta[i - 1] += p
        return cls(K, tuples, list(probs), alpha, beta)

    @property
    def tuple_count(self) -> int:
        return len(self.tuples)


def _check_query_params(qy: Query, p: ProtocolParams) -> None:
    if (qy.K, qy.T, qy.d, qy.q, qy.P) != (p.K, p.T, p.d, p.q, p.P):
        raise QueryError("query is inconsistent with the protocol parameters")


def posterior_for_query(qy: Query, p: ProtocolParams) -> PosteriorTable:
    """Posterior over feasible tuples, uniform for canonical Group-and-Code queries."""
    _check_query_params(qy, p)
    tuples = feasible_tuples(coefficient_matrix(qy), p.D, p.M)
    if not tuples:
        raise QueryError("query admits no feasible tuple")
    return PosteriorTable.from_tuples(p.K, tuples)


# -- exhaustive enumeration of a randomized generator ------------------------

class _ReplaySource:
    """Feeds a fixed prefix of draws, then zeros, recording every draw."""

    def __init__(self, prefix: list[tuple[int, int]]):
        self._prefix = prefix
        self.trail: list[tuple[int, int]] = []

    def randbelow(self, n: int) -> int:
        pos = len(self.trail)
        if pos < len(self._prefix):
            c, n0 = self._prefix[pos]
            if n0 != n:
                raise RuntimeError("generator draws depend on something other than earlier draws")
        else:
            c = 0
        self.trail.append((c, n))
        return c


def enumerate_draws(fn: Callable[[RandomSource], object]) -> Iterator[tuple[object, Fraction]]:
    """Yield ``(fn(rng), probability)`` for every distinct draw sequence of ``fn``."""
    prefix: list[tuple[int, int]] = []
    while True:
        src = _ReplaySource(prefix)
        result = fn(src)
        prob = Fraction(1)
        for _, n in src.trail:
            prob /= n
        yield result, prob
        trail = src.trail
        while trail and trail[-1][0] == trail[-1][1] - 1:
            trail.pop()
        if not trail:
            return
        c, n = trail[-1]
        trail[-1] = (c + 1, n)
        prefix = trail


def query_distribution(p: ProtocolParams, W, S, generator: Generator = generate_query) -> dict[Hashable, Fraction]:
    dist: dict[Hashable, Fraction] = defaultdict(Fraction)
    for qy, prob in enumerate_draws(lambda rng: generator(p, W, S, rng)):
        dist[qy.canonical()] += prob
    return dict(dist)


def demand_pairs(K: int, D: int, M: int) -> Iterator[tuple[tuple[int, ...], tuple[int, ...]]]:
    for W in combinations(range(1, K + 1), D):
        rest = [i for i in range(1, K + 1) if i not in W]
        for S in combinations(rest, M):
            yield W, S


# -- privacy reports ---------------------------------------------------------

@dataclass
class PrivacyReport:
    passed: bool
    worst_deviation: Fraction | float
    queries_audited: int
    mode: str
    target: Fraction
    posteriors: dict[Hashable, list] = field(default_factory=dict, repr=False)
    samples: dict[Hashable, int] = field(default_factory=dict, repr=False)

    @property
    def pass_(self) -> bool:
        return self.passed


def exact_posteriors(p: ProtocolParams, generator: Generator = generate_query,
                     budget: Optional[int] = None) -> dict[Hashable, tuple[Fraction, list[Fraction]]]:
    """Map each reachable query to (P(Q), [P(i in W | Q) for i = 1..K]).

    The prior on (W, S) is uniform over disjoint pairs, so it cancels in
    Bayes' rule and only the likelihoods P(Q | W, S) need accumulating.
    """
    budget = audit_budget() if budget is None else budget
    pairs = comb(p.K, p.D) * comb(p.K - p.D, p.M)
    first_W, first_S = next(demand_pairs(p.K, p.D, p.M))
    per_pair = sum(1 for _ in enumerate_draws(lambda rng: generator(p, first_W, first_S, rng)))
    if pairs * per_pair > budget:
        raise AuditBudgetExceeded(
            f"exact audit needs about {pairs * per_pair} generator runs, budget is {budget}"
        )

    total: dict[Hashable, Fraction] = defaultdict(Fraction)
    hits: dict[Hashable, list[Fraction]] = {}
    runs = 0
    for W, S in demand_pairs(p.K, p.D, p.M):
        for qy, prob in enumerate_draws(lambda rng: generator(p, W, S, rng)):
            runs += 1
            if runs > budget:
                raise AuditBudgetExceeded(f"exceeded budget of {budget} generator runs")
            key = qy.canonical()
            total[key] += prob
            row = hits.get(key)
            if row is None:
                row = hits[key] = [Fraction(0)] * p.K
            for i in W:
                row[i - 1] += prob
    return {key: (t / pairs, [h / t for h in hits[key]]) for key, t in total.items()}


def audit_exact(p: ProtocolParams, generator: Generator = generate_query,
                budget: Optional[int] = None) -> PrivacyReport:
    target = Fraction(p.D, p.K)
    post = exact_posteriors(p, generator, budget)
    worst = Fraction(0)
    for _, values in post.values():
        worst = max(worst, max(abs(v - target) for v in values))
    return PrivacyReport(
        passed=worst == 0,
        worst_deviation=worst,
        queries_audited=len(post),
        mode="exact",
        target=target,
        posteriors={k: v for k, (_, v) in post.items()},
    )


def sample_demand(p: ProtocolParams, rng: RandomSource) -> tuple[list[int], list[int]]:
    """Draw S uniformly, then W uniformly among D-subsets disjoint from S."""
    everyone = list(range(1, p.K + 1))
    S = choose_subset(rng, everyone, p.M)
    rest = [i for i in everyone if i not in S]
    W = choose_subset(rng, rest, p.D)
    return W, S


def audit_montecarlo(p: ProtocolParams, trials: int, tol: float, rng: RandomSource,
                     generator: Generator = generate_query, min_samples: int = 30) -> PrivacyReport:
    if trials < 1:
        raise ValueError("trials must be at least 1")
    counts: dict[Hashable, int] = defaultdict(int)
    hits: dict[Hashable, list[int]] = {}
    for _ in range(trials):
        W, S = sample_demand(p, rng)
        key = generator(p, W, S, rng).canonical()
        counts[key] += 1
        row = hits.setdefault(key, [0] * p.K)
        for i in W:
            row[i - 1] += 1
    target = Fraction(p.D, p.K)
    worst = 0.0
    posteriors = {}
    audited = 0
    for key, n in counts.items():
        if n < min_samples:
            continue
        audited += 1
        est = [h / n for h in hits[key]]
        posteriors[key] = est
        worst = max(worst, max(abs(e - float(target)) for e in est))
    return PrivacyReport(
        passed=audited > 0 and worst <= tol,
        worst_deviation=worst,
        queries_audited=audited,
        mode="montecarlo",
        target=target,
        posteriors=posteriors,
        samples=dict(counts),
    )


# -- converse ----------------------------------------------------------------

@dataclass(frozen=True)
class ConverseRecord:
    lhs: Fraction
    bound: Fraction
    l_min: int
    L: int
    passed: bool


def converse_audit(table: PosteriorTable, p: ProtocolParams | tuple[int, int, int], L: int) -> ConverseRecord:
    """Check sum_i beta_i/(alpha+beta_i) <= MK/(D+M) and L >= ceil(DK/(D+M))."""
    K, D, M = (p.K, p.D, p.M) if isinstance(p, ProtocolParams) else p
    alpha = Fraction(D, K)
    if len(table.alpha) != K or any(a != alpha for a in table.alpha):
        raise PrivacyViolation(f"table has alpha_i != {alpha}; converse bound not applicable")
    if sum(table.beta) != M:
        raise PrivacyViolation(f"side-information marginals sum to {sum(table.beta)}, expected {M}")
    lhs = sum((b / (alpha + b) for b in table.beta), Fraction(0))
    bound = Fraction(M * K, D + M)
    l_min = min_download(K, D, M)
    return ConverseRecord(lhs, bound, l_min, L, lhs <= bound and L >= l_min)
