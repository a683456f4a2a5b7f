"""Exit criteria; run ``pytest tests/test_acceptance.py`` for the pass/fail summary."""

import os
import random
import subprocess
import sys
import time
from fractions import Fraction
from math import gcd
from pathlib import Path

import pytest

from ipir.audit import audit_exact, audit_montecarlo, converse_audit, demand_pairs, posterior_for_query, PosteriorTable
from ipir.capacity import (achievable_rate, known_capacity, linear_capacity_bound, min_download,
                           prior_scheme_rate)
from ipir.cli import main
from ipir.field import is_prime
from ipir.mds import build_generator, verify_mds
from ipir.protocol import (MessageDb, ParameterError, compute_answer, derive_params, download_cost,
                           generate_query, recover)
from ipir.rng import Xoshiro256

F = Fraction


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


def smallest_admissible_prime(T, d):
    q = 2 if d == 1 else T
    while not is_prime(q):
        q += 1
    return q


@pytest.mark.criterion("C1", "capacity tightness: D/L = (D+M)/K and L = ceil(DK/(D+M)), K<=24 D<=4 M<=6")
def test_c1_capacity_tightness():
    checked = 0
    with Timer() as t:
        for K in range(1, 25):
            for D in range(2, 5):
                for M in range(1, 7):
                    if K < D + M:
                        continue
                    R = gcd(D, M)
                    T, d = D // R + M // R, D // R
                    if K % T:
                        continue
                    p = derive_params(K, D, M, smallest_admissible_prime(T, d))
                    L = download_cost(p)
                    assert F(D, L) == F(D + M, K)
                    assert L == min_download(K, D, M)
                    checked += 1
    assert checked > 50
    assert t.elapsed < 1.0


def _recover_configs():
    for K in (6, 9, 12):
        for D, M in ((2, 1), (2, 4), (2, 2)):
            for q in (2, 3, 5):
                for n in (1, 4):
                    try:
                        yield derive_params(K, D, M, q, n)
                    except ParameterError:
                        pass


@pytest.mark.criterion("C2", "recoverability: exhaustive (W,S), K in {6,9,12}, zero tolerance")
def test_c2_recoverability():
    rnd = random.Random(0)
    total = failures = 0
    with Timer() as t:
        for p in _recover_configs():
            db = MessageDb.from_rows([[rnd.randrange(p.q) for _ in range(p.n)] for _ in range(p.K)], p.q)
            rng = Xoshiro256(p.K * 1000 + p.D * 100 + p.M * 10 + p.q + p.n)
            for W, S in demand_pairs(p.K, p.D, p.M):
                qy = generate_query(p, W, S, rng)
                got = recover(p, qy, compute_answer(qy, db), W, S, [db.messages[s - 1] for s in S])
                total += 1
                failures += got != [list(db.messages[w - 1]) for w in W]
    assert total > 100_000
    assert failures == 0
    assert t.elapsed < 30.0


@pytest.mark.criterion("C3", "exact privacy: deviation exactly 0 for (6,2,1,3), (9,2,4,3), (8,2,2,2); broken generator fails")
@pytest.mark.parametrize("args", [(6, 2, 1, 3), (9, 2, 4, 3), (8, 2, 2, 2)])
def test_c3_exact_privacy(args, broken_generator):
    p = derive_params(*args)
    with Timer() as t:
        rep = audit_exact(p)
    assert rep.passed and rep.worst_deviation == 0
    assert t.elapsed < 60.0
    assert not audit_exact(p, generator=broken_generator).passed


@pytest.mark.criterion("C4", "Monte-Carlo privacy: 1e5 trials at (6,2,1), max bin deviation <= 0.02")
def test_c4_montecarlo_privacy():
    with Timer() as t:
        rep = audit_montecarlo(derive_params(6, 2, 1, 3), 100_000, 0.02, Xoshiro256(42))
    print(f"max bin deviation {rep.worst_deviation:.5f} over {rep.queries_audited} bins")
    assert t.elapsed < 30.0
    assert rep.worst_deviation <= 0.02


@pytest.mark.criterion("C5", "converse: lhs = 2 = MK/(D+M), L = 4 = l_min at (6,2,1); random beta never exceeds bound")
def test_c5_converse():
    p = derive_params(6, 2, 1, 3)
    table = posterior_for_query(generate_query(p, [1, 2], [3], Xoshiro256(42)), p)
    rec = converse_audit(table, p, download_cost(p))
    assert rec.lhs == 2 == rec.bound == F(p.M * p.K, p.D + p.M)
    assert rec.L == 4 == rec.l_min
    rnd = random.Random(5)
    alpha = [F(p.D, p.K)] * p.K
    for trial in range(100):
        raw = [rnd.randint(0, 9) for _ in range(p.K)] if trial else [1] * p.K
        if not any(raw):
            raw[0] = 1
        beta = [F(p.M * r, sum(raw)) for r in raw]
        r = converse_audit(PosteriorTable(p.K, [], [], alpha, beta), p, 4)
        assert r.lhs <= r.bound
        assert (r.lhs < r.bound) != all(b == F(p.M, p.K) for b in beta)


@pytest.mark.criterion("C6", "separation from earlier scheme: 1/2 < 2/3 at (9,2,4); equal 1/2 at (12,2,4)")
def test_c6_prior_scheme_separation():
    assert prior_scheme_rate(9, 2, 4) == F(1, 2) < achievable_rate(9, 2, 4) == F(2, 3)
    assert prior_scheme_rate(12, 2, 4) == achievable_rate(12, 2, 4) == F(1, 2)


@pytest.mark.criterion("C7", "known capacities match the linear bound under divisibility, K <= 60")
def test_c7_known_capacity_consistency():
    for K in range(3, 61):
        if K % 3 == 0:
            assert known_capacity(K, 2, 1) == F(2, -(-2 * K // 3)) == linear_capacity_bound(K, 2, 1)
    for K in range(4, 61):
        if K % 2 == 0:
            assert known_capacity(K, 2, 2) == F(2, -(-K // 2)) == linear_capacity_bound(K, 2, 2)


@pytest.mark.criterion("C8", "MDS property for every T <= 8, d <= T at the smallest admissible prime")
def test_c8_mds():
    with Timer() as t:
        for T in range(1, 9):
            for d in range(1, T + 1):
                assert verify_mds(build_generator(T, d, smallest_admissible_prime(T, d)))
    assert t.elapsed < 5.0


@pytest.mark.criterion("C9", "networked pipeline gen-db -> serve -> fetch -> recover, byte-for-byte demand rows")
def test_c9_networked_pipeline(tmp_path, capsys):
    db, qf, af, out = (tmp_path / n for n in ("db.txt", "q.txt", "a.txt", "demand.txt"))
    env = dict(os.environ, PYTHONPATH=os.pathsep.join(sys.path))
    with Timer() as t:
        assert main(["gen-db", "--k", "6", "--n", "4", "--q", "3", "--seed", "42", "--out", str(db)]) == 0
        assert main(["gen-query", "--db-header", str(db), "--demand", "1,2", "--side", "3",
                     "--seed", "42", "--out", str(qf)]) == 0
        server = subprocess.Popen([sys.executable, "-m", "ipir", "serve", "--db", str(db), "--port", "0"],
                                  stdout=subprocess.PIPE, text=True, env=env)
        try:
            host, port = server.stdout.readline().split("\t")[1].strip().rsplit(":", 1)
            assert main(["fetch", "--query", str(qf), "--host", host, "--port", port, "--out", str(af)]) == 0
        finally:
            server.terminate()
            server.wait(timeout=5)
        assert main(["recover", "--query", str(qf), "--answer", str(af), "--demand", "1,2",
                     "--side", "3", "--side-data", str(db), "--out", str(out)]) == 0
    capsys.readouterr()
    db_lines = db.read_text().splitlines(keepends=True)
    assert out.read_bytes() == "".join(db_lines[1:3]).encode()
    assert t.elapsed < 5.0
