"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 validation error, 3 audit failure.
Reports go to stdout as tab-separated ``key<TAB>value`` lines; commands
that take ``--figure`` also render a matplotlib figure to that path.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import capacity
from .audit import (AuditBudgetExceeded, PrivacyViolation, audit_exact, audit_montecarlo,
                    converse_audit, posterior_for_query)
from .field import FieldError
from .net import AnswerServer, RemoteError, fetch_text
from .protocol import (MessageDb, ParameterError, QueryError, compute_answer, derive_params,
                       download_cost, generate_query, recover)
from .rng import Xoshiro256
from .wire import (WireFormatError, parse_answer, parse_db, parse_db_header, parse_query,
                   parse_rows, serialize_answer, serialize_db, serialize_query, serialize_rows)

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_AUDIT_FAIL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _index_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated indices, got {text!r}") from None


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _fmt(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}" if v.denominator != 1 else str(v.numerator)
    if isinstance(v, bool):
        return "pass" if v else "fail"
    if isinstance(v, float):
        return f"{v:.6f}"
    return str(v)


def _report(rows) -> None:
    for row in rows:
        print("\t".join(_fmt(v) for v in row))


def _addr(args) -> tuple[str, int]:
    return (args.host, args.port)


# -- subcommands -------------------------------------------------------------

def cmd_gen_db(args) -> int:
    db = MessageDb.random(args.k, args.n, args.q, Xoshiro256(args.seed))
    _write(args.out, serialize_db(db))
    return EXIT_OK


def cmd_gen_query(args) -> int:
    if args.db_header:
        K, n, q = parse_db_header(_read(args.db_header))
        if args.k is not None and args.k != K:
            raise ParameterError(f"--k {args.k} disagrees with database header K={K}")
    else:
        if args.k is None:
            raise UsageError("one of --db-header or --k is required")
        K, n, q = args.k, args.n, args.q
        if q is None:
            raise UsageError("--q is required without --db-header")
    D = args.d if args.d is not None else len(args.demand)
    M = args.m if args.m is not None else len(args.side)
    p = derive_params(K, D, M, q, n)
    qy = generate_query(p, args.demand, args.side, Xoshiro256(args.seed))
    _write(args.out, serialize_query(qy))
    return EXIT_OK


def cmd_answer(args) -> int:
    db = parse_db(_read(args.db))
    qy = parse_query(_read(args.query))
    _write(args.out, serialize_answer(compute_answer(qy, db)))
    return EXIT_OK


def _side_rows(text: str, S: list[int], n: int, q: int) -> list[list[int]]:
    """Side information either as a full database file or as bare rows in sorted order."""
    if text.startswith("IPIR-DB "):
        db = parse_db(text)
        return [list(db.message(i)) for i in sorted(S)]
    return parse_rows(text, len(S), n, q)


def cmd_recover(args) -> int:
    qy = parse_query(_read(args.query))
    ans = parse_answer(_read(args.answer))
    p = derive_params(qy.K, len(args.demand), len(args.side), qy.q, ans.n)
    side = _side_rows(_read(args.side_data), args.side, ans.n, qy.q)
    demand = recover(p, qy, ans, args.demand, args.side, side)
    _write(args.out, serialize_rows(demand))
    return EXIT_OK


def cmd_serve(args) -> int:
    db = parse_db(_read(args.db))
    server = AnswerServer(_addr(args), db)
    host, port = server.address
    print(f"serving\t{host}:{port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return EXIT_OK


def cmd_fetch(args) -> int:
    text = _read(args.query)
    parse_query(text)
    _write(args.out, fetch_text(_addr(args), text))
    return EXIT_OK


def cmd_audit_privacy(args) -> int:
    p = derive_params(args.k, args.d, args.m, args.q, 1)
    if args.trials is not None:
        rep = audit_montecarlo(p, args.trials, args.tol, Xoshiro256(args.seed))
    else:
        rep = audit_exact(p)
    _report([
        ("mode", rep.mode),
        ("target", rep.target),
        ("queries", rep.queries_audited),
        ("worst_deviation", rep.worst_deviation),
        ("result", rep.passed),
    ])
    if args.figure:
        from .plotting import plot_posteriors
        plot_posteriors(rep.posteriors, rep.target, args.figure,
                        title=f"K={p.K}, D={p.D}, M={p.M} ({rep.mode})")
    return EXIT_OK if rep.passed else EXIT_AUDIT_FAIL


def cmd_audit_converse(args) -> int:
    qy = parse_query(_read(args.query))
    p = derive_params(qy.K, args.d, args.m, qy.q, 1)
    table = posterior_for_query(qy, p)
    try:
        rec = converse_audit(table, p, download_cost(p))
    except PrivacyViolation as e:
        print(f"audit not applicable: {e}", file=sys.stderr)
        return EXIT_AUDIT_FAIL
    _report([
        ("tuples", table.tuple_count),
        ("lhs", rec.lhs),
        ("bound", rec.bound),
        ("l_min", rec.l_min),
        ("L", rec.L),
        ("result", rec.passed),
    ])
    if args.figure:
        from .plotting import plot_marginals
        plot_marginals(table.alpha, table.beta, args.figure)
    return EXIT_OK if rec.passed else EXIT_AUDIT_FAIL


def cmd_capacity(args) -> int:
    s = capacity.capacity_summary(args.k, args.d, args.m)
    _report([
        ("bound", s["bound"]),
        ("achievable", s["achievable"]),
        ("prior", s["prior"]),
        ("conjecture", s["conjecture"], "conjecture"),
        ("known", s["known"]),
        ("l_min", capacity.min_download(args.k, args.d, args.m)),
    ])
    if args.figure:
        from .plotting import plot_capacity_sweep
        plot_capacity_sweep(args.d, args.m, max(args.k_max or 0, args.k), args.figure, mark_K=args.k)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="ipir", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen-db", help="random message database")
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--q", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen_db)

    g = sub.add_parser("gen-query", help="Group-and-Code query for a demand")
    g.add_argument("--db-header", help="take K, n, q from this database file")
    g.add_argument("--k", type=int)
    g.add_argument("--d", type=int, help="demand size D (defaults to len(--demand))")
    g.add_argument("--m", type=int, help="side-information size M (defaults to len(--side))")
    g.add_argument("--q", type=int)
    g.add_argument("--n", type=int, default=1)
    g.add_argument("--demand", type=_index_list, required=True)
    g.add_argument("--side", type=_index_list, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen_query)

    g = sub.add_parser("answer", help="server-side answer computation")
    g.add_argument("--db", required=True)
    g.add_argument("--query", required=True)
    g.add_argument("--out")
    g.set_defaults(func=cmd_answer)

    g = sub.add_parser("recover", help="decode the demand from an answer")
    g.add_argument("--query", required=True)
    g.add_argument("--answer", required=True)
    g.add_argument("--demand", type=_index_list, required=True)
    g.add_argument("--side", type=_index_list, required=True)
    g.add_argument("--side-data", required=True)
    g.add_argument("--out")
    g.set_defaults(func=cmd_recover)

    g = sub.add_parser("serve", help="answer queries over TCP")
    g.add_argument("--db", required=True)
    g.add_argument("--host", default="127.0.0.1")
    g.add_argument("--port", type=int, default=7070)
    g.set_defaults(func=cmd_serve)

    g = sub.add_parser("fetch", help="send a query to a server")
    g.add_argument("--query", required=True)
    g.add_argument("--host", default="127.0.0.1")
    g.add_argument("--port", type=int, default=7070)
    g.add_argument("--out")
    g.set_defaults(func=cmd_fetch)

    g = sub.add_parser("audit-privacy", help="check P(i in W | Q) = D/K")
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--d", type=int, required=True)
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--q", type=int, required=True)
    mode = g.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true")
    mode.add_argument("--trials", type=int)
    g.add_argument("--tol", type=float, default=0.02)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--figure")
    g.set_defaults(func=cmd_audit_privacy)

    g = sub.add_parser("audit-converse", help="evaluate the converse bound on a query")
    g.add_argument("--query", required=True)
    g.add_argument("--d", type=int, required=True)
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--figure")
    g.set_defaults(func=cmd_audit_converse)

    g = sub.add_parser("capacity", help="rate and capacity expressions")
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--d", type=int, required=True)
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--figure")
    g.add_argument("--k-max", type=int, help="sweep range for --figure (default 4K)")
    g.set_defaults(func=cmd_capacity)
    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "k_max", None) is None and args.command == "capacity":
            args.k_max = 4 * args.k
        return args.func(args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (WireFormatError, ParameterError, QueryError, FieldError, PrivacyViolation,
            AuditBudgetExceeded, RemoteError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
