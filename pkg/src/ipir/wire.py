"""Canonical text formats for databases, queries and answers.

All three formats are a header line followed by rows of single-space
separated decimal integers, every line newline-terminated. Parsing is
strict so that ``serialize(parse(text)) == text`` for every accepted input.
"""

from __future__ import annotations

from typing import Sequence

from .field import FieldError
from .mds import build_generator
from .protocol import Answer, MessageDb, Query, QueryError

DB_MAGIC = "IPIR-DB v1"
QUERY_MAGIC = "IPIR-Q v1"
ANSWER_MAGIC = "IPIR-A v1"


class WireFormatError(ValueError):
    def __init__(self, line: int, message: str, column: int | None = None):
        where = f"line {line}" if column is None else f"line {line}, column {column}"
        super().__init__(f"{where}: {message}")
        self.line = line
        self.column = column


def _lines(text: str) -> list[str]:
    if not text.endswith("\n"):
        raise WireFormatError(text.count("\n") + 1, "missing final newline")
    return text[:-1].split("\n")


def _ints(line: str, lineno: int, count: int | None = None, bound: int | None = None) -> list[int]:
    if line == "":
        if count == 0:
            return []
        raise WireFormatError(lineno, "empty line")
    fields = line.split(" ")
    out = []
    col = 1
    for f in fields:
        if not f.isdigit() or not f.isascii() or (len(f) > 1 and f[0] == "0"):
            raise WireFormatError(lineno, f"expected a canonical decimal integer, got {f!r}", col)
        v = int(f)
        if bound is not None and v >= bound:
            raise WireFormatError(lineno, f"symbol {v} is not below {bound}", col)
        out.append(v)
        col += len(f) + 1
    if count is not None and len(out) != count:
        raise WireFormatError(lineno, f"expected {count} values, got {len(out)}")
    return out


def _header(lines: list[str], magic: str, nfields: int) -> list[int]:
    if not lines or not lines[0].startswith(magic + " "):
        raise WireFormatError(1, f"expected header starting with {magic!r}")
    return _ints(lines[0][len(magic) + 1:], 1, nfields)


def _body(lines: list[str], expected: int) -> None:
    found = len(lines) - 1
    if found < expected:
        raise WireFormatError(found + 2, f"header announces {expected} body lines, found {found}")
    if found > expected:
        raise WireFormatError(expected + 2, f"header announces {expected} body lines, found {found}")


def _row(values: Sequence[int]) -> str:
    return " ".join(str(v) for v in values) + "\n"


# -- database ----------------------------------------------------------------

def parse_db(text: str) -> MessageDb:
    lines = _lines(text)
    K, n, q = _header(lines, DB_MAGIC, 3)
    _body(lines, K)
    rows = tuple(tuple(_ints(lines[i], i + 1, n, q)) for i in range(1, K + 1))
    try:
        return MessageDb(K, n, q, rows)
    except FieldError as e:
        raise WireFormatError(1, str(e)) from None


def parse_db_header(text: str) -> tuple[int, int, int]:
    first = text.split("\n", 1)[0]
    return tuple(_header([first], DB_MAGIC, 3))


def serialize_db(db: MessageDb) -> str:
    return f"{DB_MAGIC} {db.K} {db.n} {db.q}\n" + "".join(_row(r) for r in db.messages)


def serialize_rows(rows: Sequence[Sequence[int]]) -> str:
    """Bare message rows, formatted exactly like database body lines."""
    return "".join(_row(r) for r in rows)


def parse_rows(text: str, count: int, n: int | None, q: int) -> list[list[int]]:
    lines = _lines(text)
    if len(lines) != count:
        raise WireFormatError(min(len(lines), count) + 1, f"expected {count} rows, found {len(lines)}")
    return [_ints(line, i + 1, n, q) for i, line in enumerate(lines)]


# -- query -------------------------------------------------------------------

def parse_query(text: str) -> Query:
    lines = _lines(text)
    K, P, T, d, q = _header(lines, QUERY_MAGIC, 5)
    _body(lines, P + d)
    if P * T != K:
        raise WireFormatError(1, f"P*T = {P * T} does not equal K = {K}")
    groups = []
    for i in range(1, P + 1):
        g = _ints(lines[i], i + 1, T)
        if any(not 1 <= x <= K for x in g):
            raise WireFormatError(i + 1, f"index outside [1, {K}]")
        if any(a >= b for a, b in zip(g, g[1:])):
            raise WireFormatError(i + 1, "group indices must be strictly increasing")
        groups.append(tuple(g))
    try:
        gen = build_generator(T, d, q)
    except FieldError as e:
        raise WireFormatError(1, str(e)) from None
    for l, want in enumerate(gen.to_rows()):
        lineno = P + l + 2
        if _ints(lines[lineno - 1], lineno, T, q) != want:
            raise WireFormatError(lineno, "coefficient row differs from the public generator")
    try:
        return Query(K, tuple(groups), gen)
    except QueryError as e:
        raise WireFormatError(2, str(e)) from None


def serialize_query(qy: Query) -> str:
    head = f"{QUERY_MAGIC} {qy.K} {qy.P} {qy.T} {qy.d} {qy.q}\n"
    return head + "".join(_row(g) for g in qy.groups) + "".join(_row(v) for v in qy.generator.to_rows())


# -- answer ------------------------------------------------------------------

def parse_answer(text: str) -> Answer:
    lines = _lines(text)
    P, d, n, q = _header(lines, ANSWER_MAGIC, 4)
    _body(lines, P * d)
    coded = tuple(tuple(_ints(lines[i], i + 1, n, q)) for i in range(1, P * d + 1))
    try:
        return Answer(P, d, n, q, coded)
    except FieldError as e:
        raise WireFormatError(1, str(e)) from None


def serialize_answer(ans: Answer) -> str:
    return f"{ANSWER_MAGIC} {ans.P} {ans.d} {ans.n} {ans.q}\n" + "".join(_row(z) for z in ans.coded)
