"""Length-prefixed TCP transport: one query in, one answer out, per connection.

Frame: 4-byte big-endian payload length, then the UTF-8 payload. The server
replies with an AnswerFile payload, or with a payload starting ``ERR `` on
any failure, and then closes the connection.
"""

from __future__ import annotations

import logging
import socket
import socketserver
import struct
import threading

from .protocol import MessageDb, Query, compute_answer
from .wire import parse_answer, parse_query, serialize_answer, serialize_query

logger = logging.getLogger(__name__)

HEADER = struct.Struct(">I")
MAX_FRAME = 64 * 1024 * 1024


class FrameError(IOError):
    pass


class RemoteError(RuntimeError):
    """The server answered with an error frame."""


def _recv_exact(sock: socket.socket, n: int) -> bytes:
    buf = bytearray()
    while len(buf) < n:
        chunk = sock.recv(n - len(buf))
        if not chunk:
            raise FrameError(f"connection closed after {len(buf)} of {n} bytes")
        buf.extend(chunk)
    return bytes(buf)


def send_frame(sock: socket.socket, payload: bytes) -> None:
    sock.sendall(HEADER.pack(len(payload)) + payload)


def recv_frame(sock: socket.socket, limit: int = MAX_FRAME) -> bytes:
    (length,) = HEADER.unpack(_recv_exact(sock, HEADER.size))
    if length > limit:
        raise FrameError(f"frame of {length} bytes exceeds limit of {limit}")
    return _recv_exact(sock, length)


def handle_payload(payload: bytes, db: MessageDb) -> bytes:
    """Pure request handler: QueryFile bytes in, AnswerFile (or ERR) bytes out."""
    try:
        qy = parse_query(payload.decode("utf-8"))
        return serialize_answer(compute_answer(qy, db)).encode("utf-8")
    except (ValueError, UnicodeDecodeError) as e:
        return f"ERR {e}".encode("utf-8")


class _Handler(socketserver.BaseRequestHandler):
    def handle(self):
        try:
            payload = recv_frame(self.request)
        except FrameError as e:
            # Only frame-level facts are logged; never query contents.
            logger.info("rejected frame: %s", e)
            reply = f"ERR {e}".encode("utf-8")
        else:
            reply = handle_payload(payload, self.server.db)
        try:
            send_frame(self.request, reply)
        except OSError:
            pass


class AnswerServer(socketserver.ThreadingTCPServer):
    daemon_threads = True
    allow_reuse_address = True

    def __init__(self, addr: tuple[str, int], db: MessageDb):
        self.db = db
        super().__init__(addr, _Handler)

    @property
    def address(self) -> tuple[str, int]:
        return self.server_address[:2]


def serve(addr: tuple[str, int], db: MessageDb, background: bool = False) -> AnswerServer:
    """Start answering queries against ``db``.

    With ``background=True`` the server runs in a daemon thread and is
    returned immediately; call ``shutdown()`` and ``server_close()`` to stop.
    """
    server = AnswerServer(addr, db)
    if background:
        threading.Thread(target=server.serve_forever, daemon=True).start()
    else:
        try:
            server.serve_forever()
        finally:
            server.server_close()
    return server


def fetch_bytes(addr: tuple[str, int], payload: bytes, timeout: float = 30.0) -> bytes:
    with socket.create_connection(addr, timeout=timeout) as sock:
        send_frame(sock, payload)
        return recv_frame(sock)


def fetch_text(addr: tuple[str, int], query_text: str, timeout: float = 30.0) -> str:
    reply = fetch_bytes(addr, query_text.encode("utf-8"), timeout).decode("utf-8")
    if reply.startswith("ERR "):
        raise RemoteError(reply[4:])
    return reply


def fetch(addr: tuple[str, int], query: Query, timeout: float = 30.0):
    return parse_answer(fetch_text(addr, serialize_query(query), timeout))
