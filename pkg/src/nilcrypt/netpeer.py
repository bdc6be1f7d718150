"""Two-party wire protocol: parameter agreement, key exchange, ciphertext transfer.

Every message is a frame ``kind (1 byte) | length (u32 big-endian) | payload``.
A session runs HELLO (initiator sends, responder echoes), PUBKEY both ways,
then CIPHERTEXT frames.  Any violation is answered with one ERROR frame
carrying a UTF-8 reason, after which the connection is closed.
"""

import enum
import logging
import socket
import struct
import threading
from dataclasses import dataclass

from . import formats
from .codec import decrypt_message, encrypt_message
from .errors import (
    CorruptCiphertext,
    DegenerateKey,
    FrameError,
    HandshakeRejected,
    NilcryptError,
    OversizedFrame,
    PeerConnectionError,
    TruncatedFrame,
    UnknownKind,
)
from .keyschedule import build_shared_key
from .modarith import dh_public, dh_shared

log = logging.getLogger(__name__)

DEFAULT_PORT = 4377
MAX_PAYLOAD = 2**24
PROTOCOL_VERSION = 1

FRAME_HEADER = struct.Struct(">BI")
HELLO = struct.Struct(">BIQQQId")
PUBKEY = struct.Struct(">Q")


class Kind(enum.IntEnum):
    HELLO = 0x01
    PUBKEY = 0x02
    CIPHERTEXT = 0x03
    ERROR = 0x7F


class Role(enum.Enum):
    INITIATOR = "initiator"
    RESPONDER = "responder"


@dataclass(frozen=True)
class Frame:
    kind: Kind
    payload: bytes = b""

    def __post_init__(self):
        object.__setattr__(self, "kind", _kind(self.kind))
        object.__setattr__(self, "payload", bytes(self.payload))
        if len(self.payload) > MAX_PAYLOAD:
            raise OversizedFrame(f"payload of {len(self.payload)} bytes exceeds {MAX_PAYLOAD}")


def _kind(value):
    try:
        return Kind(value)
    except ValueError:
        raise UnknownKind(f"unknown frame kind 0x{int(value):02x}") from None


def frame_encode(frame):
    return FRAME_HEADER.pack(frame.kind, len(frame.payload)) + frame.payload


def _parse_header(header):
    kind, length = FRAME_HEADER.unpack(header)
    if length > MAX_PAYLOAD:
        raise OversizedFrame(f"frame claims {length} bytes, cap is {MAX_PAYLOAD}")
    return _kind(kind), length


def frame_decode(data):
    """Decode exactly one frame from ``data``."""
    data = bytes(data)
    if len(data) < FRAME_HEADER.size:
        raise TruncatedFrame(f"{len(data)} bytes is shorter than a frame header")
    kind, length = _parse_header(data[:FRAME_HEADER.size])
    body = data[FRAME_HEADER.size:]
    if len(body) < length:
        raise TruncatedFrame(f"frame promises {length} payload bytes, got {len(body)}")
    if len(body) > length:
        raise FrameError(f"{len(body) - length} trailing bytes after frame")
    return Frame(kind, body)


# -- transport ---------------------------------------------------------------

def _recv_exact(sock, count, *, started=False):
    chunks = []
    remaining = count
    while remaining:
        try:
            chunk = sock.recv(min(remaining, 65536))
        except OSError as exc:
            raise PeerConnectionError(f"receive failed: {exc}") from exc
        if not chunk:
            if started or chunks:
                raise TruncatedFrame("connection closed mid-frame")
            raise PeerConnectionError("connection closed by peer")
        chunks.append(chunk)
        remaining -= len(chunk)
    return b"".join(chunks)


def send_frame(sock, frame):
    try:
        sock.sendall(frame_encode(frame))
    except OSError as exc:
        raise PeerConnectionError(f"send failed: {exc}") from exc


def recv_frame(sock):
    kind, length = _parse_header(_recv_exact(sock, FRAME_HEADER.size))
    return Frame(kind, _recv_exact(sock, length, started=True))


def _abort(sock, reason):
    """Best-effort ERROR frame, then close."""
    try:
        send_frame(sock, Frame(Kind.ERROR, reason.encode("utf-8", "replace")[:1024]))
    except NilcryptError:
        pass
    try:
        sock.close()
    except OSError:
        pass


def _expect(frame, kind):
    if frame.kind == Kind.ERROR:
        reason = frame.payload.decode("utf-8", "replace")
        exc = HandshakeRejected(f"peer reported: {reason}")
        exc.from_peer = True
        raise exc
    if frame.kind != kind:
        raise HandshakeRejected(f"expected {kind.name}, got {frame.kind.name}")
    return frame.payload


# -- handshake ---------------------------------------------------------------

def hello_payload(params):
    return HELLO.pack(
        PROTOCOL_VERSION, params.n, params.p, params.dh.x,
        params.base_a, params.offset, params.epsilon,
    )


def run_handshake(role, sock, params, secret):
    """Agree on parameters, exchange public values, return the shared key.

    On failure the connection is closed (after an ERROR frame where we are
    the side detecting the violation) and the error is re-raised.
    """
    role = Role(role)
    ours = hello_payload(params)
    try:
        if role is Role.INITIATOR:
            send_frame(sock, Frame(Kind.HELLO, ours))
            if _expect(recv_frame(sock), Kind.HELLO) != ours:
                raise HandshakeRejected("responder echoed different parameters")
        else:
            if _expect(recv_frame(sock), Kind.HELLO) != ours:
                raise HandshakeRejected("parameter mismatch")
            send_frame(sock, Frame(Kind.HELLO, ours))

        send_frame(sock, Frame(Kind.PUBKEY, PUBKEY.pack(dh_public(params.dh, secret))))
        payload = _expect(recv_frame(sock), Kind.PUBKEY)
        if len(payload) != PUBKEY.size:
            raise HandshakeRejected(f"PUBKEY payload is {len(payload)} bytes, expected {PUBKEY.size}")
        (other,) = PUBKEY.unpack(payload)
        if not 1 <= other < params.p:
            raise HandshakeRejected(f"peer public value {other} outside [1, p)")
        return build_shared_key(dh_shared(params.dh, secret, other), params)
    except HandshakeRejected as exc:
        if getattr(exc, "from_peer", False):
            sock.close()
        else:
            _abort(sock, str(exc))
        raise
    except (DegenerateKey, FrameError, PeerConnectionError) as exc:
        _abort(sock, f"{type(exc).__name__}: {exc}")
        raise


def send_ciphertext(ct, sock):
    send_frame(sock, Frame(Kind.CIPHERTEXT, formats.encode_ciphertext(ct)))


def recv_ciphertext(sock):
    frame = recv_frame(sock)
    if frame.kind == Kind.ERROR:
        raise PeerConnectionError("peer reported: " + frame.payload.decode("utf-8", "replace"))
    if frame.kind != Kind.CIPHERTEXT:
        raise CorruptCiphertext(f"expected CIPHERTEXT frame, got {frame.kind.name}")
    return formats.decode_ciphertext(frame.payload)


# -- sessions ----------------------------------------------------------------

def initiator_session(sock, params, secret, msg):
    """Handshake, then send ``msg`` encrypted.  Returns the shared key."""
    key = run_handshake(Role.INITIATOR, sock, params, secret)
    send_ciphertext(encrypt_message(msg, key), sock)
    return key


def responder_session(sock, params, secret):
    """Handshake, then receive and decrypt one ciphertext.  Returns (key, message)."""
    key = run_handshake(Role.RESPONDER, sock, params, secret)
    try:
        msg = decrypt_message(recv_ciphertext(sock), key)
    except NilcryptError as exc:
        _abort(sock, f"{type(exc).__name__}: {exc}")
        raise
    return key, msg


def open_listener(host="", port=DEFAULT_PORT):
    if socket.has_dualstack_ipv6() and host in ("", "::"):
        return socket.create_server(("", port), family=socket.AF_INET6, dualstack_ipv6=True)
    return socket.create_server((host, port))


def connect(host, port, timeout=30.0):
    try:
        sock = socket.create_connection((host, port), timeout=timeout)
    except OSError as exc:
        raise PeerConnectionError(f"cannot connect to {host}:{port}: {exc}") from exc
    return sock


def serve(listener, params, secret, on_message, sessions=1, timeout=30.0):
    """Accept ``sessions`` connections, each handled on its own thread.

    ``on_message(key, msg)`` is called for every successfully decrypted
    message; failures are collected and returned.
    """
    errors = []
    lock = threading.Lock()

    def handle(conn):
        conn.settimeout(timeout)
        try:
            with conn:
                key, msg = responder_session(conn, params, secret)
            with lock:
                on_message(key, msg)
        except NilcryptError as exc:
            log.warning("session failed: %s", exc)
            with lock:
                errors.append(exc)

    threads = []
    for _ in range(sessions):
        conn, addr = listener.accept()
        log.info("connection from %s", addr)
        t = threading.Thread(target=handle, args=(conn,), daemon=True)
        t.start()
        threads.append(t)
    for t in threads:
        t.join()
    return errors
