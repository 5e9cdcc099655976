"""Running Alice and Bob as separate endpoints over TCP.

Amplitudes travel as float64 frames (see :mod:`qxor.wire`): this simulates
quantum communication, it does not implement it. Qubits are accounted by
each frame's declared qubit count, not by its byte size.

Bob listens, Alice connects. A connection opens with a HELLO exchange that
checks the roles and the seed, then carries any number of protocol runs;
Bob serves until Alice closes the connection.
"""
from __future__ import annotations

import logging
import socket
import threading

import numpy as np

from .boolean_core import BooleanFunction, RealFunction
from .fourier import SupportSet
from .protocol import Alice, Bob, ProtocolConfig, ProtocolError, Transcript, check_inputs
from .wire import PREFIX, MessageType, Role, WireError, WireMessage, deserialize, frame_length, serialize

log = logging.getLogger(__name__)


class HandshakeError(ProtocolError):
    pass


def recv_exactly(sock: socket.socket, count: int) -> bytes:
    chunks, got = [], 0
    while got < count:
        chunk = sock.recv(count - got)
        if not chunk:
            raise ConnectionError(f"connection closed with {count - got} bytes outstanding")
        chunks.append(chunk)
        got += len(chunk)
    return b"".join(chunks)


def read_message(sock: socket.socket) -> WireMessage | None:
    """Next frame, or ``None`` on a clean close between frames."""
    first = sock.recv(PREFIX)
    if not first:
        return None
    prefix = first + recv_exactly(sock, PREFIX - len(first)) if len(first) < PREFIX else first
    body = recv_exactly(sock, frame_length(prefix))
    return deserialize(prefix + body)


def write_message(sock: socket.socket, msg: WireMessage) -> None:
    sock.sendall(serialize(msg))


class SocketLink:
    """Alice's end of a TCP connection, with a qubit ledger."""

    def __init__(self, sock: socket.socket):
        self.sock = sock
        self.qubits_sent = 0
        self.qubits_received = 0

    def handshake(self, seed: int) -> None:
        write_message(self.sock, WireMessage.hello(Role.ALICE, seed))
        reply = read_message(self.sock)
        if reply is None or reply.type != MessageType.HELLO:
            raise HandshakeError("peer did not answer the handshake")
        role, peer_seed = reply.hello_value()
        if role != Role.BOB:
            raise HandshakeError(f"peer announced role {role.name}, expected BOB")
        if peer_seed != seed & (2**64 - 1):
            raise HandshakeError(f"seed mismatch: {peer_seed} != {seed}")

    def request(self, msg: WireMessage) -> WireMessage:
        self.send(msg)
        try:
            reply = read_message(self.sock)
        except (ConnectionError, OSError) as exc:
            raise ProtocolError(f"connection lost in round {msg.round}: {exc}") from exc
        if reply is None:
            raise ProtocolError(f"connection lost in round {msg.round}: peer closed")
        if reply.type == MessageType.REGISTER_STATE:
            self.qubits_received += reply.qubit_count
        return reply

    def send(self, msg: WireMessage) -> None:
        try:
            write_message(self.sock, msg)
        except OSError as exc:
            raise ProtocolError(f"connection lost in round {msg.round}: {exc}") from exc
        if msg.type == MessageType.REGISTER_STATE:
            self.qubits_sent += msg.qubit_count

    @property
    def ledger_qubits(self) -> int:
        return self.qubits_sent + self.qubits_received


class BobEndpoint:
    """Bob's server. Constructed from public data and ``y`` only."""

    def __init__(self, support: SupportSet, y: int, seed: int, n: int | None = None,
                 host: str = "127.0.0.1", port: int = 0):
        self.bob = Bob(support, y, n)
        self.seed = seed
        self.listener = socket.create_server((host, port))
        self.qubits_received = 0
        self.error: BaseException | None = None

    @property
    def address(self) -> tuple[str, int]:
        return self.listener.getsockname()[:2]

    def serve_one(self) -> None:
        """Accept one connection and answer frames until it closes."""
        try:
            conn, _ = self.listener.accept()
            with conn:
                hello = read_message(conn)
                if hello is None or hello.type != MessageType.HELLO:
                    raise HandshakeError("connection did not open with HELLO")
                role, seed = hello.hello_value()
                # answer before validating so Alice sees the mismatch too
                write_message(conn, WireMessage.hello(Role.BOB, self.seed))
                if role != Role.ALICE:
                    raise HandshakeError(f"peer announced role {role.name}, expected ALICE")
                if seed != self.seed & (2**64 - 1):
                    raise HandshakeError(f"seed mismatch: {seed} != {self.seed}")
                while True:
                    msg = read_message(conn)
                    if msg is None:
                        return
                    if msg.type == MessageType.REGISTER_STATE:
                        self.qubits_received += msg.qubit_count
                    reply = self.bob.handle(msg)
                    if reply is not None:
                        write_message(conn, reply)
        except BaseException as exc:     # reported to the caller via .error
            self.error = exc
            log.debug("bob endpoint stopped: %s", exc)
        finally:
            self.listener.close()

    def start(self) -> threading.Thread:
        th = threading.Thread(target=self.serve_one, name="bob", daemon=True)
        th.start()
        return th


def connect_alice(host: str, port: int, seed: int, timeout: float = 30.0) -> SocketLink:
    sock = socket.create_connection((host, port), timeout=timeout)
    link = SocketLink(sock)
    link.handshake(seed)
    return link


def run_networked(f: BooleanFunction, g: RealFunction, x: int, y: int, cfg: ProtocolConfig,
                  rng: np.random.Generator, host: str = "127.0.0.1") -> tuple[int, Transcript, int]:
    """One run with Bob in his own thread behind a loopback socket.

    Returns ``(answer, transcript, ledger_qubits)``.
    """
    support = check_inputs(f, g, cfg)
    bob = BobEndpoint(support, y, cfg.seed, f.n, host=host)
    th = bob.start()
    link = connect_alice(*bob.address, seed=cfg.seed)
    try:
        answer, tr = Alice(f, g, x, cfg, rng, support).run(link)
    finally:
        link.sock.close()
        th.join(timeout=30)
    if bob.error is not None:
        raise ProtocolError(f"Bob failed: {bob.error}") from bob.error
    if bob.qubits_received != link.qubits_sent:
        raise WireError("Bob's ledger disagrees with Alice's")
    return answer, tr, link.ledger_qubits
