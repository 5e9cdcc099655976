"""Binary framing for messages between Alice and Bob.

Frame layout (all little-endian)::

    u32  length of everything after this field (5 + payload bytes)
    u8   message type
    u16  round index k
    u16  qubit count (1 + m_k for REGISTER_STATE, else 0)
    ...  payload

REGISTER_STATE payloads are ``2**(1 + m_k)`` float64 amplitudes ordered by
``(c, codeword)``. DEGREE_ANNOUNCE carries the degree as one u16. HELLO
carries the sender's role byte and its u64 seed. TERMINATE is empty.
"""
from __future__ import annotations

import enum
import struct
from dataclasses import dataclass

import numpy as np

HEADER = struct.Struct("<IBHH")
PREFIX = 4
NORM_TOL = 1e-9
MAX_FRAME = 1 << 28


class WireError(ValueError):
    pass


class MessageType(enum.IntEnum):
    REGISTER_STATE = 1
    DEGREE_ANNOUNCE = 2
    TERMINATE = 3
    HELLO = 4


class Role(enum.IntEnum):
    ALICE = 0
    BOB = 1


@dataclass(frozen=True, eq=False)
class WireMessage:
    type: MessageType
    round: int = 0
    qubit_count: int = 0
    payload: bytes = b""

    @classmethod
    def register_state(cls, k: int, block: np.ndarray) -> "WireMessage":
        block = np.asarray(block, dtype="<f8")
        width = block.size.bit_length() - 2          # block holds 2**(1 + m) amplitudes
        if block.size != 2 << width:
            raise WireError(f"register block of size {block.size} is not 2**(1+m)")
        return cls(MessageType.REGISTER_STATE, k, 1 + width, block.tobytes())

    @classmethod
    def degree(cls, k: int, degree: int) -> "WireMessage":
        return cls(MessageType.DEGREE_ANNOUNCE, k, 0, struct.pack("<H", degree))

    @classmethod
    def terminate(cls, k: int = 0) -> "WireMessage":
        return cls(MessageType.TERMINATE, k, 0, b"")

    @classmethod
    def hello(cls, role: Role, seed: int) -> "WireMessage":
        return cls(MessageType.HELLO, 0, 0, struct.pack("<BQ", int(role), seed & (2**64 - 1)))

    def amplitudes(self) -> np.ndarray:
        """REGISTER_STATE payload as a (2, 2**m) array."""
        amps = np.frombuffer(self.payload, dtype="<f8").astype(np.float64)
        return amps.reshape(2, -1)

    def degree_value(self) -> int:
        return struct.unpack("<H", self.payload)[0]

    def hello_value(self) -> tuple[Role, int]:
        role, seed = struct.unpack("<BQ", self.payload)
        return Role(role), seed

    def __eq__(self, other):
        return (isinstance(other, WireMessage) and self.type == other.type
                and self.round == other.round and self.qubit_count == other.qubit_count
                and self.payload == other.payload)


def _validate(msg: WireMessage) -> None:
    if msg.type == MessageType.REGISTER_STATE:
        if msg.qubit_count < 1:
            raise WireError("REGISTER_STATE needs at least the C qubit")
        if len(msg.payload) != 8 << msg.qubit_count:
            raise WireError(
                f"payload of {len(msg.payload)} bytes does not match {msg.qubit_count} qubits")
        amps = np.frombuffer(msg.payload, dtype="<f8")
        if not np.all(np.isfinite(amps)):
            raise WireError("non-finite amplitude in payload")
        norm = float(amps @ amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise WireError(f"register state norm {norm!r} is not 1")
    elif msg.type == MessageType.DEGREE_ANNOUNCE:
        if len(msg.payload) != 2:
            raise WireError("DEGREE_ANNOUNCE payload must be 2 bytes")
    elif msg.type == MessageType.TERMINATE:
        if msg.payload:
            raise WireError("TERMINATE carries no payload")
    elif msg.type == MessageType.HELLO:
        if len(msg.payload) != 9:
            raise WireError("HELLO payload must be 9 bytes")


def serialize(msg: WireMessage) -> bytes:
    _validate(msg)
    body_len = HEADER.size - PREFIX + len(msg.payload)
    return HEADER.pack(body_len, int(msg.type), msg.round, msg.qubit_count) + msg.payload


def frame_length(prefix: bytes) -> int:
    """Bytes still to read after the 4-byte length prefix."""
    if len(prefix) != PREFIX:
        raise WireError("truncated frame: incomplete length prefix")
    (length,) = struct.unpack("<I", prefix)
    if length < HEADER.size - PREFIX or length > MAX_FRAME:
        raise WireError(f"bad frame length {length}")
    return length


def deserialize(data: bytes) -> WireMessage:
    if len(data) < HEADER.size:
        raise WireError("truncated frame: shorter than the header")
    length, mtype, k, qubits = HEADER.unpack_from(data)
    if len(data) != PREFIX + length:
        raise WireError(f"truncated frame: expected {PREFIX + length} bytes, got {len(data)}")
    try:
        mtype = MessageType(mtype)
    except ValueError:
        raise WireError(f"unknown message type {mtype}") from None
    msg = WireMessage(mtype, k, qubits, bytes(data[HEADER.size:]))
    _validate(msg)
    return msg
