"""
Binary tensor files: one line of compact JSON header, then a row-major
little-endian float32 payload.
"""
from typing import Dict, Tuple

import numpy as np

from domain.exceptions.graph_exceptions import SchemaError
from domain.value_objects.token_sequence import TokenSequence
from infrastructure.serialization.errors import dump_json, validate_document
from infrastructure.serialization.schemas import CheckpointHeaderSchema, TensorHeaderSchema

FLOAT32_LE = np.dtype("<f4")
CHECKPOINT_FORMAT = "split-dit-checkpoint"


def _split_header(payload: bytes) -> Tuple[bytes, bytes]:
    newline = payload.find(b"\n")
    if newline < 0:
        raise SchemaError("$", "missing header line")
    return payload[:newline], payload[newline + 1 :]


def encode_tseq(sequence: TokenSequence) -> bytes:
    header = dump_json({"shape": [sequence.length, sequence.dim], "dtype": "f32"})
    return header + b"\n" + sequence.tokens.astype(FLOAT32_LE).tobytes(order="C")


def decode_tseq(payload: bytes) -> TokenSequence:
    header_bytes, body = _split_header(payload)
    header = validate_document(TensorHeaderSchema, header_bytes)
    rows, cols = header.shape
    expected = rows * cols * FLOAT32_LE.itemsize
    if len(body) != expected:
        raise SchemaError("payload", f"expected {expected} bytes, got {len(body)}")
    tokens = np.frombuffer(body, dtype=FLOAT32_LE).reshape(rows, cols).astype(np.float64)
    return TokenSequence(tokens, provenance="tseq")


def encode_checkpoint(state: Dict[str, np.ndarray], config_hash: str) -> bytes:
    names = sorted(state)
    header = dump_json(
        {
            "format": CHECKPOINT_FORMAT,
            "dtype": "f32",
            "config_hash": config_hash,
            "tensors": [[name, list(np.shape(state[name]))] for name in names],
        }
    )
    body = b"".join(
        np.ascontiguousarray(state[name], dtype=FLOAT32_LE).tobytes() for name in names
    )
    return header + b"\n" + body


def decode_checkpoint(payload: bytes) -> Tuple[Dict[str, np.ndarray], str]:
    header_bytes, body = _split_header(payload)
    header = validate_document(CheckpointHeaderSchema, header_bytes)
    state: Dict[str, np.ndarray] = {}
    cursor = 0
    for k, entry in enumerate(header.tensors):
        if len(entry) != 2 or not isinstance(entry[0], str):
            raise SchemaError(f"tensors[{k}]", "expected [name, shape]")
        name, shape = entry
        count = int(np.prod(shape)) if shape else 1
        size = count * FLOAT32_LE.itemsize
        chunk = body[cursor : cursor + size]
        if len(chunk) != size:
            raise SchemaError(f"tensors[{k}]", "payload truncated")
        state[name] = np.frombuffer(chunk, dtype=FLOAT32_LE).reshape(shape).copy()
        cursor += size
    if cursor != len(body):
        raise SchemaError("payload", "trailing bytes after last tensor")
    return state, header.config_hash
