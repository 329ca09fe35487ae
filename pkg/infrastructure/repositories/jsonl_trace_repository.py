import logging
from pathlib import Path
from typing import List, Union

import numpy as np

from domain.entities.denoise_trace import DenoiseTrace, StepRecord
from domain.exceptions.graph_exceptions import SchemaError
from domain.repositories.trace_repository import TraceRepository
from infrastructure.serialization.errors import dump_json, validate_document
from infrastructure.serialization.schemas import TraceLineSchema

logger = logging.getLogger(__name__)


def _flatten(maps: np.ndarray) -> list:
    layers, heads = maps.shape[:2]
    return maps.reshape(layers, heads, -1).tolist()


def encode_step(record: StepRecord) -> bytes:
    line = {
        "step": record.step,
        "sigma": record.sigma,
        "snr": record.snr,
        "attn": _flatten(record.attn),
        "shape": list(record.shape),
    }
    if record.inject_attn is not None:
        line["inject_attn"] = _flatten(record.inject_attn)
        line["inject_shape"] = list(record.inject_shape)
    return dump_json(line)


def _unflatten(maps: list, shape: list, path: str) -> np.ndarray:
    array = np.asarray(maps, dtype=np.float64)
    rows, cols = shape
    if array.ndim != 3 or array.shape[2] != rows * cols:
        raise SchemaError(path, f"expected layers x heads x {rows * cols} values")
    return array.reshape(array.shape[0], array.shape[1], rows, cols)


def decode_step(payload: bytes) -> StepRecord:
    line = validate_document(TraceLineSchema, payload)
    inject = None
    if line.inject_attn is not None:
        if line.inject_shape is None or len(line.inject_shape) != 2:
            raise SchemaError("inject_shape", "required with inject_attn")
        inject = _unflatten(line.inject_attn, line.inject_shape, "inject_attn")
    return StepRecord(
        step=line.step,
        sigma=float(line.sigma),
        snr=float(line.snr),
        attn=_unflatten(line.attn, line.shape, "attn"),
        inject_attn=inject,
    )


def encode_trace(trace: DenoiseTrace) -> bytes:
    return b"".join(encode_step(record) + b"\n" for record in trace.steps)


def decode_trace(sample_id: str, payload: bytes) -> DenoiseTrace:
    records = [decode_step(line) for line in payload.splitlines() if line.strip()]
    return DenoiseTrace(sample_id=sample_id, steps=records)


class JsonlTraceRepository(TraceRepository):
    """One `<sample_id>.jsonl` file per sample, one line per step"""

    def __init__(self, directory: Union[str, Path]):
        self.directory = Path(directory)

    def path_for(self, sample_id: str) -> Path:
        return self.directory / f"{sample_id}.jsonl"

    def save(self, trace: DenoiseTrace) -> Path:
        self.directory.mkdir(parents=True, exist_ok=True)
        path = self.path_for(trace.sample_id)
        path.write_bytes(encode_trace(trace))
        logger.debug(
            "Wrote trace", extra={"sample_id": trace.sample_id, "steps": trace.S}
        )
        return path

    def load(self, sample_id: str) -> DenoiseTrace:
        path = self.path_for(sample_id)
        try:
            return decode_trace(sample_id, path.read_bytes())
        except SchemaError as e:
            raise SchemaError(f"{path.name}:{e.path}", e.reason)

    def sample_ids(self) -> List[str]:
        if not self.directory.exists():
            return []
        return sorted(path.stem for path in self.directory.glob("*.jsonl"))

    def load_all(self) -> List[DenoiseTrace]:
        return [self.load(sample_id) for sample_id in self.sample_ids()]

    def clear(self) -> int:
        removed = 0
        for sample_id in self.sample_ids():
            self.path_for(sample_id).unlink()
            removed += 1
        if removed:
            logger.info(
                "Removed stale traces",
                extra={"directory": str(self.directory), "removed": removed},
            )
        return removed
