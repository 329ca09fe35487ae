import json
from typing import Any, Callable, Sequence, TypeVar

from pydantic import BaseModel, ValidationError

from domain.exceptions.graph_exceptions import SchemaError

Model = TypeVar("Model", bound=BaseModel)


def field_path(loc: Sequence[Any]) -> str:
    """("edges", 0, "relation") -> "edges[0].relation" """
    path = ""
    for part in loc:
        if isinstance(part, int):
            path += f"[{part}]"
        else:
            path += f".{part}" if path else str(part)
    return path or "$"


def validate_document(schema: Callable[..., Model], payload: bytes) -> Model:
    try:
        data = json.loads(payload.decode("utf-8") if isinstance(payload, bytes) else payload)
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise SchemaError("$", f"malformed JSON: {e}")
    try:
        return schema.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        raise SchemaError(field_path(first["loc"]), first["msg"])


def dump_json(data: Any) -> bytes:
    return json.dumps(data, ensure_ascii=False, separators=(",", ":")).encode("utf-8")
