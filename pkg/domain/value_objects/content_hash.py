import hashlib
import json
import re
from dataclasses import dataclass
from typing import Any

from domain.exceptions.base_exceptions import SplitDitError


@dataclass(frozen=True)
class ContentHash:
    """Lowercase hex digest identifying cache entries and run artifacts"""

    algorithm: str
    value: str

    def __post_init__(self):
        self._validate()

    def _validate(self):
        if self.algorithm not in ("sha256", "blake2b"):
            raise SplitDitError("Algorithm must be 'sha256' or 'blake2b'")

        if not self.value or not self.value.strip():
            raise SplitDitError("Hash value is required")

        expected = 64 if self.algorithm == "sha256" else 128
        if len(self.value) != expected:
            raise SplitDitError(
                f"{self.algorithm} digest must have {expected} characters"
            )

        if not re.match(r"^[a-f0-9]+$", self.value):
            raise SplitDitError("Digest must be lowercase hexadecimal")

    @classmethod
    def from_bytes(cls, payload: bytes, algorithm: str = "sha256") -> "ContentHash":
        if algorithm == "sha256":
            return cls(algorithm, hashlib.sha256(payload).hexdigest())
        if algorithm == "blake2b":
            return cls(algorithm, hashlib.blake2b(payload).hexdigest())
        raise SplitDitError(f"Unsupported algorithm: {algorithm}")

    @classmethod
    def from_parts(cls, *parts: Any) -> "ContentHash":
        """Hash a tuple of JSON-serializable parts in canonical form"""
        canonical = json.dumps(
            list(parts), sort_keys=True, separators=(",", ":"), ensure_ascii=False
        )
        return cls.from_bytes(canonical.encode("utf-8"))

    def __str__(self) -> str:
        return self.value
