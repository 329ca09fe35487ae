from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from domain.exceptions.encoding_exceptions import EncodingError


@dataclass(frozen=True)
class EncoderSpec:
    name: str
    dim: int
    max_len: int = 77
    seed: int = 0

    def __post_init__(self):
        if self.dim < 1:
            raise EncodingError(f"Encoder {self.name} needs dim >= 1", {"dim": self.dim})
        if self.max_len < 1:
            raise EncodingError(
                f"Encoder {self.name} needs max_len >= 1", {"max_len": self.max_len}
            )


@dataclass(frozen=True, eq=False)
class TokenSequence:
    """L x dim token matrix produced by an encoder or by assembling several"""

    tokens: np.ndarray
    provenance: str = ""
    max_len: Optional[int] = None
    offsets: tuple = field(default_factory=tuple)

    def __post_init__(self):
        tokens = np.asarray(self.tokens, dtype=np.float64)
        if tokens.ndim != 2:
            raise EncodingError(
                "Token sequence must be a 2-D matrix", {"shape": list(tokens.shape)}
            )
        if not np.all(np.isfinite(tokens)):
            raise EncodingError("Token sequence contains non-finite entries")
        if self.max_len is not None and tokens.shape[0] > self.max_len:
            raise EncodingError(
                "Token sequence longer than encoder limit",
                {"length": tokens.shape[0], "max_len": self.max_len},
            )
        tokens.setflags(write=False)
        object.__setattr__(self, "tokens", tokens)

    @property
    def length(self) -> int:
        return int(self.tokens.shape[0])

    @property
    def dim(self) -> int:
        return int(self.tokens.shape[1])

    @property
    def shape(self) -> tuple:
        return (self.length, self.dim)

    def padded_to(self, length: int) -> "TokenSequence":
        """Zero-pad (or truncate) along the length axis"""
        if length == self.length:
            return self
        out = np.zeros((length, self.dim), dtype=np.float64)
        keep = min(length, self.length)
        out[:keep] = self.tokens[:keep]
        return TokenSequence(out, provenance=self.provenance, offsets=self.offsets)

    def bit_equal(self, other: "TokenSequence") -> bool:
        return (
            self.tokens.shape == other.tokens.shape
            and self.tokens.tobytes() == other.tokens.tobytes()
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, TokenSequence):
            return False
        return self.bit_equal(other)

    def __hash__(self) -> int:
        return hash((self.tokens.shape, self.tokens.tobytes()))
