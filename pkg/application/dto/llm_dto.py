from dataclasses import dataclass
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, StrictInt, StrictStr

from domain.value_objects.content_hash import ContentHash
from domain.value_objects.primitive_sets import PrimitiveSets


@dataclass(frozen=True)
class LlmRequest:
    model: str
    system_prompt: str
    user_content: str
    temperature: float = 0.0

    def __post_init__(self):
        if not self.user_content or not self.user_content.strip():
            raise ValueError("user_content must be nonempty")
        if self.temperature < 0:
            raise ValueError("temperature must be non-negative")

    @property
    def cache_key(self) -> str:
        return ContentHash.from_parts(
            self.model, self.system_prompt, self.user_content
        ).value

    def to_messages(self) -> List[dict]:
        return [
            {"role": "system", "content": self.system_prompt},
            {"role": "user", "content": self.user_content},
        ]


@dataclass(frozen=True)
class LlmResponse:
    raw_text: str
    attempts: int
    parsed: Optional[PrimitiveSets] = None

    def with_parsed(self, parsed: PrimitiveSets) -> "LlmResponse":
        return LlmResponse(raw_text=self.raw_text, attempts=self.attempts, parsed=parsed)


@dataclass(frozen=True)
class NetPolicy:
    allow_network: bool = False
    max_retries: int = 2
    timeout_s: float = 30.0

    def __post_init__(self):
        if self.max_retries < 0:
            raise ValueError("max_retries must be non-negative")
        if self.timeout_s <= 0:
            raise ValueError("timeout_s must be positive")


class LlmObject(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: StrictStr = Field(min_length=1)
    attributes: List[StrictStr] = Field(default_factory=list)


class LlmRelation(BaseModel):
    model_config = ConfigDict(extra="forbid")

    subject: StrictInt
    predicate: StrictStr = Field(min_length=1)
    object: StrictInt


class LlmPrimitivesPayload(BaseModel):
    """JSON document the parsing prompt asks the model to emit"""

    model_config = ConfigDict(extra="forbid")

    objects: List[LlmObject]
    relations: List[LlmRelation] = Field(default_factory=list)
