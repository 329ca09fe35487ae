from dataclasses import dataclass
from typing import Dict, Optional

from domain.value_objects.primitive_kind import PrimitiveKind
from domain.value_objects.token_sequence import TokenSequence


@dataclass(frozen=True)
class PrimitiveGroups:
    """Encoded primitive sentences per kind; a kind with no sentences is None"""

    obj: Optional[TokenSequence] = None
    rel: Optional[TokenSequence] = None
    attr: Optional[TokenSequence] = None

    def get(self, kind: PrimitiveKind) -> Optional[TokenSequence]:
        return getattr(self, kind.group_key)

    def as_dict(self) -> Dict[PrimitiveKind, TokenSequence]:
        return {kind: self.get(kind) for kind in PrimitiveKind if self.get(kind) is not None}

    @property
    def is_empty(self) -> bool:
        return not self.as_dict()

    @classmethod
    def none(cls) -> "PrimitiveGroups":
        return cls()
