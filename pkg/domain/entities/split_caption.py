from dataclasses import dataclass
from typing import List, Optional, Tuple

from domain.entities.caption_graph import CaptionParseGraph
from domain.value_objects.primitive_kind import PrimitiveKind
from domain.value_objects.primitive_sets import AttributePair, RelationTriple

SENTENCE_SEPARATOR = ". "


@dataclass(frozen=True)
class RerankedSets:
    objects: Tuple[str, ...]
    relations: Tuple[RelationTriple, ...]
    attributes: Tuple[AttributePair, ...]
    rank_keys: Tuple[Tuple[int, int], ...]
    # permutation[new_index] == original index
    permutation: Tuple[int, ...] = ()

    def is_empty(self) -> bool:
        return not self.objects and not self.relations and not self.attributes


@dataclass(frozen=True)
class SimplifiedSentence:
    kind: PrimitiveKind
    text: str
    refs: Tuple[int, ...] = ()

    def to_dict(self) -> dict:
        return {"kind": self.kind.name, "text": self.text}


@dataclass(frozen=True)
class SplitTextCaption:
    sentences: Tuple[SimplifiedSentence, ...] = ()
    source: Optional[CaptionParseGraph] = None

    def __post_init__(self):
        object.__setattr__(self, "sentences", tuple(self.sentences))
        ranks = [s.kind.rank for s in self.sentences]
        if ranks != sorted(ranks):
            raise ValueError(
                "Split-text sentences must follow object-relation-attribute order"
            )

    def __len__(self) -> int:
        return len(self.sentences)

    def of_kind(self, kind: PrimitiveKind) -> List[SimplifiedSentence]:
        return [s for s in self.sentences if s.kind == kind]

    def kinds(self) -> List[PrimitiveKind]:
        return [s.kind for s in self.sentences]

    def plain_text(self) -> str:
        return SENTENCE_SEPARATOR.join(s.text for s in self.sentences)

    def sentence_spans(self) -> List[Tuple[int, int]]:
        """Character span of every sentence inside plain_text()"""
        spans = []
        cursor = 0
        for sentence in self.sentences:
            spans.append((cursor, cursor + len(sentence.text)))
            cursor += len(sentence.text) + len(SENTENCE_SEPARATOR)
        return spans

    def to_dict(self) -> dict:
        return {"sentences": [s.to_dict() for s in self.sentences]}
