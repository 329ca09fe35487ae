from domain.entities.split_caption import SimplifiedSentence, SplitTextCaption
from domain.value_objects.primitive_kind import PrimitiveKind
from infrastructure.serialization.errors import dump_json, validate_document
from infrastructure.serialization.schemas import SplitSchema


def encode_split_json(split: SplitTextCaption) -> bytes:
    return dump_json(split.to_dict())


def decode_split_json(payload: bytes) -> SplitTextCaption:
    document = validate_document(SplitSchema, payload)
    return SplitTextCaption(
        sentences=tuple(
            SimplifiedSentence(kind=PrimitiveKind(sentence.kind), text=sentence.text)
            for sentence in document.sentences
        )
    )


def split_plain_text(split: SplitTextCaption) -> bytes:
    return split.plain_text().encode("utf-8")
