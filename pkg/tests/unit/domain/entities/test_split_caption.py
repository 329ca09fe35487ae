import pytest

from domain.entities.split_caption import SimplifiedSentence, SplitTextCaption
from domain.value_objects.primitive_kind import PrimitiveKind

O, R, A = PrimitiveKind.OBJECT, PrimitiveKind.RELATION, PrimitiveKind.ATTRIBUTE


class TestSplitTextCaption:
    @pytest.fixture
    def split(self):
        return SplitTextCaption(
            sentences=[
                SimplifiedSentence(O, "[OBJECT] ball"),
                SimplifiedSentence(R, "[RELATION] ball on table"),
                SimplifiedSentence(A, "[ATTRIBUTE] ball is red"),
            ]
        )

    def test_plain_text_and_spans(self, split):
        text = split.plain_text()
        assert text == "[OBJECT] ball. [RELATION] ball on table. [ATTRIBUTE] ball is red"
        for (start, end), sentence in zip(split.sentence_spans(), split.sentences):
            assert text[start:end] == sentence.text

    def test_of_kind(self, split):
        assert [s.text for s in split.of_kind(R)] == ["[RELATION] ball on table"]
        assert split.kinds() == [O, R, A]

    def test_kind_order_enforced(self):
        with pytest.raises(ValueError, match="object-relation-attribute"):
            SplitTextCaption(
                sentences=[
                    SimplifiedSentence(A, "[ATTRIBUTE] ball is red"),
                    SimplifiedSentence(O, "[OBJECT] ball"),
                ]
            )

    def test_to_dict(self, split):
        assert split.to_dict()["sentences"][0] == {"kind": "OBJECT", "text": "[OBJECT] ball"}

    def test_empty(self):
        assert len(SplitTextCaption()) == 0
        assert SplitTextCaption().plain_text() == ""
