import numpy as np
import pytest

from domain.exceptions.parser_exceptions import GrammarError
from domain.services.caption_grammar import CaptionGenerator, RuleBasedParser
from tests.helpers.mock_factories import TEDDY_CAPTION, CaptionFactory


@pytest.fixture
def parser():
    return RuleBasedParser()


class TestParseRuleBased:
    def test_single_relation_with_attribute(self, parser):
        prims = parser.parse("a red ball on a table")

        assert prims.objects == ("ball", "table")
        assert prims.relations == ((0, "on", 1),)
        assert prims.attributes == ((0, "red"),)

    def test_compound_noun_head(self, parser):
        prims = parser.parse(TEDDY_CAPTION)

        assert prims.objects == ("teddy bear", "ribbon")
        assert prims.relations == ((0, "wearing", 1),)
        assert prims.attributes == ((1, "red"),)

    def test_possessive_prepositional_phrase(self, parser):
        prims = parser.parse("A teddy bear wearing a red ribbon around its neck")

        assert prims.objects == ("teddy bear", "ribbon", "neck")
        assert prims.relations == ((0, "wearing", 1), (1, "around", 2))
        assert prims.attributes == ((1, "red"),)

    def test_multiword_relation(self, parser):
        prims = parser.parse("the dog in front of a wooden bench")

        assert prims.relations == ((0, "in front of", 1),)
        assert prims.attributes == ((1, "wooden"),)

    def test_trailing_period_allowed(self, parser):
        assert parser.parse("a cat.").objects == ("cat",)

    def test_repeated_object_merges(self, parser):
        prims = parser.parse("a black cat next to a white cat")

        assert prims.objects == ("cat",)
        assert prims.relations == ((0, "next to", 0),)
        assert prims.attributes == ((0, "black"), (0, "white"))

    def test_verb_outside_lexicon_reports_byte_offset(self, parser):
        with pytest.raises(GrammarError) as exc_info:
            parser.parse("colorless green ideas sleep furiously")

        assert exc_info.value.offset == 22
        assert exc_info.value.token == "sleep"
        assert exc_info.value.error_code == "GRAMMAR_ERROR"

    def test_punctuation_rejected(self, parser):
        with pytest.raises(GrammarError) as exc_info:
            parser.parse("a ball, on a table")
        assert exc_info.value.offset == 2

    def test_dangling_relation(self, parser):
        with pytest.raises(GrammarError, match="relation without an object"):
            parser.parse("a ball on")

    def test_offsets_count_utf8_bytes(self, parser):
        with pytest.raises(GrammarError) as exc_info:
            parser.parse("a café ball sleeps")
        assert exc_info.value.offset == len("a café ball ".encode("utf-8"))

    def test_blank_caption(self, parser):
        with pytest.raises(GrammarError):
            parser.parse("   ")

    def test_injected_relation_lexicon(self):
        parser = RuleBasedParser(relations=("atop",))

        assert parser.parse("a cat atop a box").relations == ((0, "atop", 1),)
        with pytest.raises(GrammarError):
            parser.parse("a cat on a box")


class TestCaptionGenerator:
    def test_generated_captions_parse_to_expected(self, parser):
        for generated in CaptionFactory.generate(seed=7, count=200):
            assert parser.parse(generated.caption) == generated.expected

    def test_generation_is_seeded(self):
        first = CaptionGenerator().generate_many(np.random.default_rng(3), 5)
        second = CaptionGenerator().generate_many(np.random.default_rng(3), 5)
        assert [g.caption for g in first] == [g.caption for g in second]

    def test_object_count_bounded(self):
        for generated in CaptionFactory.generate(seed=1, count=50, max_objects=2):
            assert 1 <= len(generated.expected.objects) <= 2
