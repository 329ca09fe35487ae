import pytest

from domain.exceptions.split_exceptions import ArityMismatchError
from domain.services.graph_service import GraphService
from domain.services.split_text_service import (
    SplitTextService,
    caption_frequency,
    whitespace_token_count,
)
from domain.value_objects.primitive_kind import PrimitiveKind
from tests.helpers.mock_factories import CaptionFactory, GraphFactory

TEDDY_SENTENCES = [
    "[OBJECT] teddy bear",
    "[OBJECT] ribbon",
    "[RELATION] teddy bear wearing ribbon",
    "[ATTRIBUTE] ribbon is red",
]


@pytest.fixture
def service():
    return SplitTextService(GraphService())


class TestCaptionFrequency:
    def test_whole_word_case_insensitive(self):
        assert caption_frequency("the cat and the Cat", "cat") == 2
        assert caption_frequency("two cats", "cat") == 0

    def test_multiword_name(self):
        assert caption_frequency("a teddy  bear", "teddy bear") == 1


class TestRerankPrimitives:
    def test_degree_orders_objects(self, service):
        graph = GraphFactory.create(
            ["ball", "table", "lamp"], edges=[(0, 1, "on"), (1, 2, "under")]
        )

        reranked = service.rerank_primitives(graph)

        assert reranked.objects == ("table", "ball", "lamp")
        assert reranked.permutation == (1, 0, 2)
        assert reranked.rank_keys[0] == (2, 0)
        assert reranked.relations == ((1, "on", 0), (0, "under", 2))

    def test_frequency_breaks_degree_ties(self, service):
        graph = GraphFactory.create(
            ["ball", "table"],
            edges=[(0, 1, "on")],
            caption="a ball on a table beside another table",
        )
        assert service.rerank_primitives(graph).objects == ("table", "ball")

    def test_stable_on_full_ties(self, service, teddy_graph):
        reranked = service.rerank_primitives(teddy_graph)
        assert reranked.objects == ("teddy bear", "ribbon")


class TestBuildSplitCaption:
    def test_teddy_sentences(self, service, teddy_graph):
        split = service.build_split_caption(teddy_graph)

        assert [s.text for s in split.sentences] == TEDDY_SENTENCES
        assert split.source is teddy_graph

    def test_structural_laws_on_generated_graphs(self, service):
        for generated in CaptionFactory.generate(seed=5, count=200):
            graph = GraphService().assemble_graph(generated.caption, generated.expected)
            split = service.build_split_caption(graph)

            total = graph.node_count + graph.edge_count + graph.attribute_count
            assert len(split) == total
            ranks = [kind.rank for kind in split.kinds()]
            assert ranks == sorted(ranks)
            prefix = len("[OBJECT] ")
            objects = [s.text[prefix:] for s in split.of_kind(PrimitiveKind.OBJECT)]
            assert sorted(objects) == sorted(graph.objects())

    def test_render_arity_checked(self, service):
        with pytest.raises(ArityMismatchError):
            service.render_sentence(PrimitiveKind.RELATION, ["ball", "on"])


class TestTruncateToBudget:
    def test_within_budget_untouched(self, service, teddy_graph):
        split = service.build_split_caption(teddy_graph)
        kept, dropped = service.truncate_to_budget(split, 77)

        assert dropped == 0
        assert kept.sentences == split.sentences

    def test_drops_trailing_sentences(self, service, teddy_graph):
        split = service.build_split_caption(teddy_graph)
        assert whitespace_token_count(split) == 14

        kept, dropped = service.truncate_to_budget(split, 5)

        assert dropped == 2
        assert [s.text for s in kept.sentences] == TEDDY_SENTENCES[:2]

    def test_default_budget_comes_from_constructor(self, teddy_graph):
        service = SplitTextService(token_budget=5)
        split = service.build_split_caption(teddy_graph)

        _, dropped = service.truncate_to_budget(split)

        assert dropped == 2
