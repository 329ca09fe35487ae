from domain.entities.caption_graph import CaptionParseGraph, GraphEdge, GraphNode
from tests.helpers.mock_factories import GraphFactory


class TestCaptionParseGraph:
    def test_counts_and_lookup(self, teddy_graph):
        assert teddy_graph.node_count == 2
        assert teddy_graph.edge_count == 1
        assert teddy_graph.attribute_count == 1
        assert teddy_graph.get_node(1).object == "ribbon"
        assert teddy_graph.get_node(7) is None
        assert not teddy_graph.has_node(2)

    def test_objects_and_attribute_pairs(self, teddy_graph):
        assert teddy_graph.objects() == ["teddy bear", "ribbon"]
        assert teddy_graph.attribute_pairs() == [(1, "red")]

    def test_empty_graph_to_dict(self):
        assert CaptionParseGraph().to_dict() == {"caption": "", "nodes": [], "edges": []}

    def test_to_dict_layout(self):
        graph = GraphFactory.create(
            ["ball", "table"], edges=[(0, 1, "on")], attributes=[["red"], []], caption="x"
        )
        assert graph.to_dict() == {
            "caption": "x",
            "nodes": [
                {"id": 0, "object": "ball", "attributes": ["red"]},
                {"id": 1, "object": "table", "attributes": []},
            ],
            "edges": [{"src": 0, "dst": 1, "relation": "on"}],
        }

    def test_edge_triple(self):
        assert GraphEdge(src=0, dst=1, relation="on").triple == (0, 1, "on")

    def test_nodes_are_value_objects(self):
        assert GraphNode(0, "cat", ["black"]) == GraphNode(0, "cat", ("black",))
