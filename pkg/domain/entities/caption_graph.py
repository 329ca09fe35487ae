from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple


@dataclass(frozen=True)
class GraphNode:
    id: int
    object: str
    attributes: Tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "attributes", tuple(self.attributes))

    def to_dict(self) -> dict:
        return {"id": self.id, "object": self.object, "attributes": list(self.attributes)}


@dataclass(frozen=True)
class GraphEdge:
    src: int
    dst: int
    relation: str

    @property
    def triple(self) -> Tuple[int, int, str]:
        return (self.src, self.dst, self.relation)

    def to_dict(self) -> dict:
        return {"src": self.src, "dst": self.dst, "relation": self.relation}


@dataclass(frozen=True)
class CaptionParseGraph:
    """Objects as nodes carrying their attributes, relations as labelled edges.

    The caption itself stands in for the root node, so it never shows up
    among the nodes and never contributes to a degree.
    """

    caption: str = ""
    nodes: Tuple[GraphNode, ...] = ()
    edges: Tuple[GraphEdge, ...] = ()
    _index: Dict[int, GraphNode] = field(
        default_factory=dict, init=False, repr=False, compare=False
    )

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "_index", {node.id: node for node in self.nodes})

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def attribute_count(self) -> int:
        return sum(len(node.attributes) for node in self.nodes)

    def has_node(self, node_id: int) -> bool:
        return node_id in self._index

    def get_node(self, node_id: int) -> Optional[GraphNode]:
        return self._index.get(node_id)

    def objects(self) -> List[str]:
        return [node.object for node in self.nodes]

    def attribute_pairs(self) -> List[Tuple[int, str]]:
        return [(node.id, attr) for node in self.nodes for attr in node.attributes]

    def to_dict(self) -> dict:
        return {
            "caption": self.caption,
            "nodes": [node.to_dict() for node in self.nodes],
            "edges": [edge.to_dict() for edge in self.edges],
        }
