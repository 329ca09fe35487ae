from domain.entities.caption_graph import CaptionParseGraph, GraphEdge, GraphNode
from infrastructure.serialization.errors import dump_json, validate_document
from infrastructure.serialization.schemas import GraphSchema


def encode_graph_json(graph: CaptionParseGraph) -> bytes:
    return dump_json(graph.to_dict())


def decode_graph_json(payload: bytes) -> CaptionParseGraph:
    document = validate_document(GraphSchema, payload)
    return CaptionParseGraph(
        caption=document.caption,
        nodes=[
            GraphNode(id=node.id, object=node.object, attributes=tuple(node.attributes))
            for node in document.nodes
        ],
        edges=[
            GraphEdge(src=edge.src, dst=edge.dst, relation=edge.relation)
            for edge in document.edges
        ],
    )
