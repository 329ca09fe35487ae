import logging
from collections import Counter

from domain.entities.caption_graph import CaptionParseGraph, GraphEdge, GraphNode
from domain.exceptions.graph_exceptions import (
    DuplicateTripleError,
    GraphError,
    UnknownNodeError,
)
from domain.value_objects.primitive_sets import PrimitiveSets
from domain.value_objects.validation_report import ValidationReport

logger = logging.getLogger(__name__)


class GraphService:

    def assemble_graph(self, caption: str, prims: PrimitiveSets) -> CaptionParseGraph:
        """One node per object (id = list position), one edge per relation triple"""
        attributes = {i: [] for i in range(len(prims.objects))}
        for owner, attribute in prims.attributes:
            attributes[owner].append(attribute)

        nodes = [
            GraphNode(id=i, object=name, attributes=tuple(attributes[i]))
            for i, name in enumerate(prims.objects)
        ]

        seen = set()
        edges = []
        for subject, predicate, obj in prims.relations:
            triple = (subject, obj, predicate)
            if triple in seen:
                raise DuplicateTripleError(subject, obj, predicate)
            seen.add(triple)
            edges.append(GraphEdge(src=subject, dst=obj, relation=predicate))

        graph = CaptionParseGraph(caption=caption, nodes=nodes, edges=edges)
        logger.debug(
            "Assembled caption graph",
            extra={"nodes": graph.node_count, "edges": graph.edge_count},
        )
        return graph

    def validate_graph(self, graph: CaptionParseGraph) -> ValidationReport:
        report = ValidationReport()

        ids = Counter(node.id for node in graph.nodes)
        for node_id, count in ids.items():
            if count > 1:
                report.add(
                    "unique-node-id", f"node {node_id}", f"id declared {count} times"
                )

        for node in graph.nodes:
            if not node.object.strip():
                report.add(
                    "nonempty-object", f"node {node.id}", "object string is empty"
                )

        triples = Counter()
        for k, edge in enumerate(graph.edges):
            locus = f"edges[{k}]"
            for end, node_id in (("src", edge.src), ("dst", edge.dst)):
                if node_id not in ids:
                    report.add(
                        "referential-integrity",
                        locus,
                        f"{end}={node_id} is not a declared node",
                    )
            if not edge.relation.strip():
                report.add("nonempty-relation", locus, "relation label is empty")
            triples[edge.triple] += 1

        for (src, dst, relation), count in triples.items():
            if count > 1:
                report.add(
                    "duplicate-triple",
                    f"edge ({src}, {dst}, {relation})",
                    f"triple repeated {count} times",
                )
        return report

    def build_valid_graph(
        self, caption: str, prims: PrimitiveSets
    ) -> CaptionParseGraph:
        """Assemble, then raise on the first validation violation"""
        graph = self.assemble_graph(caption, prims)
        report = self.validate_graph(graph)
        if not report.is_valid:
            first = report.violations[0]
            raise GraphError(
                f"Parsed graph is invalid: {first.message}",
                {"rule": first.rule, "locus": first.locus},
            )
        return graph

    def node_degree(self, graph: CaptionParseGraph, node_id: int) -> int:
        """In-degree plus out-degree; a self-loop counts twice"""
        if not graph.has_node(node_id):
            raise UnknownNodeError(node_id)
        return sum(
            (edge.src == node_id) + (edge.dst == node_id) for edge in graph.edges
        )
