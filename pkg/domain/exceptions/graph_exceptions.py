from domain.exceptions.base_exceptions import SplitDitError


class GraphError(SplitDitError):
    error_code = "GRAPH_ERROR"


class IndexOutOfRangeError(GraphError):
    error_code = "INDEX_OUT_OF_RANGE"

    def __init__(self, index: int, size: int, where: str):
        super().__init__(
            f"Object index {index} out of range for {size} objects ({where})",
            {"index": index, "size": size, "where": where},
        )
        self.index = index


class DuplicateTripleError(GraphError):
    error_code = "DUPLICATE_TRIPLE"

    def __init__(self, src: int, dst: int, relation: str):
        super().__init__(
            f"Duplicate edge ({src}, {dst}, {relation!r})",
            {"src": src, "dst": dst, "relation": relation},
        )


class UnknownNodeError(GraphError):
    error_code = "UNKNOWN_NODE"

    def __init__(self, node_id: int):
        super().__init__(f"Unknown node id {node_id}", {"node_id": node_id})
        self.node_id = node_id


class SchemaError(GraphError):
    """Malformed document; `path` locates the offending field, e.g. edges[0].relation"""

    error_code = "SCHEMA_ERROR"

    def __init__(self, path: str, reason: str = "invalid value"):
        super().__init__(f"Schema violation at {path}: {reason}", {"path": path})
        self.path = path
        self.reason = reason
