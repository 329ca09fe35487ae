import logging
import re
from typing import List, Optional, Sequence, Tuple

from domain.entities.caption_graph import CaptionParseGraph
from domain.entities.split_caption import (
    SENTENCE_SEPARATOR,
    RerankedSets,
    SimplifiedSentence,
    SplitTextCaption,
)
from domain.exceptions.split_exceptions import ArityMismatchError
from domain.services.graph_service import GraphService
from domain.value_objects.primitive_kind import PrimitiveKind

logger = logging.getLogger(__name__)

DEFAULT_TOKEN_BUDGET = 77


def caption_frequency(caption: str, name: str) -> int:
    """Case-insensitive whole-word occurrences of `name` in the caption"""
    words = [re.escape(part) for part in name.split()]
    if not words:
        return 0
    pattern = r"(?<!\w)" + r"\s+".join(words) + r"(?!\w)"
    return len(re.findall(pattern, caption, flags=re.IGNORECASE))


def whitespace_token_count(split: SplitTextCaption) -> int:
    return len(split.plain_text().split())


class SplitTextService:

    def __init__(
        self,
        graph_service: Optional[GraphService] = None,
        token_budget: int = DEFAULT_TOKEN_BUDGET,
    ):
        self._graph_service = graph_service or GraphService()
        self._token_budget = token_budget

    @property
    def graph_service(self) -> GraphService:
        return self._graph_service

    @property
    def token_budget(self) -> int:
        return self._token_budget

    def rerank_primitives(self, graph: CaptionParseGraph) -> RerankedSets:
        keys = []
        for node in graph.nodes:
            keys.append(
                (
                    self._graph_service.node_degree(graph, node.id),
                    caption_frequency(graph.caption, node.object),
                )
            )

        order = sorted(
            range(graph.node_count),
            key=lambda i: (-keys[i][0], -keys[i][1], i),
        )
        ids = [node.id for node in graph.nodes]
        rank_of = {ids[original]: new for new, original in enumerate(order)}

        objects = tuple(graph.nodes[i].object for i in order)

        relations = sorted(
            enumerate(graph.edges),
            key=lambda item: (
                min(rank_of[item[1].src], rank_of[item[1].dst]),
                max(rank_of[item[1].src], rank_of[item[1].dst]),
                item[0],
            ),
        )
        attributes = sorted(
            enumerate(graph.attribute_pairs()),
            key=lambda item: (rank_of[item[1][0]], item[0]),
        )

        return RerankedSets(
            objects=objects,
            relations=tuple(
                (rank_of[edge.src], edge.relation, rank_of[edge.dst])
                for _, edge in relations
            ),
            attributes=tuple((rank_of[owner], attr) for _, (owner, attr) in attributes),
            rank_keys=tuple(keys[i] for i in order),
            permutation=tuple(order),
        )

    def render_sentence(
        self, kind: PrimitiveKind, args: Sequence[str]
    ) -> SimplifiedSentence:
        if len(args) != kind.arity:
            raise ArityMismatchError(kind.name, kind.arity, len(args))
        if kind == PrimitiveKind.OBJECT:
            text = f"{kind.tag} {args[0]}"
        elif kind == PrimitiveKind.RELATION:
            text = f"{kind.tag} {args[0]} {args[1]} {args[2]}"
        else:
            text = f"{kind.tag} {args[0]} is {args[1]}"
        return SimplifiedSentence(kind=kind, text=text)

    def construct_split_caption(
        self, reranked: RerankedSets, source: Optional[CaptionParseGraph] = None
    ) -> SplitTextCaption:
        sentences: List[SimplifiedSentence] = []
        for i, name in enumerate(reranked.objects):
            sentence = self.render_sentence(PrimitiveKind.OBJECT, [name])
            sentences.append(SimplifiedSentence(sentence.kind, sentence.text, (i,)))

        for subject, predicate, obj in reranked.relations:
            sentence = self.render_sentence(
                PrimitiveKind.RELATION,
                [reranked.objects[subject], predicate, reranked.objects[obj]],
            )
            sentences.append(
                SimplifiedSentence(sentence.kind, sentence.text, (subject, obj))
            )

        for owner, attribute in reranked.attributes:
            sentence = self.render_sentence(
                PrimitiveKind.ATTRIBUTE, [reranked.objects[owner], attribute]
            )
            sentences.append(SimplifiedSentence(sentence.kind, sentence.text, (owner,)))

        return SplitTextCaption(sentences=tuple(sentences), source=source)

    def build_split_caption(self, graph: CaptionParseGraph) -> SplitTextCaption:
        return self.construct_split_caption(self.rerank_primitives(graph), source=graph)

    def truncate_to_budget(
        self, split: SplitTextCaption, budget: Optional[int] = None
    ) -> Tuple[SplitTextCaption, int]:
        """Drop whole sentences from the tail until the joined text fits the budget"""
        budget = self._token_budget if budget is None else budget
        sentences = list(split.sentences)
        dropped = 0
        while (
            sentences
            and len(SENTENCE_SEPARATOR.join(s.text for s in sentences).split()) > budget
        ):
            sentences.pop()
            dropped += 1
        if dropped:
            logger.warning(
                f"Split caption exceeds {budget} tokens; "
                f"dropped {dropped} trailing sentences",
                extra={"dropped": dropped, "budget": budget},
            )
        kept = SplitTextCaption(sentences=tuple(sentences), source=split.source)
        return kept, dropped
