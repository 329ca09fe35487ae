import json
import logging
from typing import Optional

from pydantic import ValidationError

from application.dto.llm_dto import (
    LlmPrimitivesPayload,
    LlmRequest,
    LlmResponse,
    NetPolicy,
)
from application.interfaces.llm_service import LLMServiceInterface
from domain.exceptions.parser_exceptions import ParserError, UnparseableResponseError
from domain.services.caption_grammar import RuleBasedParser
from domain.services.primitive_merger import PrimitiveMerger
from domain.value_objects.primitive_sets import PrimitiveSets

logger = logging.getLogger(__name__)

SYSTEM_PROMPT = (
    "You extract semantic primitives from an image caption. "
    "Reply with a single JSON object and nothing else, matching exactly: "
    '{"objects": [{"name": str, "attributes": [str]}], '
    '"relations": [{"subject": int, "predicate": str, "object": int}]}. '
    "objects lists every distinct entity in order of first mention with the "
    "adjectives that describe it; relations link two objects by their "
    "zero-based positions in objects."
)

REPAIR_TEMPLATE = (
    "Caption: {caption}\n"
    "Your previous reply could not be used ({error}). "
    "Reply again with only the JSON object described in the instructions.\n"
    "Previous reply: {previous}"
)


def _strip_fences(raw_text: str) -> str:
    text = raw_text.strip()
    if text.startswith("```"):
        text = text.split("\n", 1)[1] if "\n" in text else ""
        if text.rstrip().endswith("```"):
            text = text.rstrip()[:-3]
    return text.strip()


def primitives_from_text(
    raw_text: str, merger: Optional[PrimitiveMerger] = None
) -> PrimitiveSets:
    """Schema gate: raises ValueError when `raw_text` is not a usable payload"""
    try:
        payload = LlmPrimitivesPayload.model_validate_json(_strip_fences(raw_text))
    except ValidationError as e:
        first = e.errors(include_url=False)[0]
        location = ".".join(str(part) for part in first["loc"]) or "$"
        raise ValueError(f"{location}: {first['msg']}")

    count = len(payload.objects)
    if count == 0:
        raise ValueError("objects: at least one object is required")
    for k, obj in enumerate(payload.objects):
        if not obj.name.strip():
            raise ValueError(f"objects.{k}.name: blank object name")
    for k, relation in enumerate(payload.relations):
        if not relation.predicate.strip():
            raise ValueError(f"relations.{k}.predicate: blank predicate")
    for k, relation in enumerate(payload.relations):
        for index in (relation.subject, relation.object):
            if not 0 <= index < count:
                raise ValueError(f"relations.{k}: index {index} outside 0..{count - 1}")

    merger = merger or PrimitiveMerger()
    return merger.merge(
        objects=[(obj.name, obj.attributes) for obj in payload.objects],
        relations=[(r.subject, r.predicate, r.object) for r in payload.relations],
    )


class ParseCaptionUseCase:
    """Caption to PrimitiveSets, by rule-based grammar or by a schema-gated LLM"""

    def __init__(
        self,
        llm_service: Optional[LLMServiceInterface] = None,
        model: str = "qwen-plus",
        policy: Optional[NetPolicy] = None,
        max_repairs: int = 2,
        rule_parser: Optional[RuleBasedParser] = None,
        merger: Optional[PrimitiveMerger] = None,
    ):
        self._llm_service = llm_service
        self._merger = merger or PrimitiveMerger()
        self._rule_parser = rule_parser or RuleBasedParser(merger=self._merger)
        self._model = model
        self._policy = policy or NetPolicy()
        self._max_repairs = max_repairs

    async def execute(self, caption: str, parser: str = "rules") -> PrimitiveSets:
        if not caption or not caption.strip():
            raise ParserError("Caption must be nonempty")
        if parser == "rules":
            prims = self._rule_parser.parse(caption)
        elif parser == "llm":
            prims = await self.parse_with_llm(caption)
        else:
            raise ParserError(f"Unknown parser mode: {parser}")

        logger.info(
            "Parsed caption",
            extra={
                "parser": parser,
                "objects": len(prims.objects),
                "relations": len(prims.relations),
                "attributes": len(prims.attributes),
            },
        )
        return prims

    async def parse_with_llm(self, caption: str) -> PrimitiveSets:
        response = await self.validated_response(caption)
        assert response.parsed is not None
        return response.parsed

    async def validated_response(self, caption: str) -> LlmResponse:
        """First reply that passes the schema gate, carrying its parse"""
        if self._llm_service is None:
            raise ParserError("LLM parsing requested but no LLM service is configured")

        content = caption
        last_error = ""
        for attempt in range(self._max_repairs + 1):
            request = LlmRequest(
                model=self._model, system_prompt=SYSTEM_PROMPT, user_content=content
            )
            response = await self._llm_service.complete(request, self._policy)
            try:
                parsed = primitives_from_text(response.raw_text, self._merger)
                return response.with_parsed(parsed)
            except ValueError as e:
                last_error = str(e)

            logger.warning(
                "LLM reply failed schema validation",
                extra={"attempt": attempt + 1, "error": last_error},
            )
            content = REPAIR_TEMPLATE.format(
                caption=caption,
                error=last_error,
                previous=json.dumps(response.raw_text[:500], ensure_ascii=False),
            )

        raise UnparseableResponseError(self._max_repairs + 1, last_error)
