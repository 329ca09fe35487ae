import asyncio
import logging
from typing import Callable, Optional

from application.dto.llm_dto import LlmRequest, LlmResponse, NetPolicy
from application.interfaces.llm_service import LLMServiceInterface
from domain.exceptions.parser_exceptions import (
    AuthMissingError,
    CacheMissError,
    TransportError,
)
from domain.repositories.parser_cache_repository import ParserCacheRepository
from infrastructure.external.openai_client import OpenAIClient
from shared.constants import LLM_KEY_ENV

logger = logging.getLogger(__name__)

ClientFactory = Callable[[float], Optional[OpenAIClient]]


class LLMServiceImpl(LLMServiceInterface):
    """Cache-first chat completion.

    `client_factory` returns None when no credential is configured; it is
    only called on a cache miss with network allowed, so offline runs never
    need a key.
    """

    def __init__(
        self,
        cache: ParserCacheRepository,
        client_factory: ClientFactory,
        backoff_s: float = 0.0,
    ):
        self._cache = cache
        self._client_factory = client_factory
        self._backoff_s = backoff_s

    async def complete(self, request: LlmRequest, policy: NetPolicy) -> LlmResponse:
        key = request.cache_key
        cached = await self._cache.get(key)
        if cached is not None:
            return LlmResponse(raw_text=cached, attempts=0)

        if not policy.allow_network:
            raise CacheMissError(key)

        client = self._client_factory(policy.timeout_s)
        if client is None:
            raise AuthMissingError(LLM_KEY_ENV)

        last_error: Optional[TransportError] = None
        for attempt in range(1, policy.max_retries + 2):
            try:
                raw_text = await client.generate_chat_completion(
                    messages=request.to_messages(),
                    model=request.model,
                    temperature=request.temperature,
                    timeout_s=policy.timeout_s,
                )
            except TransportError as e:
                last_error = e
                logger.warning(
                    "LLM request failed",
                    extra={"attempt": attempt, "cache_key": key, "error": e.message},
                )
                if self._backoff_s:
                    await asyncio.sleep(self._backoff_s * attempt)
                continue

            await self._cache.put(key, raw_text)
            logger.info(
                "LLM response cached", extra={"attempts": attempt, "cache_key": key}
            )
            return LlmResponse(raw_text=raw_text, attempts=attempt)

        attempts = policy.max_retries + 1
        reason = last_error.message if last_error else "unknown error"
        raise TransportError(
            f"LLM request failed after {attempts} attempts: {reason}", attempts=attempts
        )
