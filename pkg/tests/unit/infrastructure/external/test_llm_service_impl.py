from unittest.mock import AsyncMock, Mock

import pytest

from application.dto.llm_dto import LlmRequest, NetPolicy
from domain.exceptions.parser_exceptions import (
    AuthMissingError,
    CacheMissError,
    TransportError,
)
from infrastructure.external.llm_service_impl import LLMServiceImpl
from infrastructure.external.openai_client import OpenAIClient
from infrastructure.repositories.file_parser_cache import FileParserCache

REQUEST = LlmRequest(model="qwen-plus", system_prompt="extract", user_content="a red ball")
ONLINE = NetPolicy(allow_network=True, max_retries=2)


@pytest.fixture
def cache(tmp_path):
    return FileParserCache(tmp_path / "cache")


def client_with(*outcomes):
    client = Mock(spec=OpenAIClient)
    client.generate_chat_completion = AsyncMock(side_effect=list(outcomes))
    return client


class TestLLMServiceImpl:
    @pytest.mark.asyncio
    async def test_cache_hit_skips_client(self, cache):
        await cache.put(REQUEST.cache_key, "cached reply")
        factory = Mock()
        service = LLMServiceImpl(cache, factory)

        response = await service.complete(REQUEST, NetPolicy())

        assert response.raw_text == "cached reply"
        assert response.attempts == 0
        factory.assert_not_called()

    @pytest.mark.asyncio
    async def test_offline_miss(self, cache):
        service = LLMServiceImpl(cache, Mock())

        with pytest.raises(CacheMissError) as exc_info:
            await service.complete(REQUEST, NetPolicy(allow_network=False))

        assert exc_info.value.key == REQUEST.cache_key

    @pytest.mark.asyncio
    async def test_missing_credential(self, cache):
        service = LLMServiceImpl(cache, Mock(return_value=None))

        with pytest.raises(AuthMissingError):
            await service.complete(REQUEST, ONLINE)

    @pytest.mark.asyncio
    async def test_retries_then_caches(self, cache):
        client = client_with(TransportError("boom", 1), TransportError("boom", 1), "reply")
        factory = Mock(return_value=client)
        service = LLMServiceImpl(cache, factory)

        response = await service.complete(REQUEST, ONLINE)

        assert response.attempts == 3
        assert await cache.get(REQUEST.cache_key) == "reply"
        factory.assert_called_once_with(ONLINE.timeout_s)
        messages = client.generate_chat_completion.call_args.kwargs["messages"]
        assert messages == REQUEST.to_messages()

    @pytest.mark.asyncio
    async def test_gives_up_after_max_retries(self, cache):
        client = client_with(*[TransportError("boom", 1)] * 3)
        service = LLMServiceImpl(cache, Mock(return_value=client))

        with pytest.raises(TransportError) as exc_info:
            await service.complete(REQUEST, ONLINE)

        assert exc_info.value.attempts == 3
        assert client.generate_chat_completion.await_count == 3
        assert await cache.get(REQUEST.cache_key) is None

    @pytest.mark.asyncio
    async def test_second_call_served_from_cache(self, cache):
        client = client_with("reply")
        service = LLMServiceImpl(cache, Mock(return_value=client))

        await service.complete(REQUEST, ONLINE)
        again = await service.complete(REQUEST, NetPolicy(allow_network=False))

        assert again.raw_text == "reply"
        assert client.generate_chat_completion.await_count == 1
