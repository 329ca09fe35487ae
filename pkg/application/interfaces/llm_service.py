from abc import ABC, abstractmethod

from application.dto.llm_dto import LlmRequest, LlmResponse, NetPolicy


class LLMServiceInterface(ABC):

    @abstractmethod
    async def complete(self, request: LlmRequest, policy: NetPolicy) -> LlmResponse:
        """Return the raw completion text, from cache when possible"""
        pass
