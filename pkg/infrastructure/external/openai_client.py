import logging
from typing import List, Optional

import httpx
import openai

from domain.exceptions.parser_exceptions import TransportError

logger = logging.getLogger(__name__)


class OpenAIClient:
    """Thin async wrapper over an OpenAI-compatible chat-completion endpoint.

    Retries are owned by the caller, so the SDK's own retry loop is disabled.
    """

    def __init__(
        self,
        api_key: str,
        base_url: Optional[str] = None,
        timeout_s: float = 30.0,
        http_client: Optional[httpx.AsyncClient] = None,
    ):
        if not api_key:
            raise ValueError("LLM API key is required")
        self.client = openai.AsyncOpenAI(
            api_key=api_key,
            base_url=base_url,
            timeout=timeout_s,
            max_retries=0,
            http_client=http_client,
        )

    async def generate_chat_completion(
        self,
        messages: List[dict],
        model: str,
        temperature: float = 0.0,
        timeout_s: Optional[float] = None,
    ) -> str:
        try:
            response = await self.client.chat.completions.create(
                model=model,
                messages=messages,
                temperature=temperature,
                timeout=timeout_s,
            )
        except openai.APIStatusError as e:
            raise TransportError(
                f"LLM endpoint returned HTTP {e.status_code}", attempts=1
            )
        except openai.APIError as e:
            raise TransportError(f"LLM request failed: {e}", attempts=1)

        if not response.choices:
            raise TransportError("LLM response has no choices", attempts=1)
        content = response.choices[0].message.content
        if response.usage is not None:
            logger.debug(
                "LLM completion received",
                extra={
                    "model": response.model,
                    "total_tokens": response.usage.total_tokens,
                },
            )
        return content or ""

    async def close(self) -> None:
        await self.client.close()
