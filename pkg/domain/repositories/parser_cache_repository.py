from abc import ABC, abstractmethod
from typing import Optional


class ParserCacheRepository(ABC):
    """Content-addressed store of raw LLM responses"""

    @abstractmethod
    async def get(self, key: str) -> Optional[str]:
        pass

    @abstractmethod
    async def put(self, key: str, raw_text: str) -> bool:
        """Store `raw_text`; returns False when the entry already existed"""
        pass

    @abstractmethod
    async def exists(self, key: str) -> bool:
        pass
