import json
import logging
import os
import re
import tempfile
from pathlib import Path
from typing import Optional, Union

from domain.repositories.parser_cache_repository import ParserCacheRepository

logger = logging.getLogger(__name__)

_KEY = re.compile(r"^[0-9a-f]{16,128}$")


class FileParserCache(ParserCacheRepository):
    """One JSON file per key; entries are never overwritten"""

    def __init__(self, directory: Union[str, Path]):
        self.directory = Path(directory)

    def _path(self, key: str) -> Path:
        if not _KEY.match(key):
            raise ValueError(f"Cache key must be lowercase hex: {key!r}")
        return self.directory / f"{key}.json"

    async def get(self, key: str) -> Optional[str]:
        path = self._path(key)
        if not path.exists():
            return None
        try:
            entry = json.loads(path.read_text(encoding="utf-8"))
            raw_text = entry["raw_text"]
        except (json.JSONDecodeError, KeyError, TypeError):
            logger.warning("Ignoring unreadable cache entry", extra={"cache_key": key})
            return None
        logger.debug("LLM cache hit", extra={"cache_key": key})
        return raw_text

    async def exists(self, key: str) -> bool:
        return self._path(key).exists()

    async def put(self, key: str, raw_text: str) -> bool:
        path = self._path(key)
        if path.exists():
            return False
        self.directory.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as handle:
                json.dump({"key": key, "raw_text": raw_text}, handle, ensure_ascii=False)
            # entries are content-addressed, so a concurrent identical write is harmless
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        logger.debug("LLM cache write", extra={"cache_key": key})
        return True
