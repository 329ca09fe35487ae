from abc import ABC, abstractmethod
from pathlib import Path
from typing import Dict


class ArtifactRepository(ABC):
    """Run directory whose files are all recorded in a manifest of content hashes"""

    @abstractmethod
    def write_bytes(self, name: str, payload: bytes) -> Path:
        pass

    @abstractmethod
    def read_bytes(self, name: str) -> bytes:
        pass

    @abstractmethod
    def exists(self, name: str) -> bool:
        pass

    @abstractmethod
    def record(self, name: str) -> str:
        """Hash a file written by another writer and add it to the manifest"""
        pass

    @abstractmethod
    def manifest(self) -> Dict[str, str]:
        pass

    @abstractmethod
    def write_manifest(self) -> Path:
        pass
