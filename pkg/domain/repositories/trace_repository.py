from abc import ABC, abstractmethod
from pathlib import Path
from typing import List

from domain.entities.denoise_trace import DenoiseTrace


class TraceRepository(ABC):

    @abstractmethod
    def save(self, trace: DenoiseTrace) -> Path:
        pass

    @abstractmethod
    def load(self, sample_id: str) -> DenoiseTrace:
        pass

    @abstractmethod
    def load_all(self) -> List[DenoiseTrace]:
        pass

    @abstractmethod
    def sample_ids(self) -> List[str]:
        pass

    @abstractmethod
    def clear(self) -> int:
        """Remove every stored trace; returns how many were removed"""
        pass
