from abc import ABC, abstractmethod

from domain.value_objects.token_sequence import EncoderSpec, TokenSequence


class TextEncoder(ABC):

    @property
    @abstractmethod
    def spec(self) -> EncoderSpec:
        pass

    @abstractmethod
    def encode(self, text: str) -> TokenSequence:
        pass

    @property
    def dim(self) -> int:
        return self.spec.dim
