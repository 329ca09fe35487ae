import hashlib
import re

import numpy as np

from domain.exceptions.encoding_exceptions import EmptyTextError
from domain.services.text_encoder import TextEncoder
from domain.value_objects.token_sequence import EncoderSpec, TokenSequence

_WORD = re.compile(r"\S+")


def _token_vector(token: str, position: int, spec: EncoderSpec) -> np.ndarray:
    key = f"{spec.name}\x1f{spec.seed}\x1f{position}\x1f{token}".encode("utf-8")
    seed = int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "little")
    return np.random.default_rng(seed).standard_normal(spec.dim)


def toy_encode(text: str, spec: EncoderSpec) -> TokenSequence:
    """Whitespace tokens mapped through a keyed hash to N(0, 1) vectors"""
    if not text or not text.strip():
        raise EmptyTextError(spec.name)
    matches = list(_WORD.finditer(text))[: spec.max_len]
    tokens = np.stack(
        [_token_vector(match.group(), position, spec) for position, match in enumerate(matches)]
    )
    return TokenSequence(
        tokens,
        provenance=f"{spec.name}:{hashlib.sha256(text.encode('utf-8')).hexdigest()[:12]}",
        max_len=spec.max_len,
        offsets=tuple((match.start(), match.end()) for match in matches),
    )


class ToyEncoder(TextEncoder):

    def __init__(self, spec: EncoderSpec):
        self._spec = spec

    @property
    def spec(self) -> EncoderSpec:
        return self._spec

    def encode(self, text: str) -> TokenSequence:
        return toy_encode(text, self._spec)
