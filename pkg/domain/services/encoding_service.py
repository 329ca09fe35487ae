import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from domain.entities.split_caption import (
    SENTENCE_SEPARATOR,
    SimplifiedSentence,
    SplitTextCaption,
)
from domain.exceptions.encoding_exceptions import (
    DimMismatchError,
    EmptyGroupError,
    MixedKindsError,
)
from domain.value_objects.encoder_bank import EncoderBank
from domain.value_objects.primitive_groups import PrimitiveGroups
from domain.value_objects.primitive_kind import PrimitiveKind
from domain.value_objects.token_sequence import TokenSequence

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class InputComponents:
    """Unprojected blocks of T: [clip | proj(complete t5)] over split t5"""

    clip: np.ndarray
    complete_t5: np.ndarray
    split_t5: np.ndarray
    offsets: tuple

    @property
    def length(self) -> int:
        return int(self.split_t5.shape[0])


@dataclass(frozen=True, eq=False)
class GroupComponents:
    kind: PrimitiveKind
    clip: np.ndarray
    t5: np.ndarray

    @property
    def length(self) -> int:
        return int(self.t5.shape[0])


def assemble_input(components: InputComponents, proj: np.ndarray) -> np.ndarray:
    top = np.concatenate([components.clip, components.complete_t5 @ proj], axis=1)
    return np.concatenate([top, components.split_t5], axis=0)


class EncodingService:
    """Conditioning sequences and primitive groups from one encoder bank"""

    def __init__(self, bank: EncoderBank):
        self._bank = bank

    @property
    def bank(self) -> EncoderBank:
        return self._bank

    def check_bank_dims(self) -> None:
        bank = self._bank
        d_l, d_g, d = bank.enc_l.dim, bank.enc_g.dim, bank.width
        d_prime = d - d_l - d_g
        if d_prime < 1:
            raise DimMismatchError(
                f"D' = D - D_L - D_G must be positive (D={d}, D_L={d_l}, D_G={d_g})",
                {"D": d, "D_L": d_l, "D_G": d_g},
            )
        if bank.proj.shape != (d, d_prime):
            raise DimMismatchError(
                f"Projection must map width {d} to {d_prime}",
                {"proj_shape": list(bank.proj.shape), "expected": [d, d_prime]},
            )

    def _encode_three(self, text: str) -> Tuple[TokenSequence, ...]:
        bank = self._bank
        encoded = (
            bank.enc_l.encode(text),
            bank.enc_g.encode(text),
            bank.enc_t5.encode(text),
        )
        length = max(seq.length for seq in encoded)
        return tuple(seq.padded_to(length) for seq in encoded)

    def input_components(
        self, split: SplitTextCaption, complete: str
    ) -> InputComponents:
        self.check_bank_dims()
        t_l, t_g, t_t5 = self._encode_three(split.plain_text())
        complete_t5 = self._bank.enc_t5.encode(complete).padded_to(t_t5.length)
        return InputComponents(
            clip=np.concatenate([t_l.tokens, t_g.tokens], axis=1),
            complete_t5=np.array(complete_t5.tokens),
            split_t5=np.array(t_t5.tokens),
            offsets=t_t5.offsets,
        )

    def build_input_sequence(
        self, split: SplitTextCaption, complete: str
    ) -> TokenSequence:
        """T = [T_L | T_G | proj(complete T_T5)] stacked over the split-text T_T5"""
        bank = self._bank
        components = self.input_components(split, complete)
        names = (bank.enc_l.spec.name, bank.enc_g.spec.name, bank.enc_t5.spec.name)
        return TokenSequence(
            assemble_input(components, bank.proj),
            provenance="input:" + "+".join(names),
            offsets=components.offsets,
        )

    def group_components(self, group: Sequence[SimplifiedSentence]) -> GroupComponents:
        if not group:
            raise EmptyGroupError("Primitive group has no sentences")
        kinds = {sentence.kind for sentence in group}
        if len(kinds) > 1:
            raise MixedKindsError(
                "Primitive group mixes sentence kinds",
                {"kinds": sorted(kind.name for kind in kinds)},
            )
        self.check_bank_dims()

        text = SENTENCE_SEPARATOR.join(sentence.text for sentence in group)
        t_l, t_g, t_t5 = self._encode_three(text)
        return GroupComponents(
            kind=next(iter(kinds)),
            clip=np.concatenate([t_l.tokens, t_g.tokens], axis=1),
            t5=np.array(t_t5.tokens),
        )

    def encode_primitive_group(
        self, group: Sequence[SimplifiedSentence]
    ) -> TokenSequence:
        components = self.group_components(group)
        tokens = np.concatenate(
            [components.clip, components.t5 @ self._bank.proj], axis=1
        )
        return TokenSequence(tokens, provenance=f"prim:{components.kind.group_key}")

    def encode_primitive_groups(self, split: SplitTextCaption) -> PrimitiveGroups:
        encoded = {}
        for kind in PrimitiveKind:
            sentences = split.of_kind(kind)
            if sentences:
                encoded[kind.group_key] = self.encode_primitive_group(sentences)
        return PrimitiveGroups(**encoded)


def kind_token_indices(
    split: SplitTextCaption, offsets: Sequence[Tuple[int, int]], kind: PrimitiveKind
) -> List[int]:
    """Token indices (within the split-text encoding) of the sentences of `kind`"""
    spans = [
        span
        for span, sentence in zip(split.sentence_spans(), split.sentences)
        if sentence.kind == kind
    ]
    return [
        index
        for index, (start, _) in enumerate(offsets)
        if any(lo <= start < hi for lo, hi in spans)
    ]


def kind_token_positions(
    split: SplitTextCaption, sequence: TokenSequence, kind: PrimitiveKind
) -> List[int]:
    """Rows of T, in its split-text half, holding tokens of `kind` sentences"""
    length = sequence.length // 2
    indices = kind_token_indices(split, sequence.offsets[:length], kind)
    return [length + index for index in indices]
