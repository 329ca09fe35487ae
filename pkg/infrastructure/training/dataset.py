"""
Synthetic caption/latent pairs drawn from the controlled caption grammar.

A latent target is a fixed shared pattern plus a caption-dependent part
read off the conditioning sequence, plus a little noise.
"""
import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np
import torch

from domain.entities.split_caption import SplitTextCaption
from domain.services.caption_grammar import CaptionGenerator, RuleBasedParser
from domain.services.encoding_service import (
    EncodingService,
    GroupComponents,
    InputComponents,
    assemble_input,
    kind_token_indices,
)
from domain.services.split_text_service import SplitTextService
from domain.value_objects.encoder_bank import EncoderBank
from domain.value_objects.injection_schedule import (
    DEFAULT_ORDER,
    InjectionOrder,
    InjectionSchedule,
)
from domain.value_objects.primitive_kind import PrimitiveKind
from shared.utils.seeding import derive_rng

logger = logging.getLogger(__name__)

PATTERN_AMPLITUDE = 2.0
CAPTION_SCALE = 0.5
LATENT_NOISE = 0.05
SIGMA_FLOOR = 1e-3


def target_latent(
    tokens: np.ndarray, latent_tokens: int, width: int, seed: int
) -> np.ndarray:
    """Noise-free synthetic latent for a conditioning sequence"""
    pattern = derive_rng(seed, "pattern").choice(
        [-PATTERN_AMPLITUDE, PATTERN_AMPLITUDE], size=(latent_tokens, width)
    )
    mixing = derive_rng(seed, "mixing").standard_normal(
        (latent_tokens * width, tokens.shape[1])
    ) / math.sqrt(tokens.shape[1])
    summary = tokens.mean(axis=0)
    summary = summary / (np.linalg.norm(summary) + 1e-12) * math.sqrt(summary.shape[0])
    caption_part = CAPTION_SCALE * (mixing @ summary).reshape(latent_tokens, width)
    return pattern + caption_part


@dataclass(frozen=True, eq=False)
class TrainItem:
    caption: str
    split: SplitTextCaption
    components: InputComponents
    groups: Dict[PrimitiveKind, GroupComponents]
    kind_indices: Dict[PrimitiveKind, List[int]]
    x0: np.ndarray


@dataclass(eq=False)
class TrainBatch:
    x0: torch.Tensor
    sigma: torch.Tensor
    eps: torch.Tensor
    clip: torch.Tensor
    complete_t5: torch.Tensor
    split_t5: torch.Tensor
    cond_mask: torch.Tensor
    prim_clip: torch.Tensor
    prim_t5: torch.Tensor
    prim_mask: torch.Tensor
    attn_target: torch.Tensor
    has_target: torch.Tensor
    seed: int

    @property
    def size(self) -> int:
        return int(self.x0.shape[0])


def step_of_sigma(sigma: float, steps: int) -> int:
    return min(steps - 1, int(math.floor((1.0 - sigma) * steps)))


class SyntheticDataset:

    def __init__(
        self,
        bank: EncoderBank,
        size: int,
        seed: int,
        latent_tokens: int = 16,
        token_budget: int = 77,
        captions: Optional[Sequence[str]] = None,
        parser: Optional[RuleBasedParser] = None,
        split_text_service: Optional[SplitTextService] = None,
    ):
        self._bank = bank
        self._seed = seed
        self._latent_tokens = latent_tokens
        self._parser = parser or RuleBasedParser()
        self._split_text = split_text_service or SplitTextService(
            token_budget=token_budget
        )
        self._encoding = EncodingService(bank)
        if captions is None:
            generator = CaptionGenerator()
            captions = [
                generator.generate(derive_rng(seed, "caption", index)).caption
                for index in range(size)
            ]
        self.items = [
            self._build_item(index, caption) for index, caption in enumerate(captions)
        ]
        logger.info(
            "Built synthetic dataset", extra={"items": len(self.items), "seed": seed}
        )

    def __len__(self) -> int:
        return len(self.items)

    def _build_item(self, index: int, caption: str) -> TrainItem:
        graph = self._split_text.graph_service.assemble_graph(
            caption, self._parser.parse(caption)
        )
        split, _ = self._split_text.truncate_to_budget(
            self._split_text.build_split_caption(graph)
        )
        components = self._encoding.input_components(split, caption)
        groups = {
            kind: self._encoding.group_components(split.of_kind(kind))
            for kind in PrimitiveKind
            if split.of_kind(kind)
        }
        kind_indices = {
            kind: kind_token_indices(split, components.offsets, kind) for kind in groups
        }
        tokens = assemble_input(components, self._bank.proj)
        x0 = target_latent(tokens, self._latent_tokens, self._bank.width, self._seed)
        noise = derive_rng(self._seed, "latent-noise", index).standard_normal(x0.shape)
        x0 = x0 + LATENT_NOISE * noise
        return TrainItem(caption, split, components, groups, kind_indices, x0)

    def batch(
        self,
        schedule: InjectionSchedule,
        seed: int,
        order: InjectionOrder = DEFAULT_ORDER,
    ) -> TrainBatch:
        """Full batch with flow noise drawn once from `seed`"""
        rng = derive_rng(seed, "batch")
        size = len(self.items)
        sigma = rng.uniform(SIGMA_FLOOR, 1.0 - SIGMA_FLOOR, size=size)
        eps = rng.standard_normal((size,) + self.items[0].x0.shape)

        length = max(item.components.length for item in self.items)
        width = self._bank.width
        clip_width = self.items[0].components.clip.shape[1]

        clip = np.zeros((size, length, clip_width))
        complete_t5 = np.zeros((size, length, width))
        split_t5 = np.zeros((size, length, width))
        cond_mask = np.zeros((size, 2 * length), dtype=bool)
        attn_target = np.zeros((size, 2 * length))
        has_target = np.zeros(size, dtype=bool)
        active_parts: List[List[GroupComponents]] = []

        for i, item in enumerate(self.items):
            n = item.components.length
            clip[i, :n] = item.components.clip
            complete_t5[i, :n] = item.components.complete_t5
            split_t5[i, :n] = item.components.split_t5
            cond_mask[i, :n] = True
            cond_mask[i, length : length + n] = True

            u = step_of_sigma(float(sigma[i]), schedule.steps)
            active = sorted(
                (kind for kind in item.groups if schedule.injection_step(kind, order) <= u),
                key=lambda kind: (schedule.injection_step(kind, order), order.slot_of(kind)),
            )
            active_parts.append([item.groups[kind] for kind in active])
            if active and item.kind_indices[active[-1]]:
                span = [length + index for index in item.kind_indices[active[-1]]]
                attn_target[i, span] = 1.0 / len(span)
                has_target[i] = True

        keys = max([sum(part.length for part in parts) for parts in active_parts] + [0])
        prim_clip = np.zeros((size, keys, clip_width))
        prim_t5 = np.zeros((size, keys, width))
        prim_mask = np.zeros((size, keys), dtype=bool)
        for i, parts in enumerate(active_parts):
            cursor = 0
            for part in parts:
                prim_clip[i, cursor : cursor + part.length] = part.clip
                prim_t5[i, cursor : cursor + part.length] = part.t5
                cursor += part.length
            prim_mask[i, :cursor] = True

        def tensor(array):
            return torch.from_numpy(np.ascontiguousarray(array))

        return TrainBatch(
            x0=tensor(np.stack([item.x0 for item in self.items])),
            sigma=tensor(sigma),
            eps=tensor(eps),
            clip=tensor(clip),
            complete_t5=tensor(complete_t5),
            split_t5=tensor(split_t5),
            cond_mask=tensor(cond_mask),
            prim_clip=tensor(prim_clip),
            prim_t5=tensor(prim_t5),
            prim_mask=tensor(prim_mask),
            attn_target=tensor(attn_target),
            has_target=tensor(has_target),
            seed=seed,
        )
