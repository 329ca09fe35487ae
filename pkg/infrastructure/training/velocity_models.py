from typing import Tuple

import numpy as np
import torch
import torch.nn as nn

from infrastructure.simulation.toy_dit import AttentionMaps, ToyDiT
from infrastructure.training.dataset import TrainBatch


def noisy_latent(batch: TrainBatch) -> torch.Tensor:
    """x_sigma = (1 - sigma) x0 + sigma eps"""
    sigma = batch.sigma[:, None, None]
    return (1.0 - sigma) * batch.x0 + sigma * batch.eps


def target_velocity(batch: TrainBatch) -> torch.Tensor:
    return batch.eps - batch.x0


class ConditioningAssembler(nn.Module):
    """Builds T and the active primitive tokens with a trainable projection"""

    def __init__(self, proj: np.ndarray, trainable: bool = True):
        super().__init__()
        self.proj = nn.Parameter(
            torch.from_numpy(np.array(proj, dtype=np.float64)), requires_grad=trainable
        )

    def forward(self, batch: TrainBatch) -> Tuple[torch.Tensor, torch.Tensor]:
        top = torch.cat([batch.clip, batch.complete_t5 @ self.proj], dim=-1)
        cond = torch.cat([top, batch.split_t5], dim=1)
        prim = torch.cat([batch.prim_clip, batch.prim_t5 @ self.proj], dim=-1)
        return cond, prim


class VelocitySystem(nn.Module):
    """Toy DiT plus the trainable complete-text projection"""

    def __init__(self, dit: ToyDiT, assembler: ConditioningAssembler):
        super().__init__()
        self.dit = dit
        self.assembler = assembler

    def forward(self, batch: TrainBatch) -> Tuple[torch.Tensor, AttentionMaps]:
        cond, prim = self.assembler(batch)
        return self.dit(
            noisy_latent(batch),
            batch.sigma,
            cond,
            prim,
            cond_mask=batch.cond_mask,
            prim_mask=batch.prim_mask,
        )


class LinearVelocityModel(nn.Module):
    """v = x_sigma W + b, with no attention"""

    def __init__(self, width: int, seed: int = 0):
        super().__init__()
        generator = torch.Generator().manual_seed(seed)
        self.weight = nn.Parameter(
            torch.randn(width, width, generator=generator, dtype=torch.float64) / width**0.5
        )
        self.bias = nn.Parameter(torch.zeros(width, dtype=torch.float64))

    def forward(self, batch: TrainBatch) -> Tuple[torch.Tensor, AttentionMaps]:
        return noisy_latent(batch) @ self.weight + self.bias, AttentionMaps()


class FrozenModel(nn.Module):
    """Wraps a model with every parameter excluded from training"""

    def __init__(self, model: nn.Module):
        super().__init__()
        self.model = model
        for parameter in self.model.parameters():
            parameter.requires_grad_(False)

    def forward(self, batch: TrainBatch):
        return self.model(batch)
