"""
Composite objective: flow-matching velocity regression plus an attention
alignment term pulling conditioning attention onto the split-text tokens of
the most recently injected primitive kind.
"""
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import torch
import torch.nn.functional as F

from domain.exceptions.training_exceptions import EmptySpanError, NonFiniteLossError
from infrastructure.simulation.toy_dit import AttentionMaps
from infrastructure.training.dataset import TrainBatch
from infrastructure.training.velocity_models import target_velocity

ATTN_TARGET_MODES = ("uniform_span", "span_mass")

VelocityModel = Callable[[TrainBatch], Tuple[torch.Tensor, AttentionMaps]]


@dataclass(frozen=True)
class LossConfig:
    lam: float = 0.1
    attn_target_mode: str = "uniform_span"
    smoothing: float = 1e-6
    ceiling: float = 1e3

    def __post_init__(self):
        if not math.isfinite(self.lam) or self.lam < 0:
            raise ValueError(f"lambda must be finite and >= 0, got {self.lam}")
        if self.attn_target_mode not in ATTN_TARGET_MODES:
            raise ValueError(f"Unknown attention target mode {self.attn_target_mode!r}")


@dataclass
class LossBreakdown:
    total: torch.Tensor
    cfm: torch.Tensor
    attn: torch.Tensor


def _finite(loss: torch.Tensor, step: Optional[int]) -> torch.Tensor:
    if not torch.isfinite(loss):
        raise NonFiniteLossError(-1 if step is None else step)
    return loss


def velocity_mse(velocity: torch.Tensor, batch: TrainBatch) -> torch.Tensor:
    return F.mse_loss(velocity, target_velocity(batch))


def cfm_loss(model: VelocityModel, batch: TrainBatch, step: Optional[int] = None) -> torch.Tensor:
    velocity, _ = model(batch)
    return _finite(velocity_mse(velocity, batch), step)


def _alignment_terms(
    attn: torch.Tensor,
    target: torch.Tensor,
    valid: torch.Tensor,
    smoothing: float,
    mode: str,
) -> torch.Tensor:
    """Per-item loss; attn is (items, layers, heads, queries, keys)"""
    valid = valid.to(attn.dtype)
    key_count = valid.sum(dim=-1)
    smoothed = (attn + smoothing) * valid[:, None, None, None, :]
    smoothed = smoothed / (1.0 + smoothing * key_count)[:, None, None, None, None]
    target = target[:, None, None, None, :]
    in_span = target > 0

    if mode == "span_mass":
        mass = (smoothed * in_span).sum(dim=-1)
        rows = -torch.log(mass)
    else:
        log_ratio = torch.log(torch.where(in_span, target, 1.0)) - torch.log(
            torch.where(in_span, smoothed, 1.0)
        )
        rows = (target * log_ratio).sum(dim=-1)
    return rows.mean(dim=(1, 2, 3))


def attn_alignment_loss(
    attn_maps: torch.Tensor,
    span: Sequence[int],
    smoothing: float = 1e-6,
    ceiling: float = 1e3,
    mode: str = "uniform_span",
) -> torch.Tensor:
    """KL from the uniform distribution over `span` to the smoothed attention.

    attn_maps is (layers, heads, queries, keys); every key counts as valid.
    """
    span = sorted(set(int(index) for index in span))
    if not span:
        raise EmptySpanError(span)
    keys = attn_maps.shape[-1]
    target = torch.zeros(keys, dtype=attn_maps.dtype)
    target[span] = 1.0 / len(span)
    valid = torch.ones(1, keys, dtype=torch.bool)
    loss = _alignment_terms(attn_maps.unsqueeze(0), target.unsqueeze(0), valid, smoothing, mode)
    return torch.clamp(loss[0], max=ceiling)


def batch_alignment_loss(
    maps: AttentionMaps, batch: TrainBatch, config: LossConfig
) -> torch.Tensor:
    if not maps.cond or not bool(batch.has_target.any()):
        return batch.x0.new_zeros(())
    attn = maps.cond_stack()
    terms = _alignment_terms(
        attn, batch.attn_target, batch.cond_mask, config.smoothing, config.attn_target_mode
    )
    loss = terms[batch.has_target].mean()
    return torch.clamp(loss, max=config.ceiling)


def combine_losses(cfm: torch.Tensor, attn: torch.Tensor, lam: float) -> torch.Tensor:
    return cfm + lam * attn


def loss_breakdown(
    model: VelocityModel, batch: TrainBatch, config: LossConfig, step: Optional[int] = None
) -> LossBreakdown:
    velocity, maps = model(batch)
    cfm = velocity_mse(velocity, batch)
    attn = batch_alignment_loss(maps, batch, config)
    total = _finite(combine_losses(cfm, attn, config.lam), step)
    return LossBreakdown(total=total, cfm=cfm, attn=attn)


def total_loss(
    model: VelocityModel, batch: TrainBatch, config: LossConfig, step: Optional[int] = None
) -> torch.Tensor:
    return loss_breakdown(model, batch, config, step).total
