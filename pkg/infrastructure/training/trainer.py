import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
import torch
import torch.nn as nn

from domain.exceptions.training_exceptions import TrainingError
from domain.value_objects.encoder_bank import EncoderBank
from domain.value_objects.injection_schedule import (
    DEFAULT_ORDER,
    InjectionOrder,
    InjectionSchedule,
)
from infrastructure.encoders.encoder_bank import build_encoder_bank
from infrastructure.simulation.toy_dit import ToyDiT, ToyDiTConfig
from infrastructure.training.dataset import SyntheticDataset, TrainBatch
from infrastructure.training.losses import LossConfig, total_loss
from infrastructure.training.velocity_models import ConditioningAssembler, VelocitySystem
from shared.utils.seeding import derive_rng, derive_seed

logger = logging.getLogger(__name__)

MIN_CHECK_COORDINATES = 100


@dataclass(frozen=True)
class TrainingConfig:
    steps: int = 200
    lr: float = 0.05
    dataset_size: int = 16
    seed: int = 0
    noise_steps: int = 40
    s_rel: int = 8
    s_attr: int = 30
    order: InjectionOrder = DEFAULT_ORDER
    smoothing_window: int = 5
    train_proj: bool = True
    loss: LossConfig = field(default_factory=LossConfig)
    model: ToyDiTConfig = field(default_factory=ToyDiTConfig)

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if self.lr < 0:
            raise ValueError("lr must be >= 0")


@dataclass
class TrainResult:
    system: VelocitySystem
    losses: List[float]
    config: TrainingConfig

    def smoothed(self, head: bool) -> float:
        window = min(self.config.smoothing_window, len(self.losses))
        values = self.losses[:window] if head else self.losses[-window:]
        return float(np.mean(values))

    @property
    def initial_smoothed(self) -> float:
        return self.smoothed(head=True)

    @property
    def final_smoothed(self) -> float:
        return self.smoothed(head=False)


def training_schedule(config: TrainingConfig) -> InjectionSchedule:
    return InjectionSchedule.fixed(config.s_rel, config.s_attr, config.noise_steps)


def build_system(config: TrainingConfig, bank: EncoderBank) -> VelocitySystem:
    model_config = ToyDiTConfig(
        width=bank.width,
        layers=config.model.layers,
        heads=config.model.heads,
        latent_tokens=config.model.latent_tokens,
        ff_mult=config.model.ff_mult,
        inject_blocks=config.model.inject_blocks,
        time_decay=config.model.time_decay,
        seed=derive_seed(config.seed, "model"),
    )
    return VelocitySystem(
        ToyDiT.build(model_config),
        ConditioningAssembler(bank.proj, trainable=config.train_proj),
    )


def train_toy(config: TrainingConfig, bank: Optional[EncoderBank] = None) -> TrainResult:
    """Full-batch gradient descent on a fixed synthetic batch"""
    bank = bank or build_encoder_bank(seed=derive_seed(config.seed, "encoders"))
    dataset = SyntheticDataset(
        bank,
        size=config.dataset_size,
        seed=derive_seed(config.seed, "dataset"),
        latent_tokens=config.model.latent_tokens,
    )
    batch = dataset.batch(
        training_schedule(config), seed=derive_seed(config.seed, "batch"), order=config.order
    )
    system = build_system(config, bank)
    parameters = [p for p in system.parameters() if p.requires_grad]
    optimizer = torch.optim.SGD(parameters, lr=config.lr, momentum=0.0)

    losses: List[float] = []
    for step in range(config.steps):
        optimizer.zero_grad()
        loss = total_loss(system, batch, config.loss, step=step)
        loss.backward()
        optimizer.step()
        losses.append(float(loss.item()))
        if step % 50 == 0:
            logger.info("Training step", extra={"step": step, "loss": losses[-1]})

    result = TrainResult(system=system, losses=losses, config=config)
    logger.info(
        "Training finished",
        extra={
            "steps": config.steps,
            "initial_smoothed": result.initial_smoothed,
            "final_smoothed": result.final_smoothed,
        },
    )
    return result


def grad_check(
    model: nn.Module,
    batch: TrainBatch,
    eps: float = 1e-5,
    config: Optional[LossConfig] = None,
    coordinates: int = 128,
    seed: int = 0,
) -> float:
    """Max relative error between autograd and central finite differences"""
    if not 1e-6 <= eps <= 1e-3:
        raise TrainingError("grad_check eps must lie in [1e-6, 1e-3]", {"eps": eps})
    if coordinates < MIN_CHECK_COORDINATES:
        raise TrainingError(
            f"grad_check needs at least {MIN_CHECK_COORDINATES} coordinates",
            {"coordinates": coordinates},
        )
    config = config or LossConfig()
    parameters = [p for p in model.parameters() if p.requires_grad]
    if not parameters:
        return 0.0
    if any(p.dtype != torch.float64 for p in parameters):
        raise TrainingError("grad_check needs double-precision parameters")

    model.zero_grad()
    total_loss(model, batch, config).backward()
    # parameters the loss does not reach have no grad
    analytic = torch.cat(
        [
            (
                torch.zeros(p.numel(), dtype=p.dtype)
                if p.grad is None
                else p.grad.reshape(-1)
            )
            for p in parameters
        ]
    ).detach().clone()

    sizes = [p.numel() for p in parameters]
    offsets = np.cumsum([0] + sizes)
    total = int(offsets[-1])
    picks = derive_rng(seed, "grad-check").choice(
        total, size=min(coordinates, total), replace=False
    )

    def evaluate() -> float:
        with torch.no_grad():
            return float(total_loss(model, batch, config).item())

    worst = 0.0
    for flat in np.sort(picks):
        owner = int(np.searchsorted(offsets, flat, side="right") - 1)
        view = parameters[owner].data.view(-1)
        index = int(flat - offsets[owner])
        original = float(view[index])

        view[index] = original + eps
        plus = evaluate()
        view[index] = original - eps
        minus = evaluate()
        view[index] = original

        numeric = (plus - minus) / (2.0 * eps)
        exact = float(analytic[flat])
        error = abs(exact - numeric) / max(abs(exact), abs(numeric), 1e-6)
        worst = max(worst, error)

    logger.debug("Gradient check", extra={"coordinates": len(picks), "max_rel_error": worst})
    return worst
