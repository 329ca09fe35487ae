import logging
from typing import Dict, Optional

import numpy as np
import torch

from domain.repositories.artifact_repository import ArtifactRepository
from domain.value_objects.content_hash import ContentHash
from domain.value_objects.encoder_bank import EncoderBank
from infrastructure.serialization.tensor_codec import decode_checkpoint, encode_checkpoint
from infrastructure.training.trainer import TrainingConfig, TrainResult, train_toy
from infrastructure.training.velocity_models import VelocitySystem
from shared.constants import CHECKPOINT_FILE, LOSS_CURVE_FILE

logger = logging.getLogger(__name__)


def training_config_hash(config: TrainingConfig) -> str:
    return ContentHash.from_parts(
        {
            "steps": config.steps,
            "lr": config.lr,
            "dataset_size": config.dataset_size,
            "seed": config.seed,
            "noise_steps": config.noise_steps,
            "s_rel": config.s_rel,
            "s_attr": config.s_attr,
            "order": str(config.order),
            "train_proj": config.train_proj,
            "lam": config.loss.lam,
            "attn_target_mode": config.loss.attn_target_mode,
            "ceiling": config.loss.ceiling,
            "layers": config.model.layers,
            "heads": config.model.heads,
            "latent_tokens": config.model.latent_tokens,
            "ff_mult": config.model.ff_mult,
        }
    ).value


def loss_curve_csv(losses) -> bytes:
    lines = ["step,loss"] + [f"{step},{loss!r}" for step, loss in enumerate(losses)]
    return ("\n".join(lines) + "\n").encode("utf-8")


def state_arrays(system: VelocitySystem) -> Dict[str, np.ndarray]:
    return {name: tensor.detach().cpu().numpy() for name, tensor in system.state_dict().items()}


def load_state(system: VelocitySystem, payload: bytes) -> str:
    """Restore a checkpoint into `system`; returns the stored config hash"""
    state, config_hash = decode_checkpoint(payload)
    system.load_state_dict(
        {name: torch.from_numpy(array).to(torch.float64) for name, array in state.items()}
    )
    return config_hash


class TrainToyModelUseCase:

    def __init__(self, artifacts: ArtifactRepository):
        self._artifacts = artifacts

    def execute(
        self, config: TrainingConfig, bank: Optional[EncoderBank] = None
    ) -> TrainResult:
        result = train_toy(config, bank)
        self._artifacts.write_bytes(LOSS_CURVE_FILE, loss_curve_csv(result.losses))
        self._artifacts.write_bytes(
            CHECKPOINT_FILE,
            encode_checkpoint(state_arrays(result.system), training_config_hash(config)),
        )
        logger.info(
            "Stored training artifacts",
            extra={
                "initial_smoothed": result.initial_smoothed,
                "final_smoothed": result.final_smoothed,
            },
        )
        return result
