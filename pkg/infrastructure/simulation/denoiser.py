import logging
from typing import Optional, Tuple

import numpy as np
import torch

from domain.entities.denoise_trace import DenoiseTrace, StepRecord
from domain.exceptions.simulation_exceptions import (
    EmptyPrimitivesError,
    NonFiniteLatentError,
)
from domain.value_objects.injection_schedule import (
    DEFAULT_ORDER,
    InjectionOrder,
    InjectionSchedule,
)
from domain.value_objects.noise_schedule import NoiseSchedule, snr_of_step
from domain.value_objects.primitive_groups import PrimitiveGroups
from domain.value_objects.token_sequence import TokenSequence
from infrastructure.simulation.toy_dit import MultiHeadAttention, ToyDiT

logger = logging.getLogger(__name__)


def active_primitives(
    schedule: Optional[InjectionSchedule],
    u: int,
    groups: PrimitiveGroups,
    order: InjectionOrder = DEFAULT_ORDER,
    anchor: str = "step",
) -> Optional[TokenSequence]:
    """Length-wise concatenation of every group already injected at step u.

    Groups are appended in injection order, so the active sequence only
    ever grows. Returns None when nothing is active.
    """
    if schedule is None:
        return None
    active = sorted(
        (
            (schedule.injection_step(kind, order, anchor), order.slot_of(kind), sequence)
            for kind, sequence in groups.as_dict().items()
        ),
        key=lambda item: (item[0], item[1]),
    )
    parts = [sequence.tokens for step, _, sequence in active if step <= u]
    if not parts:
        return None
    return TokenSequence(np.concatenate(parts, axis=0), provenance=f"active@{u}")


def cross_attention_inject(
    attention: MultiHeadAttention, hidden: torch.Tensor, prim: Optional[TokenSequence]
) -> Tuple[torch.Tensor, torch.Tensor]:
    """Residual cross-attention from latent queries to primitive tokens.

    Returns the updated P x D hidden state and the P x K attention map
    averaged over heads.
    """
    if prim is None or prim.length == 0:
        raise EmptyPrimitivesError()
    context = torch.from_numpy(np.array(prim.tokens)).to(hidden.dtype).unsqueeze(0)
    update, weights = attention(hidden.unsqueeze(0), context)
    return hidden + update[0], weights[0].mean(dim=0)


def initial_latent(shape: Tuple[int, int], seed: int) -> torch.Tensor:
    generator = torch.Generator().manual_seed(seed)
    return torch.randn((1,) + tuple(shape), generator=generator, dtype=torch.float64)


@torch.no_grad()
def denoise_run(
    model: ToyDiT,
    conditioning: TokenSequence,
    groups: PrimitiveGroups,
    schedule: Optional[InjectionSchedule],
    noise: NoiseSchedule,
    seed: int,
    sample_id: str = "sample-0000",
    order: InjectionOrder = DEFAULT_ORDER,
    anchor: str = "step",
) -> Tuple[np.ndarray, DenoiseTrace]:
    """Euler integration of the learned velocity from sigma_0 down to 0.

    `schedule=None` (or empty groups) runs without primitive injection.
    """
    config = model.config
    latent = initial_latent((config.latent_tokens, config.width), seed)
    cond = torch.from_numpy(np.array(conditioning.tokens)).unsqueeze(0)
    trace = DenoiseTrace(sample_id=sample_id)

    for u in range(noise.steps):
        sigma = noise.sigma(u)
        prim_sequence = active_primitives(schedule, u, groups, order, anchor)
        prim = None
        if prim_sequence is not None:
            prim = torch.from_numpy(np.array(prim_sequence.tokens)).unsqueeze(0)

        velocity, maps = model(latent, torch.tensor([sigma], dtype=torch.float64), cond, prim)
        inject = maps.inject_stack()
        trace.append(
            StepRecord(
                step=u,
                sigma=sigma,
                snr=snr_of_step(u, noise),
                attn=maps.cond_stack()[0].numpy(),
                inject_attn=None if inject is None else inject[0].numpy(),
            )
        )

        latent = latent + (noise.next_sigma(u) - sigma) * velocity
        if not torch.isfinite(latent).all():
            logger.error(
                "Latent became non-finite", extra={"sample_id": sample_id, "step": u}
            )
            raise NonFiniteLatentError(u)

    logger.debug(
        "Denoising run finished",
        extra={"sample_id": sample_id, "steps": noise.steps},
    )
    return latent[0].numpy(), trace
