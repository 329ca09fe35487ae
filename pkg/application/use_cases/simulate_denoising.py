import logging
from typing import Optional

from application.dto.pipeline_dto import SimulationResultDTO
from domain.repositories.trace_repository import TraceRepository
from domain.value_objects.injection_schedule import (
    DEFAULT_ORDER,
    InjectionOrder,
    InjectionSchedule,
)
from domain.value_objects.noise_schedule import NoiseSchedule
from domain.value_objects.primitive_groups import PrimitiveGroups
from domain.value_objects.token_sequence import TokenSequence
from infrastructure.simulation.denoiser import denoise_run
from infrastructure.simulation.toy_dit import ToyDiT
from shared.utils.seeding import derive_seed

logger = logging.getLogger(__name__)


class SimulateDenoisingUseCase:
    """Seeded denoising runs of one caption, each stored as a trace"""

    def __init__(self, model: ToyDiT, trace_repository: Optional[TraceRepository] = None):
        self._model = model
        self._trace_repository = trace_repository

    def execute(
        self,
        conditioning: TokenSequence,
        noise: NoiseSchedule,
        seed: int,
        samples: int,
        groups: Optional[PrimitiveGroups] = None,
        schedule: Optional[InjectionSchedule] = None,
        order: InjectionOrder = DEFAULT_ORDER,
        anchor: str = "step",
        prefix: str = "sample",
    ) -> SimulationResultDTO:
        groups = groups or PrimitiveGroups.none()
        if groups.is_empty:
            schedule = None

        if self._trace_repository is not None:
            self._trace_repository.clear()

        traces, latents = [], []
        for index in range(samples):
            sample_id = f"{prefix}-{index:04d}"
            latent, trace = denoise_run(
                self._model,
                conditioning,
                groups,
                schedule,
                noise,
                seed=derive_seed(seed, prefix, index),
                sample_id=sample_id,
                order=order,
                anchor=anchor,
            )
            if self._trace_repository is not None:
                self._trace_repository.save(trace)
            traces.append(trace)
            latents.append(latent)

        logger.info(
            "Simulated denoising runs",
            extra={
                "samples": samples,
                "steps": noise.steps,
                "injection": schedule is not None,
                "order": str(order),
            },
        )
        return SimulationResultDTO(traces=traces, latents=latents)
