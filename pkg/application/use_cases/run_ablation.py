import logging
from pathlib import Path
from typing import Any, Callable, Dict, List, Tuple

from application.dto.pipeline_dto import ReportDTO
from application.use_cases.generate_report import GenerateReportUseCase
from application.use_cases.run_pipeline import PipelineStages, RunPipelineUseCase
from domain.value_objects.injection_schedule import InjectionOrder
from infrastructure.config.pipeline_config import PipelineConfig, deep_merge
from shared.constants import ABLATION_DIR

logger = logging.getLogger(__name__)

StagesFactory = Callable[[PipelineConfig], PipelineStages]

WINDOW_SIZES = (1, 2, 3, 4, 5)


def ablation_variants(config: PipelineConfig) -> List[Tuple[str, str, Dict[str, Any]]]:
    """(axis, run name, config overrides) for every ablation run"""
    variants: List[Tuple[str, str, Dict[str, Any]]] = []
    for enabled in (True, False):
        label = "on" if enabled else "off"
        variants.append(("injection", f"injection-{label}", {"simulation": {"injection": enabled}}))
    for order in InjectionOrder.all_orders():
        variants.append(
            ("order", f"order-{order}", {"schedule": {"order": str(order)}})
        )
    for w in WINDOW_SIZES:
        variants.append(("w", f"w-{w}", {"schedule": {"w": w}}))
    return variants


class RunAblationUseCase:
    """Injection on/off, all six injection orders and w = 1..5 on one caption"""

    def __init__(self, stages_factory: StagesFactory):
        self._stages_factory = stages_factory

    async def execute(self, config: PipelineConfig) -> ReportDTO:
        root = Path(config.output_dir) / ABLATION_DIR
        base = config.model_dump(by_alias=True)
        axes: Dict[str, List[Path]] = {}

        for axis, name, overrides in ablation_variants(config):
            run_dir = root / name
            variant = PipelineConfig.model_validate(
                deep_merge(base, {**overrides, "output_dir": str(run_dir)})
            )
            await RunPipelineUseCase(self._stages_factory(variant)).execute()
            axes.setdefault(axis, []).append(run_dir)
            logger.info("Ablation run finished", extra={"axis": axis, "run": name})

        run_dirs = [d for dirs in axes.values() for d in dirs]
        return GenerateReportUseCase().execute(run_dirs, output_dir=root, axes=axes)
