from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from domain.entities.denoise_trace import DenoiseTrace
from domain.value_objects.injection_schedule import InjectionSchedule


@dataclass
class SimulationResultDTO:
    traces: List[DenoiseTrace]
    latents: List[np.ndarray]

    @property
    def mean_latent(self) -> np.ndarray:
        return np.mean(np.stack(self.latents), axis=0)


@dataclass
class RunSummaryDTO:
    output_dir: Path
    schedule: Optional[InjectionSchedule]
    manifest: Dict[str, str]
    stages: List[str] = field(default_factory=list)


@dataclass
class ReportDTO:
    document: Dict[str, Any]
    text: str
