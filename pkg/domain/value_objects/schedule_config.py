import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

import numpy as np

from domain.exceptions.schedule_exceptions import ScheduleError


class CurvatureMode(Enum):
    INDEX_AXIS = "index"
    LITERAL_SNR_AXIS = "literal"


class PlanningSpan(Enum):
    """Which steps form the planning-stage SNR curve searched for the knee"""

    BEFORE_ATTR = "before_attr"
    LITERAL = "literal"


@dataclass(frozen=True)
class TimestepMap:
    """Affine map between inference-step indices and 0-1000 diffusion labels"""

    scale: float
    offset: float = 0.0

    @classmethod
    def for_steps(cls, steps: int, horizon: float = 1000.0) -> "TimestepMap":
        return cls(scale=horizon / steps)

    def to_label(self, step: int) -> float:
        return self.offset + self.scale * step

    def to_step(self, label: float) -> int:
        return int(round((label - self.offset) / self.scale))

    def half_width_steps(self, label_half_width: float) -> int:
        return int(math.ceil(label_half_width / self.scale))


_TRANSFORMS = {
    "log": np.log,
    "identity": lambda x: x,
    "sqrt": np.sqrt,
    "log1p": np.log1p,
}


@dataclass(frozen=True)
class ScheduleConfig:
    w: int = 3
    theta: float = 1e-8
    tau: float = 1e-4
    # half-widths in diffusion-label units, converted through TimestepMap
    attr_window: float = 10.0
    rel_window: float = 40.0
    obj_window: float = 0.0
    curvature_mode: CurvatureMode = CurvatureMode.INDEX_AXIS
    g: str = "log"
    planning_span: PlanningSpan = PlanningSpan.BEFORE_ATTR
    fallback_fraction: float = 0.5

    def __post_init__(self):
        if self.w < 1:
            raise ScheduleError("Window size w must be >= 1", {"w": self.w})
        if not self.tau > 0:
            raise ScheduleError("Threshold tau must be > 0", {"tau": self.tau})
        if not self.theta > 0:
            raise ScheduleError("Stabilizer theta must be > 0", {"theta": self.theta})
        if self.g not in _TRANSFORMS:
            raise ScheduleError(f"Unknown transform g={self.g!r}")

    @property
    def transform(self) -> Callable[[np.ndarray], np.ndarray]:
        return _TRANSFORMS[self.g]

    def to_dict(self, timestep_map: Optional[TimestepMap] = None) -> dict:
        data = {
            "w": self.w,
            "theta": self.theta,
            "tau": self.tau,
            "attr_window": self.attr_window,
            "rel_window": self.rel_window,
            "obj_window": self.obj_window,
            "curvature_mode": self.curvature_mode.value,
            "g": self.g,
            "planning_span": self.planning_span.value,
        }
        if timestep_map is not None:
            data["timestep_map"] = {
                "scale": timestep_map.scale,
                "offset": timestep_map.offset,
            }
        return data
