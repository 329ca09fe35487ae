from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from domain.exceptions.schedule_exceptions import ScheduleError

ROW_SUM_TOLERANCE = 1e-5
SNR_RELATIVE_TOLERANCE = 1e-6


def _as_stack(maps, name: str) -> np.ndarray:
    array = np.asarray(maps, dtype=np.float64)
    if array.ndim != 4:
        raise ScheduleError(
            f"{name} must be a layers x heads x queries x keys stack",
            {"ndim": int(array.ndim)},
        )
    return array


@dataclass(frozen=True, eq=False)
class StepRecord:
    """One denoising step: noise level, SNR and the attention maps seen at it.

    `attn` holds the conditioning cross-attention (fixed key count across the
    run); `inject_attn` holds the primitive-injection maps whose key count
    grows as primitive groups become active.
    """

    step: int
    sigma: float
    snr: float
    attn: np.ndarray
    inject_attn: Optional[np.ndarray] = None

    def __post_init__(self):
        attn = _as_stack(self.attn, "attn")
        attn.setflags(write=False)
        object.__setattr__(self, "attn", attn)
        if self.inject_attn is not None:
            inject = _as_stack(self.inject_attn, "inject_attn")
            inject.setflags(write=False)
            object.__setattr__(self, "inject_attn", inject)
        self._validate()

    def _validate(self):
        if not 0.0 <= self.sigma <= 1.0:
            raise ScheduleError("sigma must lie in [0, 1]", {"step": self.step})
        if self.snr < 0:
            raise ScheduleError("snr must be nonnegative", {"step": self.step})
        if 0.0 < self.sigma < 1.0:
            expected = ((1.0 - self.sigma) / self.sigma) ** 2
            if not np.isclose(self.snr, expected, rtol=SNR_RELATIVE_TOLERANCE, atol=0.0):
                raise ScheduleError(
                    "snr inconsistent with sigma",
                    {"step": self.step, "snr": self.snr, "expected": expected},
                )
        for name, maps in (("attn", self.attn), ("inject_attn", self.inject_attn)):
            if maps is None or maps.size == 0:
                continue
            if not np.allclose(maps.sum(axis=-1), 1.0, rtol=0.0, atol=ROW_SUM_TOLERANCE):
                raise ScheduleError(
                    f"{name} rows must sum to 1", {"step": self.step}
                )

    @property
    def layers(self) -> int:
        return self.attn.shape[0]

    @property
    def heads(self) -> int:
        return self.attn.shape[1]

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.attn.shape[2], self.attn.shape[3])

    @property
    def inject_shape(self) -> Optional[Tuple[int, int]]:
        if self.inject_attn is None:
            return None
        return (self.inject_attn.shape[2], self.inject_attn.shape[3])

    @property
    def inject_key_count(self) -> int:
        return 0 if self.inject_attn is None else int(self.inject_attn.shape[3])


@dataclass
class DenoiseTrace:
    sample_id: str
    steps: List[StepRecord] = field(default_factory=list)

    def __post_init__(self):
        for expected, record in enumerate(self.steps):
            if record.step != expected:
                raise ScheduleError(
                    "Trace steps must run 0..S-1 in order",
                    {"sample_id": self.sample_id, "position": expected, "step": record.step},
                )

    @property
    def S(self) -> int:
        return len(self.steps)

    def append(self, record: StepRecord) -> None:
        if record.step != len(self.steps):
            raise ScheduleError(
                "Step appended out of order",
                {"sample_id": self.sample_id, "step": record.step},
            )
        self.steps.append(record)

    def snr_series(self) -> np.ndarray:
        return np.array([record.snr for record in self.steps], dtype=np.float64)

    def sigma_series(self) -> np.ndarray:
        return np.array([record.sigma for record in self.steps], dtype=np.float64)

    def inject_key_counts(self) -> List[int]:
        return [record.inject_key_count for record in self.steps]
