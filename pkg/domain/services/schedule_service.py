"""
Injection-step selection from batches of denoising traces.

Attributes are injected once the averaged cross-attention stops moving
(moving-average change below tau); relations at the knee of the averaged
SNR curve over the planning stage; objects at step 0.
"""
import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from domain.entities.denoise_trace import DenoiseTrace
from domain.exceptions.schedule_exceptions import (
    DegenerateAxisError,
    InconsistentTracesError,
    NoConvergenceError,
    OrderingViolationError,
    ShapeMismatchError,
    TooFewStepsError,
)
from domain.value_objects.injection_schedule import InjectionSchedule
from domain.value_objects.schedule_config import (
    CurvatureMode,
    PlanningSpan,
    ScheduleConfig,
    TimestepMap,
)

logger = logging.getLogger(__name__)


def _sorted_batch(traces: Sequence[DenoiseTrace]) -> List[DenoiseTrace]:
    if not traces:
        raise InconsistentTracesError("Empty trace batch")
    ordered = sorted(traces, key=lambda trace: trace.sample_id)
    reference = ordered[0]
    if reference.S < 2:
        raise InconsistentTracesError(
            "Traces need at least two steps", {"sample_id": reference.sample_id}
        )
    expected = (reference.S, reference.steps[0].attn.shape)
    for trace in ordered:
        shapes = {record.attn.shape for record in trace.steps}
        if trace.S != expected[0] or shapes != {expected[1]}:
            raise InconsistentTracesError(
                "Traces disagree on step count or attention layout",
                {
                    "sample_id": trace.sample_id,
                    "S": trace.S,
                    "expected_S": expected[0],
                    "expected_shape": list(expected[1]),
                },
            )
    return ordered


def _per_sample_diffs(trace: DenoiseTrace, theta: float) -> np.ndarray:
    """Layer/head-averaged change for t = 1..S-1"""
    stack = np.stack([record.attn for record in trace.steps])
    change = np.linalg.norm(stack[1:] - stack[:-1], axis=(-2, -1))
    base = np.linalg.norm(stack[:-1], axis=(-2, -1)) + theta
    return (change / base).mean(axis=(1, 2))


class ScheduleService:

    def __init__(self, config: Optional[ScheduleConfig] = None):
        self._config = config or ScheduleConfig()

    @property
    def config(self) -> ScheduleConfig:
        return self._config

    def attention_step_diff(self, curr: np.ndarray, prev: np.ndarray) -> float:
        curr = np.asarray(curr, dtype=np.float64)
        prev = np.asarray(prev, dtype=np.float64)
        if curr.shape != prev.shape:
            raise ShapeMismatchError(
                "Attention maps differ in shape",
                {"curr": list(curr.shape), "prev": list(prev.shape)},
            )
        change = np.linalg.norm(curr - prev)
        return float(change / (np.linalg.norm(prev) + self._config.theta))

    def aggregate_diffs(self, traces: Sequence[DenoiseTrace]) -> np.ndarray:
        """Sample-averaged attention change; element i belongs to step t = i + 1"""
        ordered = _sorted_batch(traces)
        total = np.zeros(ordered[0].S - 1, dtype=np.float64)
        for trace in ordered:
            total = total + _per_sample_diffs(trace, self._config.theta)
        return total / len(ordered)

    @staticmethod
    def mean_snr(traces: Sequence[DenoiseTrace]) -> np.ndarray:
        ordered = _sorted_batch(traces)
        total = np.zeros(ordered[0].S, dtype=np.float64)
        for trace in ordered:
            total = total + trace.snr_series()
        return total / len(ordered)

    @staticmethod
    def moving_average(diffs: np.ndarray, w: int) -> np.ndarray:
        diffs = np.asarray(diffs, dtype=np.float64)
        if diffs.shape[0] < w:
            raise TooFewStepsError(int(diffs.shape[0]), w)
        return sliding_window_view(diffs, w).sum(axis=1) / w

    def detect_convergence(self, diffs: np.ndarray, start: int = 1) -> int:
        """First step whose trailing w-window mean falls below tau.

        `start` is the step index of diffs[0]; aggregate_diffs starts at 1.
        """
        w, tau = self._config.w, self._config.tau
        smoothed = self.moving_average(diffs, w)
        below = np.flatnonzero(smoothed < tau)
        if below.size == 0:
            raise NoConvergenceError(tau, float(smoothed.min()))
        return int(below[0]) + w - 1 + start

    @staticmethod
    def curvature_series(y: np.ndarray, x: np.ndarray) -> np.ndarray:
        """Discrete curvature at interior points; element i belongs to index i + 1"""
        y = np.asarray(y, dtype=np.float64)
        x = np.asarray(x, dtype=np.float64)
        if y.shape != x.shape:
            raise ShapeMismatchError(
                "Curvature axes differ in length", {"y": len(y), "x": len(x)}
            )
        if y.shape[0] < 3:
            raise TooFewStepsError(int(y.shape[0]))

        span = x[2:] - x[:-2]
        degenerate = np.flatnonzero(span == 0)
        if degenerate.size:
            raise DegenerateAxisError(int(degenerate[0]) + 1)

        first = (y[2:] - y[:-2]) / span
        second = (y[2:] - 2.0 * y[1:-1] + y[:-2]) / (span / 2.0) ** 2
        return np.abs(second) / (1.0 + first**2) ** 1.5

    def planning_span(self, steps: int, s_attr: int) -> int:
        """Number of leading steps whose SNR forms the planning-stage curve"""
        if self._config.planning_span == PlanningSpan.LITERAL:
            return steps - s_attr
        return s_attr

    def curvature_axes(self, snr: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        if self._config.curvature_mode == CurvatureMode.LITERAL_SNR_AXIS:
            return snr, self._config.transform(snr)
        return np.arange(snr.shape[0], dtype=np.float64), snr

    def detect_inflection(self, traces: Sequence[DenoiseTrace], s_attr: int) -> int:
        snr = self.mean_snr(traces)
        count = self.planning_span(snr.shape[0], s_attr)
        if count < 3:
            raise TooFewStepsError(max(count, 0))
        x, y = self.curvature_axes(snr[:count])
        kappa = self.curvature_series(y, x)
        # argmax keeps the first maximum, so ties go to the smaller step
        return int(np.argmax(kappa)) + 1

    def schedule_windows(
        self,
        s_rel: int,
        s_attr: int,
        steps: int,
        timestep_map: Optional[TimestepMap] = None,
    ) -> dict:
        timestep_map = timestep_map or TimestepMap.for_steps(steps)

        def around(center: int, label_half_width: float):
            half = timestep_map.half_width_steps(label_half_width)
            return (max(0, center - half), min(steps - 1, center + half))

        return {
            "obj": around(0, self._config.obj_window),
            "rel": around(s_rel, self._config.rel_window),
            "attr": around(s_attr, self._config.attr_window),
        }

    def build_schedule(
        self,
        traces: Sequence[DenoiseTrace],
        fallback: bool = False,
        timestep_map: Optional[TimestepMap] = None,
    ) -> InjectionSchedule:
        cfg = self._config
        diffs = self.aggregate_diffs(traces)
        steps = len(diffs) + 1
        notes = []

        try:
            s_attr = self.detect_convergence(diffs)
        except NoConvergenceError as e:
            if not fallback:
                raise
            s_attr = int(np.floor(cfg.fallback_fraction * steps + 0.5))
            s_attr = min(max(s_attr, 1), steps - 1)
            note = f"no convergence below tau={cfg.tau}; s_attr set to {s_attr}"
            notes.append(note)
            logger.warning(note, extra={"details": e.details})

        try:
            s_rel = self.detect_inflection(traces, s_attr)
        except TooFewStepsError:
            if not fallback:
                raise
            s_rel = 0
            note = f"too few planning steps before s_attr={s_attr}; s_rel set to 0"
            notes.append(note)
            logger.warning(note)

        if s_rel >= s_attr:
            if not fallback:
                raise OrderingViolationError(s_rel, s_attr)
            note = (
                f"inflection step {s_rel} not before s_attr={s_attr}; "
                f"clamped to {s_attr - 1}"
            )
            notes.append(note)
            logger.warning(note)
            s_rel = s_attr - 1

        schedule = InjectionSchedule(
            s_obj=0,
            s_rel=s_rel,
            s_attr=s_attr,
            steps=steps,
            windows=self.schedule_windows(s_rel, s_attr, steps, timestep_map),
            notes=tuple(notes),
        )
        logger.info(
            "Built injection schedule",
            extra={
                "s_rel": s_rel,
                "s_attr": s_attr,
                "steps": steps,
                "samples": len(traces),
            },
        )
        return schedule
