import logging
from typing import Optional

from domain.exceptions.schedule_exceptions import ScheduleError
from domain.repositories.trace_repository import TraceRepository
from domain.services.schedule_service import ScheduleService
from domain.value_objects.injection_schedule import InjectionSchedule
from domain.value_objects.schedule_config import TimestepMap

logger = logging.getLogger(__name__)


class BuildInjectionScheduleUseCase:

    def __init__(
        self, trace_repository: TraceRepository, schedule_service: ScheduleService
    ):
        self._trace_repository = trace_repository
        self._schedule_service = schedule_service

    def execute(
        self,
        fallback: bool = True,
        timestep_map: Optional[TimestepMap] = None,
        fixed: Optional[InjectionSchedule] = None,
    ) -> InjectionSchedule:
        """Detect the schedule from stored probe traces, or apply `fixed` steps"""
        if fixed is not None:
            windows = self._schedule_service.schedule_windows(
                fixed.s_rel, fixed.s_attr, fixed.steps, timestep_map
            )
            logger.info(
                "Using fixed injection steps",
                extra={"s_rel": fixed.s_rel, "s_attr": fixed.s_attr},
            )
            return InjectionSchedule(
                s_obj=0,
                s_rel=fixed.s_rel,
                s_attr=fixed.s_attr,
                steps=fixed.steps,
                windows=windows,
                notes=("fixed steps",),
            )

        traces = self._trace_repository.load_all()
        if not traces:
            raise ScheduleError("No probe traces to build a schedule from")
        return self._schedule_service.build_schedule(
            traces, fallback=fallback, timestep_map=timestep_map
        )
