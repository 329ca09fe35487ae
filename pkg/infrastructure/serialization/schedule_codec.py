from typing import Optional, Tuple

from domain.value_objects.injection_schedule import InjectionSchedule
from domain.value_objects.schedule_config import ScheduleConfig, TimestepMap
from infrastructure.serialization.errors import dump_json, validate_document
from infrastructure.serialization.schemas import ScheduleSchema


def encode_schedule_json(
    schedule: InjectionSchedule,
    config: Optional[ScheduleConfig] = None,
    timestep_map: Optional[TimestepMap] = None,
) -> bytes:
    document = schedule.to_dict()
    document["config"] = config.to_dict(timestep_map) if config is not None else {}
    document["config"]["steps"] = schedule.steps
    if schedule.notes:
        document["notes"] = list(schedule.notes)
    return dump_json(document)


def decode_schedule_json(payload: bytes) -> Tuple[InjectionSchedule, dict]:
    document = validate_document(ScheduleSchema, payload)
    steps = int(document.config.get("steps", document.s_attr + 1))
    schedule = InjectionSchedule(
        s_obj=document.s_obj,
        s_rel=document.s_rel,
        s_attr=document.s_attr,
        steps=steps,
        windows={key: (bounds[0], bounds[1]) for key, bounds in document.windows.items()},
        notes=tuple(document.notes),
    )
    return schedule, document.config
