import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from domain.exceptions.pipeline_exceptions import ConfigurationError
from domain.value_objects.injection_schedule import InjectionOrder, InjectionSchedule
from domain.value_objects.noise_schedule import NoiseSchedule
from domain.value_objects.schedule_config import (
    CurvatureMode,
    PlanningSpan,
    ScheduleConfig,
    TimestepMap,
)
from infrastructure.simulation.toy_dit import ToyDiTConfig
from infrastructure.training.losses import LossConfig
from infrastructure.training.trainer import TrainingConfig
from shared.utils.seeding import derive_seed

logger = logging.getLogger(__name__)


class Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class EncoderSection(Section):
    d_l: int = Field(default=8, ge=1)
    d_g: int = Field(default=16, ge=1)
    d: int = Field(default=32, ge=3)
    max_len: int = Field(default=77, ge=1)
    token_budget: int = Field(default=77, ge=1)


class ScheduleSection(Section):
    w: int = Field(default=3, ge=1)
    theta: float = Field(default=1e-8, gt=0)
    tau: float = Field(default=1e-4, gt=0)
    attr_window: float = Field(default=10.0, ge=0)
    rel_window: float = Field(default=40.0, ge=0)
    obj_window: float = Field(default=0.0, ge=0)
    mode: Literal["index", "literal"] = "index"
    g: Literal["log", "identity", "sqrt", "log1p"] = "log"
    planning_span: Literal["before_attr", "literal"] = "before_attr"
    fallback: bool = True
    order: str = "O-R-A"
    fixed_steps: Optional[List[int]] = Field(default=None, min_length=2, max_length=2)
    timestep_scale: Optional[float] = Field(default=None, gt=0)
    timestep_offset: float = 0.0

    def to_domain(self) -> ScheduleConfig:
        return ScheduleConfig(
            w=self.w,
            theta=self.theta,
            tau=self.tau,
            attr_window=self.attr_window,
            rel_window=self.rel_window,
            obj_window=self.obj_window,
            curvature_mode=CurvatureMode(self.mode),
            g=self.g,
            planning_span=PlanningSpan(self.planning_span),
        )

    def injection_order(self) -> InjectionOrder:
        return InjectionOrder.parse(self.order)

    def timestep_map(self, steps: int) -> TimestepMap:
        if self.timestep_scale is None:
            return TimestepMap.for_steps(steps)
        return TimestepMap(scale=self.timestep_scale, offset=self.timestep_offset)


class ModelSection(Section):
    layers: int = Field(default=2, ge=1)
    heads: int = Field(default=2, ge=1)
    latent_tokens: int = Field(default=16, ge=1)
    ff_mult: int = Field(default=2, ge=1)
    inject_blocks: Optional[List[bool]] = None
    time_decay: float = Field(default=8.0, ge=0)


class NoiseSection(Section):
    steps: int = Field(default=40, ge=1)
    kind: Literal["uniform", "sampled"] = "uniform"


class SimulationSection(Section):
    samples: int = Field(default=4, ge=1)
    injection: bool = True
    anchor: Literal["step", "window_start"] = "step"


class TrainingSection(Section):
    steps: int = Field(default=200, ge=1)
    lr: float = Field(default=0.05, ge=0)
    lam: float = Field(default=0.1, ge=0, alias="lambda")
    dataset_size: int = Field(default=16, ge=1)
    attn_target_mode: Literal["uniform_span", "span_mass"] = "uniform_span"
    ceiling: float = Field(default=1e3, gt=0)
    smoothing_window: int = Field(default=5, ge=1)
    train_proj: bool = True
    enabled: bool = False

    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class LlmSection(Section):
    allow_network: bool = False
    max_retries: int = Field(default=2, ge=0)
    max_repairs: int = Field(default=2, ge=0)
    timeout_s: float = Field(default=30.0, gt=0)


class PipelineConfig(Section):
    caption: Optional[str] = None
    caption_file: Optional[str] = None
    parser: Literal["rules", "llm"] = "rules"
    cache_dir: Optional[str] = None
    output_dir: str = "out"
    # external probe traces for the schedule stage
    traces_dir: Optional[str] = None
    seed: int = 0

    encoder: EncoderSection = Field(default_factory=EncoderSection)
    schedule: ScheduleSection = Field(default_factory=ScheduleSection)
    model: ModelSection = Field(default_factory=ModelSection)
    noise: NoiseSection = Field(default_factory=NoiseSection)
    simulation: SimulationSection = Field(default_factory=SimulationSection)
    training: TrainingSection = Field(default_factory=TrainingSection)
    llm: LlmSection = Field(default_factory=LlmSection)

    @model_validator(mode="after")
    def check_dims(self) -> "PipelineConfig":
        if self.encoder.d - self.encoder.d_l - self.encoder.d_g < 1:
            raise ValueError("encoder.d must exceed encoder.d_l + encoder.d_g")
        if self.encoder.d % self.model.heads != 0:
            raise ValueError("encoder.d must be divisible by model.heads")
        if self.model.inject_blocks is not None and len(self.model.inject_blocks) != self.model.layers:
            raise ValueError("model.inject_blocks needs one flag per layer")
        return self

    @classmethod
    def load(
        cls,
        path: Optional[Union[str, Path]] = None,
        overrides: Optional[Dict[str, Any]] = None,
    ) -> "PipelineConfig":
        """Defaults, then the JSON file, then flag overrides"""
        data: Dict[str, Any] = {}
        if path is not None:
            try:
                data = json.loads(Path(path).read_text(encoding="utf-8"))
            except (OSError, json.JSONDecodeError) as e:
                raise ConfigurationError(f"Cannot read config file {path}: {e}")
            if not isinstance(data, dict):
                raise ConfigurationError("Config file must hold a JSON object")
        merged = deep_merge(data, overrides or {})
        try:
            return cls.model_validate(merged)
        except ValidationError as e:
            raise ConfigurationError(
                "Invalid pipeline configuration", {"errors": e.errors(include_url=False)}
            )

    def read_caption(self) -> str:
        if self.caption is not None:
            return self.caption
        if self.caption_file is not None:
            try:
                return Path(self.caption_file).read_text(encoding="utf-8").strip()
            except OSError as e:
                raise ConfigurationError(f"Cannot read caption file: {e}")
        raise ConfigurationError("No caption given (caption or caption_file)")

    def model_config_for(self, width: int) -> ToyDiTConfig:
        return ToyDiTConfig(
            width=width,
            layers=self.model.layers,
            heads=self.model.heads,
            latent_tokens=self.model.latent_tokens,
            ff_mult=self.model.ff_mult,
            inject_blocks=None if self.model.inject_blocks is None else tuple(self.model.inject_blocks),
            time_decay=self.model.time_decay,
            seed=derive_seed(self.seed, "model"),
        )

    def noise_schedule(self) -> NoiseSchedule:
        if self.noise.kind == "sampled":
            return NoiseSchedule.sampled(self.noise.steps, derive_seed(self.seed, "noise"))
        return NoiseSchedule.uniform(self.noise.steps)

    def fixed_schedule(self) -> Optional[InjectionSchedule]:
        if self.schedule.fixed_steps is None:
            return None
        s_rel, s_attr = self.schedule.fixed_steps
        return InjectionSchedule.fixed(s_rel, s_attr, self.noise.steps)

    def training_config(self) -> TrainingConfig:
        fixed = self.schedule.fixed_steps or default_training_steps(self.noise.steps)
        return TrainingConfig(
            steps=self.training.steps,
            lr=self.training.lr,
            dataset_size=self.training.dataset_size,
            seed=self.seed,
            noise_steps=self.noise.steps,
            s_rel=fixed[0],
            s_attr=fixed[1],
            order=self.schedule.injection_order(),
            smoothing_window=self.training.smoothing_window,
            train_proj=self.training.train_proj,
            loss=LossConfig(
                lam=self.training.lam,
                attn_target_mode=self.training.attn_target_mode,
                ceiling=self.training.ceiling,
            ),
            model=self.model_config_for(self.encoder.d),
        )

    def to_json(self) -> str:
        return self.model_dump_json(
            by_alias=True, indent=2, exclude={"output_dir", "traces_dir"}
        )


def default_training_steps(steps: int) -> List[int]:
    """Relation/attribute steps at 20% and 75% of the run (8 and 30 for 40 steps)"""
    s_attr = min(steps - 1, max(2, int(round(0.75 * steps))))
    s_rel = min(s_attr - 1, max(1, int(round(0.2 * steps))))
    return [s_rel, s_attr]


def deep_merge(base: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    merged = dict(base)
    for key, value in overrides.items():
        if value is None:
            continue
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged
