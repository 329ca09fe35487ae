import inspect
import logging
from functools import cached_property
from typing import Callable, Dict, List, Optional, Sequence

from application.dto.pipeline_dto import RunSummaryDTO
from application.use_cases.build_injection_schedule import BuildInjectionScheduleUseCase
from application.use_cases.parse_caption import ParseCaptionUseCase
from application.use_cases.simulate_denoising import SimulateDenoisingUseCase
from application.use_cases.train_toy_model import TrainToyModelUseCase, load_state
from domain.entities.caption_graph import CaptionParseGraph
from domain.entities.split_caption import SplitTextCaption
from domain.exceptions.base_exceptions import SplitDitError
from domain.exceptions.pipeline_exceptions import ConfigurationError, StageFailedError
from domain.services.encoding_service import EncodingService
from domain.services.graph_service import GraphService
from domain.services.schedule_service import ScheduleService
from domain.services.split_text_service import SplitTextService
from domain.value_objects.encoder_bank import EncoderBank
from domain.value_objects.injection_schedule import InjectionSchedule
from domain.value_objects.primitive_groups import PrimitiveGroups
from domain.value_objects.token_sequence import TokenSequence
from infrastructure.config.pipeline_config import PipelineConfig
from infrastructure.encoders.encoder_bank import build_encoder_bank
from infrastructure.repositories.file_artifact_repository import FileArtifactRepository
from infrastructure.repositories.jsonl_trace_repository import JsonlTraceRepository
from infrastructure.serialization.graph_codec import (
    decode_graph_json,
    encode_graph_json,
)
from infrastructure.serialization.schedule_codec import (
    decode_schedule_json,
    encode_schedule_json,
)
from infrastructure.serialization.split_codec import (
    decode_split_json,
    encode_split_json,
    split_plain_text,
)
from infrastructure.serialization.tensor_codec import decode_tseq, encode_tseq
from infrastructure.simulation.toy_dit import ToyDiT
from infrastructure.training.trainer import build_system
from shared.constants import (
    CHECKPOINT_FILE,
    CONFIG_FILE,
    GRAPH_FILE,
    INPUT_SEQUENCE_FILE,
    LATENT_FILE,
    LOSS_CURVE_FILE,
    PROBE_TRACE_DIR,
    RUN_TRACE_DIR,
    SCHEDULE_FILE,
    SPLIT_FILE,
    SPLIT_TEXT_FILE,
)
from shared.utils.seeding import derive_seed

logger = logging.getLogger(__name__)

PIPELINE_STAGES = ("parse", "split", "train", "encode", "probe", "schedule", "simulate")

_TRACKED_FILES = (
    GRAPH_FILE,
    SPLIT_FILE,
    SPLIT_TEXT_FILE,
    INPUT_SEQUENCE_FILE,
    SCHEDULE_FILE,
    LATENT_FILE,
    LOSS_CURVE_FILE,
    CHECKPOINT_FILE,
)


class PipelineStages:
    """Each stage reads its inputs from the run directory and writes its outputs back"""

    def __init__(
        self,
        config: PipelineConfig,
        parse_use_case: Optional[ParseCaptionUseCase] = None,
        artifacts: Optional[FileArtifactRepository] = None,
        graph_service: Optional[GraphService] = None,
        split_text_service: Optional[SplitTextService] = None,
        schedule_service: Optional[ScheduleService] = None,
    ):
        self.config = config
        self.artifacts = artifacts or FileArtifactRepository(config.output_dir)
        self._parse_use_case = parse_use_case or ParseCaptionUseCase()
        self._graph_service = graph_service or GraphService()
        self._split_text_service = split_text_service or SplitTextService(
            self._graph_service, token_budget=config.encoder.token_budget
        )
        self._schedule_service = schedule_service or ScheduleService(
            config.schedule.to_domain()
        )

    @property
    def probe_traces(self) -> JsonlTraceRepository:
        return JsonlTraceRepository(self.artifacts.root / PROBE_TRACE_DIR)

    @property
    def run_traces(self) -> JsonlTraceRepository:
        return JsonlTraceRepository(self.artifacts.root / RUN_TRACE_DIR)

    @property
    def schedule_traces(self) -> JsonlTraceRepository:
        """Traces the schedule is detected from; `traces_dir` names an external batch"""
        if self.config.traces_dir is not None:
            return JsonlTraceRepository(self.config.traces_dir)
        return self.probe_traces

    @cached_property
    def base_bank(self) -> EncoderBank:
        encoder = self.config.encoder
        return build_encoder_bank(
            d_l=encoder.d_l,
            d_g=encoder.d_g,
            d=encoder.d,
            max_len=encoder.max_len,
            seed=derive_seed(self.config.seed, "encoders"),
        )

    def _use_checkpoint(self) -> bool:
        return self.config.training.enabled and self.artifacts.exists(CHECKPOINT_FILE)

    def _trained_system(self):
        system = build_system(self.config.training_config(), self.base_bank)
        load_state(system, self.artifacts.read_bytes(CHECKPOINT_FILE))
        return system

    def bank(self) -> EncoderBank:
        """Encoder bank, with the trained projection once a checkpoint exists"""
        if not self._use_checkpoint():
            return self.base_bank
        proj = self._trained_system().assembler.proj.detach().numpy()
        return self.base_bank.with_proj(proj)

    def model(self) -> ToyDiT:
        if self._use_checkpoint():
            return self._trained_system().dit
        return ToyDiT.build(self.config.model_config_for(self.base_bank.width))

    def load_graph(self) -> CaptionParseGraph:
        return decode_graph_json(self.artifacts.read_bytes(GRAPH_FILE))

    def load_split(self) -> SplitTextCaption:
        return decode_split_json(self.artifacts.read_bytes(SPLIT_FILE))

    def load_input(self) -> TokenSequence:
        return decode_tseq(self.artifacts.read_bytes(INPUT_SEQUENCE_FILE))

    def load_schedule(self) -> InjectionSchedule:
        schedule, _ = decode_schedule_json(self.artifacts.read_bytes(SCHEDULE_FILE))
        return schedule

    async def parse(self) -> CaptionParseGraph:
        caption = self.config.read_caption()
        prims = await self._parse_use_case.execute(caption, self.config.parser)
        graph = self._graph_service.build_valid_graph(caption, prims)
        self.artifacts.write_bytes(GRAPH_FILE, encode_graph_json(graph))
        return graph

    def split(self) -> SplitTextCaption:
        service = self._split_text_service
        split, dropped = service.truncate_to_budget(
            service.build_split_caption(self.load_graph())
        )
        self.artifacts.write_bytes(SPLIT_FILE, encode_split_json(split))
        self.artifacts.write_bytes(SPLIT_TEXT_FILE, split_plain_text(split))
        logger.info(
            "Built split-text caption",
            extra={"sentences": len(split), "dropped": dropped},
        )
        return split

    def train(self) -> None:
        if not self.config.training.enabled:
            logger.info("Training disabled; using the untrained toy model")
            return
        TrainToyModelUseCase(self.artifacts).execute(
            self.config.training_config(), self.base_bank
        )

    def encode(self) -> TokenSequence:
        sequence = EncodingService(self.bank()).build_input_sequence(
            self.load_split(), self.load_graph().caption
        )
        self.artifacts.write_bytes(INPUT_SEQUENCE_FILE, encode_tseq(sequence))
        logger.info("Encoded input sequence", extra={"shape": list(sequence.shape)})
        return sequence

    def probe(self) -> None:
        """Injection-free runs whose traces drive schedule detection"""
        SimulateDenoisingUseCase(self.model(), self.probe_traces).execute(
            self.load_input(),
            self.config.noise_schedule(),
            seed=derive_seed(self.config.seed, "probe"),
            samples=self.config.simulation.samples,
            prefix="probe",
        )
        self.artifacts.record_tree(PROBE_TRACE_DIR)

    def schedule(self) -> InjectionSchedule:
        section = self.config.schedule
        explicit_map = None
        if section.timestep_scale is not None:
            explicit_map = section.timestep_map(self.config.noise.steps)
        use_case = BuildInjectionScheduleUseCase(
            self.schedule_traces, self._schedule_service
        )
        schedule = use_case.execute(
            fallback=section.fallback,
            timestep_map=explicit_map,
            fixed=self.config.fixed_schedule(),
        )
        self.artifacts.write_bytes(
            SCHEDULE_FILE,
            encode_schedule_json(
                schedule,
                self._schedule_service.config,
                section.timestep_map(schedule.steps),
            ),
        )
        return schedule

    def simulate(self) -> None:
        groups = PrimitiveGroups.none()
        if self.config.simulation.injection:
            groups = EncodingService(self.bank()).encode_primitive_groups(
                self.load_split()
            )
        result = SimulateDenoisingUseCase(self.model(), self.run_traces).execute(
            self.load_input(),
            self.config.noise_schedule(),
            seed=derive_seed(self.config.seed, "run"),
            samples=self.config.simulation.samples,
            groups=groups,
            schedule=self.load_schedule(),
            order=self.config.schedule.injection_order(),
            anchor=self.config.simulation.anchor,
            prefix="run",
        )
        self.artifacts.write_bytes(
            LATENT_FILE,
            encode_tseq(TokenSequence(result.mean_latent, provenance="latent")),
        )
        self.artifacts.record_tree(RUN_TRACE_DIR)

    def finalize(self) -> Dict[str, str]:
        """Write the effective config and a manifest over every artifact present"""
        self.artifacts.write_bytes(CONFIG_FILE, self.config.to_json().encode("utf-8"))
        for name in _TRACKED_FILES:
            if self.artifacts.exists(name):
                self.artifacts.record(name)
        for directory in (PROBE_TRACE_DIR, RUN_TRACE_DIR):
            if (self.artifacts.root / directory).is_dir():
                self.artifacts.record_tree(directory)
        self.artifacts.write_manifest()
        return self.artifacts.manifest()

    async def run_stage(self, name: str):
        """Run one stage; domain and unexpected failures surface as StageFailedError"""
        handler: Optional[Callable] = getattr(self, name, None)
        if name not in PIPELINE_STAGES or handler is None:
            raise ConfigurationError(f"Unknown stage: {name}")
        logger.info("Stage started", extra={"stage": name})
        try:
            result = handler()
            if inspect.isawaitable(result):
                result = await result
        except ConfigurationError:
            raise
        except StageFailedError:
            raise
        except SplitDitError as e:
            logger.error(
                "Stage failed", extra={"stage": name, "error_code": e.error_code}
            )
            raise StageFailedError(name, e)
        except Exception as e:
            logger.exception("Stage crashed", extra={"stage": name})
            raise StageFailedError(name, e)
        logger.info("Stage finished", extra={"stage": name})
        return result


class RunPipelineUseCase:

    def __init__(self, stages: PipelineStages):
        self._stages = stages

    async def execute(self, only: Sequence[str] = PIPELINE_STAGES) -> RunSummaryDTO:
        completed: List[str] = []
        for name in only:
            await self._stages.run_stage(name)
            completed.append(name)

        manifest = self._stages.finalize()
        schedule = None
        if self._stages.artifacts.exists(SCHEDULE_FILE):
            schedule = self._stages.load_schedule()
        return RunSummaryDTO(
            output_dir=self._stages.artifacts.root,
            schedule=schedule,
            manifest=manifest,
            stages=completed,
        )
