from typing import Optional

import httpx

from application.dto.llm_dto import NetPolicy
from application.interfaces.llm_service import LLMServiceInterface
from application.use_cases.parse_caption import ParseCaptionUseCase
from application.use_cases.run_pipeline import PipelineStages
from domain.services.caption_grammar import RuleBasedParser
from domain.services.graph_service import GraphService
from domain.services.primitive_merger import PrimitiveMerger
from domain.services.schedule_service import ScheduleService
from domain.services.split_text_service import SplitTextService
from infrastructure.config.pipeline_config import PipelineConfig
from infrastructure.config.settings import Settings, get_settings
from infrastructure.external.llm_service_impl import LLMServiceImpl
from infrastructure.external.openai_client import OpenAIClient
from infrastructure.repositories.file_parser_cache import FileParserCache


class Container:
    """Builds services lazily from the process settings.

    `http_client` lets tests route the LLM client through a mock transport.
    """

    def __init__(
        self,
        settings: Optional[Settings] = None,
        http_client: Optional[httpx.AsyncClient] = None,
    ):
        self.settings = settings or get_settings()
        self._http_client = http_client
        self._instances = {}

    def get_openai_client(self, timeout_s: float) -> Optional[OpenAIClient]:
        if not self.settings.llm_key:
            return None
        if "openai_client" not in self._instances:
            self._instances["openai_client"] = OpenAIClient(
                api_key=self.settings.llm_key,
                base_url=self.settings.llm_url,
                timeout_s=timeout_s,
                http_client=self._http_client,
            )
        return self._instances["openai_client"]

    def get_llm_service(self, cache_dir: Optional[str] = None) -> LLMServiceInterface:
        directory = cache_dir or self.settings.cache
        key = f"llm_service:{directory}"
        if key not in self._instances:
            self._instances[key] = LLMServiceImpl(
                cache=FileParserCache(directory),
                client_factory=self.get_openai_client,
            )
        return self._instances[key]

    def _shared(self, key: str, factory):
        if key not in self._instances:
            self._instances[key] = factory()
        return self._instances[key]

    def get_primitive_merger(self) -> PrimitiveMerger:
        return self._shared("primitive_merger", PrimitiveMerger)

    def get_rule_parser(self) -> RuleBasedParser:
        return self._shared(
            "rule_parser", lambda: RuleBasedParser(merger=self.get_primitive_merger())
        )

    def get_graph_service(self) -> GraphService:
        return self._shared("graph_service", GraphService)

    def get_split_text_service(self, config: PipelineConfig) -> SplitTextService:
        return SplitTextService(
            self.get_graph_service(), token_budget=config.encoder.token_budget
        )

    def get_schedule_service(self, config: PipelineConfig) -> ScheduleService:
        return ScheduleService(config.schedule.to_domain())

    def get_parse_use_case(self, config: PipelineConfig) -> ParseCaptionUseCase:
        return ParseCaptionUseCase(
            llm_service=self.get_llm_service(config.cache_dir),
            model=self.settings.llm_model,
            policy=NetPolicy(
                allow_network=config.llm.allow_network,
                max_retries=config.llm.max_retries,
                timeout_s=config.llm.timeout_s,
            ),
            max_repairs=config.llm.max_repairs,
            rule_parser=self.get_rule_parser(),
            merger=self.get_primitive_merger(),
        )

    def get_pipeline_stages(self, config: PipelineConfig) -> PipelineStages:
        return PipelineStages(
            config,
            parse_use_case=self.get_parse_use_case(config),
            graph_service=self.get_graph_service(),
            split_text_service=self.get_split_text_service(config),
            schedule_service=self.get_schedule_service(config),
        )
