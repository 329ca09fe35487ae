import numpy as np
import pytest

from application.use_cases.build_injection_schedule import BuildInjectionScheduleUseCase
from application.use_cases.simulate_denoising import SimulateDenoisingUseCase
from domain.exceptions.schedule_exceptions import ScheduleError
from domain.services.encoding_service import EncodingService
from domain.services.schedule_service import ScheduleService
from domain.services.split_text_service import SplitTextService
from domain.value_objects.injection_schedule import InjectionSchedule
from domain.value_objects.noise_schedule import NoiseSchedule
from domain.value_objects.schedule_config import ScheduleConfig
from infrastructure.repositories.jsonl_trace_repository import JsonlTraceRepository
from infrastructure.simulation.toy_dit import ToyDiT, ToyDiTConfig
from tests.helpers.mock_factories import TEDDY_CAPTION, TraceFactory


class TestBuildInjectionScheduleUseCase:
    def test_detects_from_stored_traces(self, tmp_path):
        service = ScheduleService(ScheduleConfig())
        repository = JsonlTraceRepository(tmp_path)
        for trace in TraceFactory.planted_batch(steps=20, knee=4, converge=10):
            repository.save(trace)

        schedule = BuildInjectionScheduleUseCase(repository, service).execute()

        assert schedule.slots == (0, 4, 10)

    def test_fixed_steps_skip_detection(self, tmp_path):
        fixed = InjectionSchedule.fixed(8, 30, 40)

        use_case = BuildInjectionScheduleUseCase(
            JsonlTraceRepository(tmp_path), ScheduleService(ScheduleConfig())
        )

        schedule = use_case.execute(fixed=fixed)

        assert schedule.slots == (0, 8, 30)
        assert schedule.windows["rel"] == (6, 10)
        assert schedule.notes == ("fixed steps",)

    def test_no_traces(self, tmp_path):
        with pytest.raises(ScheduleError, match="No probe traces"):
            BuildInjectionScheduleUseCase(
                JsonlTraceRepository(tmp_path), ScheduleService()
            ).execute()


class TestSimulateDenoisingUseCase:
    @pytest.fixture
    def inputs(self, teddy_graph, toy_bank):
        split = SplitTextService().build_split_caption(teddy_graph)
        encoding = EncodingService(toy_bank)
        return (
            encoding.build_input_sequence(split, TEDDY_CAPTION),
            encoding.encode_primitive_groups(split),
        )

    @pytest.fixture
    def model(self):
        return ToyDiT.build(ToyDiTConfig(width=32, layers=1, heads=2, latent_tokens=4, seed=2))

    def test_stores_one_trace_per_sample(self, tmp_path, inputs, model):
        sequence, groups = inputs
        repository = JsonlTraceRepository(tmp_path)

        result = SimulateDenoisingUseCase(model, repository).execute(
            sequence, NoiseSchedule.uniform(6), seed=1, samples=3,
            groups=groups, schedule=InjectionSchedule.fixed(1, 4, 6), prefix="run",
        )

        assert repository.sample_ids() == ["run-0000", "run-0001", "run-0002"]
        assert [t.sample_id for t in result.traces] == repository.sample_ids()
        assert result.mean_latent.shape == (4, 32)
        assert result.traces[0].inject_key_counts()[4] == 14

    def test_samples_use_distinct_seeds(self, inputs, model):
        sequence, _ = inputs

        result = SimulateDenoisingUseCase(model).execute(
            sequence, NoiseSchedule.uniform(3), seed=1, samples=2
        )

        assert not np.array_equal(result.latents[0], result.latents[1])

    def test_empty_groups_disable_injection(self, inputs, model):
        sequence, _ = inputs

        result = SimulateDenoisingUseCase(model).execute(
            sequence, NoiseSchedule.uniform(4), seed=0, samples=1,
            schedule=InjectionSchedule.fixed(1, 2, 4),
        )

        assert result.traces[0].inject_key_counts() == [0, 0, 0, 0]
