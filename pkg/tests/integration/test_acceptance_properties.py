"""Property sweeps over generated inputs; run with `pytest -m slow`"""
import numpy as np
import pytest

from domain.exceptions.encoding_exceptions import DimMismatchError
from domain.exceptions.schedule_exceptions import NoConvergenceError
from domain.services.caption_grammar import RuleBasedParser
from domain.services.encoding_service import EncodingService
from domain.services.graph_service import GraphService
from domain.services.schedule_service import ScheduleService
from domain.services.split_text_service import SplitTextService
from domain.value_objects.injection_schedule import InjectionSchedule
from domain.value_objects.noise_schedule import NoiseSchedule
from domain.value_objects.primitive_kind import PrimitiveKind
from domain.value_objects.schedule_config import ScheduleConfig
from infrastructure.encoders.encoder_bank import build_encoder_bank
from infrastructure.repositories.jsonl_trace_repository import JsonlTraceRepository
from infrastructure.serialization.graph_codec import decode_graph_json, encode_graph_json
from infrastructure.simulation.denoiser import denoise_run
from infrastructure.simulation.toy_dit import ToyDiT, ToyDiTConfig
from tests.helpers.mock_factories import TEDDY_CAPTION, CaptionFactory, TraceFactory

pytestmark = [pytest.mark.slow, pytest.mark.integration]


def brute_force_convergence(diffs, w, tau):
    for end in range(w, len(diffs) + 1):
        if sum(diffs[end - w : end]) / w < tau:
            return end
    return None


def direct_curvature(y, x):
    values = []
    for t in range(1, len(y) - 1):
        span = x[t + 1] - x[t - 1]
        first = (y[t + 1] - y[t - 1]) / span
        second = (y[t + 1] - 2.0 * y[t] + y[t - 1]) / (span / 2.0) ** 2
        values.append(abs(second) / (1.0 + first**2) ** 1.5)
    return np.array(values)


class TestScheduleDetectors:
    def test_convergence_matches_brute_force(self):
        service = ScheduleService(ScheduleConfig(w=3, tau=1e-4))
        rng = np.random.default_rng(2024)
        for _ in range(1000):
            n = int(rng.integers(5, 201))
            if rng.random() < 0.5:
                diffs = np.exp(-rng.uniform(0.05, 1.0) * np.arange(n))
            else:
                diffs = np.abs(rng.normal(scale=1e-3, size=n))
            expected = brute_force_convergence(diffs, 3, 1e-4)
            if expected is None:
                with pytest.raises(NoConvergenceError):
                    service.detect_convergence(diffs)
            else:
                assert service.detect_convergence(diffs) == expected

    def test_curvature_matches_direct_evaluation(self):
        rng = np.random.default_rng(99)
        for _ in range(1000):
            n = int(rng.integers(3, 60))
            x = np.cumsum(rng.uniform(0.1, 2.0, size=n))
            y = rng.normal(size=n)
            np.testing.assert_allclose(
                ScheduleService.curvature_series(y, x),
                direct_curvature(y, x),
                rtol=1e-9,
            )

    def test_affine_snr_has_no_curvature_on_index_axis(self):
        service = ScheduleService(ScheduleConfig())
        rng = np.random.default_rng(100)
        for _ in range(1000):
            n = int(rng.integers(3, 60))
            slope, intercept = rng.normal(size=2)
            snr = slope * np.arange(n) + intercept

            x, y = service.curvature_axes(snr)

            assert np.all(service.curvature_series(y, x) <= 1e-9)

    def test_planted_schedules_are_recovered(self):
        service = ScheduleService(ScheduleConfig())
        rng = np.random.default_rng(5)
        for _ in range(100):
            converge = int(rng.integers(4, 40))
            knee = int(rng.integers(1, converge - 1))
            steps = converge + int(rng.integers(1, 20))
            traces = TraceFactory.planted_batch(steps, knee, converge)

            schedule = service.build_schedule(traces)

            assert (schedule.s_obj, schedule.s_rel, schedule.s_attr) == (0, knee, converge)


class TestParsingAndSplitting:
    def test_generated_captions(self):
        parser = RuleBasedParser()
        graphs = GraphService()
        splitter = SplitTextService(graphs)
        for generated in CaptionFactory.generate(seed=123, count=10_000):
            prims = parser.parse(generated.caption)
            graph = graphs.assemble_graph(generated.caption, prims)

            payload = encode_graph_json(graph)
            assert encode_graph_json(decode_graph_json(payload)) == payload
            degrees = sum(graphs.node_degree(graph, node.id) for node in graph.nodes)
            assert degrees == 2 * len(graph.edges)

            split = splitter.build_split_caption(graph)
            attribute_count = sum(len(node.attributes) for node in graph.nodes)
            assert len(split) == len(graph.nodes) + len(graph.edges) + attribute_count
            kinds = [sentence.kind for sentence in split.sentences]
            assert kinds == sorted(kinds, key=list(PrimitiveKind).index)
            permutation = splitter.rerank_primitives(graph).permutation
            assert sorted(permutation) == list(range(len(graph.nodes)))


class TestEncodingShapeLaw:
    def test_random_widths(self, teddy_graph):
        split = SplitTextService().build_split_caption(teddy_graph)
        rng = np.random.default_rng(8)
        for _ in range(100):
            d_l, d_g = (int(v) for v in rng.integers(2, 9, size=2))
            d = d_l + d_g + int(rng.integers(1, 17))
            bank = build_encoder_bank(d_l=d_l, d_g=d_g, d=d, seed=int(rng.integers(1000)))

            sequence = EncodingService(bank).build_input_sequence(split, TEDDY_CAPTION)
            assert sequence.shape == (28, d)

            wrong = bank.with_proj(np.zeros((d, d - d_l - d_g + 1)))
            with pytest.raises(DimMismatchError):
                EncodingService(wrong).build_input_sequence(split, TEDDY_CAPTION)


class TestSimulatorInvariants:
    def test_seeded_runs(self, teddy_graph, toy_bank, tmp_path):
        split = SplitTextService().build_split_caption(teddy_graph)
        encoding = EncodingService(toy_bank)
        sequence = encoding.build_input_sequence(split, TEDDY_CAPTION)
        groups = encoding.encode_primitive_groups(split)
        schedule = InjectionSchedule.fixed(8, 30, 40)
        noise = NoiseSchedule.uniform(40)
        model = ToyDiT.build(ToyDiTConfig(width=32, layers=2, heads=2, latent_tokens=4, seed=0))
        repository = JsonlTraceRepository(tmp_path)

        for seed in range(20):
            sample_id = f"run-{seed:04d}"
            latent, trace = denoise_run(
                model, sequence, groups, schedule, noise, seed=seed, sample_id=sample_id
            )
            again, _ = denoise_run(model, sequence, groups, schedule, noise, seed=seed)
            assert latent.tobytes() == again.tobytes()

            counts = trace.inject_key_counts()
            changes = [u for u in range(1, 40) if counts[u] != counts[u - 1]]
            assert changes == [8, 30]
            assert counts == sorted(counts)
            for record in trace.steps:
                np.testing.assert_allclose(record.attn.sum(axis=-1), 1.0, atol=1e-5)
                np.testing.assert_allclose(record.inject_attn.sum(axis=-1), 1.0, atol=1e-5)

            repository.save(trace)
            loaded = repository.load(sample_id)
            assert loaded.inject_key_counts() == counts
            np.testing.assert_array_equal(loaded.steps[-1].attn, trace.steps[-1].attn)
