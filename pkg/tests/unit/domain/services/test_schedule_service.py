import numpy as np
import pytest

from domain.exceptions.schedule_exceptions import (
    DegenerateAxisError,
    InconsistentTracesError,
    NoConvergenceError,
    ShapeMismatchError,
    TooFewStepsError,
)
from domain.services.schedule_service import ScheduleService
from domain.value_objects.schedule_config import ScheduleConfig
from tests.helpers.mock_factories import TraceFactory


@pytest.fixture
def service():
    return ScheduleService(ScheduleConfig())


class TestAttentionStepDiff:
    def test_identity_against_swap(self):
        identity = np.eye(2)
        swap = identity[::-1]
        service = ScheduleService(ScheduleConfig(theta=1e-12))
        assert service.attention_step_diff(swap, identity) == pytest.approx(np.sqrt(2))

    def test_no_change_is_zero(self, service):
        a = np.full((2, 3), 1.0 / 3)
        assert service.attention_step_diff(a, a) == 0.0

    def test_shape_mismatch(self, service):
        with pytest.raises(ShapeMismatchError):
            service.attention_step_diff(np.ones((2, 2)), np.ones((2, 3)))


class TestDetectConvergence:
    def test_reference_series(self, service):
        diffs = np.array([0.5, 0.3, 0.1, 5e-5, 2e-5, 1e-5])

        smoothed = ScheduleService.moving_average(diffs, 3)

        assert smoothed[2] == pytest.approx(3.34e-2, rel=1e-2)
        assert smoothed[3] == pytest.approx(2.67e-5, rel=1e-2)
        assert service.detect_convergence(diffs) == 6

    def test_all_zero_converges_at_first_full_window(self, service):
        assert service.detect_convergence(np.zeros(10)) == 3

    def test_never_converges(self, service):
        with pytest.raises(NoConvergenceError):
            service.detect_convergence(np.ones(10))

    def test_series_shorter_than_window(self, service):
        with pytest.raises(TooFewStepsError):
            service.detect_convergence(np.zeros(2))

    def test_window_comes_from_config(self):
        diffs = np.array([0.5, 5e-5, 0.3, 1e-5, 1e-5, 1e-5])
        assert ScheduleService(ScheduleConfig(w=1)).detect_convergence(diffs) == 2
        assert ScheduleService(ScheduleConfig(w=3)).detect_convergence(diffs) == 6

    def test_matches_brute_force(self, service):
        rng = np.random.default_rng(0)
        for _ in range(200):
            n = int(rng.integers(5, 60))
            decay = np.exp(-rng.uniform(0.0, 1.0) * np.arange(n))
            diffs = np.abs(rng.normal(size=n)) * decay
            expected = next(
                (t + 3 for t in range(n - 2) if diffs[t : t + 3].mean() < 1e-4), None
            )
            if expected is None:
                with pytest.raises(NoConvergenceError):
                    service.detect_convergence(diffs)
            else:
                assert service.detect_convergence(diffs) == expected


class TestCurvatureSeries:
    def test_parabola(self):
        x = np.arange(5, dtype=float)

        kappa = ScheduleService.curvature_series(x**2, x)

        assert kappa[0] == pytest.approx(0.17889, abs=1e-5)
        assert kappa[1] == pytest.approx(0.02853, abs=1e-5)
        assert int(np.argmax(kappa)) + 1 == 1

    def test_straight_line_and_constant(self):
        x = np.arange(5, dtype=float)
        assert np.all(ScheduleService.curvature_series(2 * x + 1, x) <= 1e-9)
        assert np.all(ScheduleService.curvature_series(np.full(5, 3.0), x) == 0.0)

    def test_degenerate_axis(self):
        with pytest.raises(DegenerateAxisError):
            ScheduleService.curvature_series(np.arange(3.0), np.array([1.0, 2.0, 1.0]))

    def test_too_few_points(self):
        with pytest.raises(TooFewStepsError):
            ScheduleService.curvature_series(np.arange(2.0), np.arange(2.0))


class TestBatchAggregation:
    def test_aggregate_diffs_length(self, service):
        traces = TraceFactory.planted_batch(steps=20, knee=4, converge=10)
        assert service.aggregate_diffs(traces).shape == (19,)
        assert service.mean_snr(traces).shape == (20,)

    def test_inconsistent_step_counts(self, service):
        traces = [TraceFactory.constant(6, "a"), TraceFactory.constant(7, "b")]
        with pytest.raises(InconsistentTracesError):
            service.aggregate_diffs(traces)

    def test_empty_batch(self, service):
        with pytest.raises(InconsistentTracesError):
            service.mean_snr([])

    def test_sample_order_does_not_matter(self, service):
        traces = TraceFactory.planted_batch(steps=20, knee=4, converge=10)
        np.testing.assert_array_equal(
            service.aggregate_diffs(traces), service.aggregate_diffs(traces[::-1])
        )


class TestBuildSchedule:
    @pytest.mark.parametrize(
        "steps,knee,converge", [(20, 4, 10), (40, 7, 30), (12, 1, 5), (30, 14, 16)]
    )
    def test_recovers_planted_steps(self, service, steps, knee, converge):
        traces = TraceFactory.planted_batch(steps, knee, converge)

        schedule = service.build_schedule(traces)

        assert (schedule.s_obj, schedule.s_rel, schedule.s_attr) == (0, knee, converge)
        assert schedule.steps == steps
        assert schedule.notes == ()

    def test_inflection_on_planted_knee(self, service):
        traces = TraceFactory.planted_batch(steps=20, knee=4, converge=10)
        assert service.detect_inflection(traces, 10) == 4

    def test_fallback_when_attention_never_settles(self):
        traces = [TraceFactory.planted(steps=20, knee=4, converge=19)]
        service = ScheduleService(ScheduleConfig(w=5))

        with pytest.raises(NoConvergenceError):
            service.build_schedule(traces)

        schedule = service.build_schedule(traces, fallback=True)
        assert schedule.s_attr == 10
        assert 0 <= schedule.s_rel < schedule.s_attr
        assert "no convergence" in schedule.notes[0]

    def test_windows_follow_timestep_map(self, service):
        windows = service.schedule_windows(10, 30, 40)

        assert windows["obj"] == (0, 0)
        assert windows["rel"] == (8, 12)
        assert windows["attr"] == (29, 31)
