import pytest

from domain.exceptions.simulation_exceptions import SimulationError
from domain.value_objects.noise_schedule import NoiseSchedule, snr_of_step


class TestNoiseSchedule:
    def test_uniform_levels(self):
        noise = NoiseSchedule.uniform(4)
        assert noise.sigmas == pytest.approx((0.8, 0.6, 0.4, 0.2))
        assert noise.steps == 4

    def test_next_sigma_ends_at_zero(self):
        noise = NoiseSchedule.uniform(3)
        assert noise.next_sigma(0) == pytest.approx(0.5)
        assert noise.next_sigma(2) == 0.0

    def test_sampled_is_seeded_and_decreasing(self):
        first = NoiseSchedule.sampled(40, seed=7)
        again = NoiseSchedule.sampled(40, seed=7)
        assert first == again
        assert all(a > b for a, b in zip(first.sigmas, first.sigmas[1:]))
        assert all(0.0 < s < 1.0 for s in first.sigmas)

    def test_sampled_needs_enough_labels(self):
        with pytest.raises(SimulationError):
            NoiseSchedule.sampled(1000, seed=0)

    def test_rejects_non_decreasing(self):
        with pytest.raises(SimulationError, match="strictly decreasing"):
            NoiseSchedule((0.5, 0.5))

    def test_rejects_out_of_range(self):
        with pytest.raises(SimulationError):
            NoiseSchedule((1.0, 0.5))

    def test_snr_of_step(self):
        noise = NoiseSchedule((0.5, 0.2))
        assert snr_of_step(0, noise) == pytest.approx(1.0)
        assert snr_of_step(1, noise) == pytest.approx(16.0)
