import math

import numpy as np
import pytest
import torch

from domain.exceptions.training_exceptions import EmptySpanError
from domain.value_objects.injection_schedule import InjectionSchedule
from infrastructure.simulation.toy_dit import AttentionMaps, ToyDiTConfig
from infrastructure.training.dataset import SyntheticDataset
from infrastructure.training.losses import (
    LossConfig,
    attn_alignment_loss,
    cfm_loss,
    combine_losses,
    loss_breakdown,
)
from infrastructure.training.trainer import TrainingConfig, build_system
from infrastructure.training.velocity_models import target_velocity

SMALL_MODEL = ToyDiTConfig(width=32, layers=1, heads=2, latent_tokens=4)


@pytest.fixture
def batch(toy_bank):
    dataset = SyntheticDataset(toy_bank, size=3, seed=0, latent_tokens=4)
    return dataset.batch(InjectionSchedule.fixed(8, 30, 40), seed=1)


@pytest.fixture
def system(toy_bank):
    return build_system(TrainingConfig(model=SMALL_MODEL), toy_bank)


class TestCfmLoss:
    def test_exact_velocity_has_zero_loss(self, batch):
        def oracle(b):
            return target_velocity(b), AttentionMaps()

        assert cfm_loss(oracle, batch).item() == 0.0

    def test_zero_head_loss_is_velocity_energy(self, batch, system):
        expected = torch.mean(target_velocity(batch) ** 2)
        assert torch.isclose(cfm_loss(system, batch), expected)


class TestAlignmentLoss:
    def test_matches_direct_kl(self):
        rng = np.random.default_rng(0)
        attn = rng.dirichlet(np.ones(4), size=(1, 1, 2))
        span, eps = [1, 2], 1e-6

        loss = attn_alignment_loss(torch.from_numpy(attn), span, smoothing=eps)

        smoothed = (attn + eps) / (1 + 4 * eps)
        expected = np.mean(
            [sum(0.5 * math.log(0.5 / row[k]) for k in span) for row in smoothed.reshape(-1, 4)]
        )
        assert loss.item() == pytest.approx(expected, rel=1e-10)

    def test_aligned_attention_is_near_zero(self):
        attn = torch.tensor([0.0, 0.5, 0.5, 0.0], dtype=torch.float64).expand(1, 1, 3, 4)
        assert attn_alignment_loss(attn, [1, 2]).item() < 1e-5

    def test_bounded_without_mass_on_span(self):
        attn = torch.tensor([1.0, 0.0], dtype=torch.float64).expand(1, 1, 1, 2)

        loss = attn_alignment_loss(attn, [1])

        assert loss.item() == pytest.approx(math.log((1 + 2e-6) / 1e-6), rel=1e-9)
        assert attn_alignment_loss(attn, [1], ceiling=1.0).item() == 1.0

    def test_span_mass_mode(self):
        attn = torch.tensor([0.2, 0.3, 0.5], dtype=torch.float64).expand(1, 1, 1, 3)

        loss = attn_alignment_loss(attn, [1, 2], smoothing=0.0, mode="span_mass")

        assert loss.item() == pytest.approx(-math.log(0.8))

    def test_empty_span(self):
        with pytest.raises(EmptySpanError):
            attn_alignment_loss(torch.full((1, 1, 1, 2), 0.5), [])


class TestCompositeLoss:
    def test_total_is_affine_in_lambda(self, batch, system):
        low = loss_breakdown(system, batch, LossConfig(lam=0.0))
        high = loss_breakdown(system, batch, LossConfig(lam=2.0))

        assert low.total.item() == pytest.approx(low.cfm.item())
        assert high.total.item() == pytest.approx(low.cfm.item() + 2.0 * low.attn.item())
        assert low.attn.item() > 0

    def test_combine(self):
        assert combine_losses(torch.tensor(1.0), torch.tensor(3.0), 0.5).item() == 2.5

    def test_invalid_config(self):
        with pytest.raises(ValueError):
            LossConfig(lam=-1.0)
        with pytest.raises(ValueError):
            LossConfig(attn_target_mode="cosine")
