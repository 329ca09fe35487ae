from dataclasses import dataclass
from typing import Tuple

import numpy as np

from domain.exceptions.simulation_exceptions import SimulationError


@dataclass(frozen=True)
class NoiseSchedule:
    """Strictly decreasing noise levels sigma_0 > ... > sigma_{S-1} inside (0, 1)"""

    sigmas: Tuple[float, ...]

    def __post_init__(self):
        sigmas = tuple(float(s) for s in self.sigmas)
        if not sigmas:
            raise SimulationError("Noise schedule needs at least one step")
        if not all(0.0 < s < 1.0 for s in sigmas):
            raise SimulationError("Noise levels must lie inside (0, 1)")
        if any(a <= b for a, b in zip(sigmas, sigmas[1:])):
            raise SimulationError("Noise levels must be strictly decreasing")
        object.__setattr__(self, "sigmas", sigmas)

    @classmethod
    def uniform(cls, steps: int) -> "NoiseSchedule":
        return cls(tuple(1.0 - (u + 1) / (steps + 1) for u in range(steps)))

    @classmethod
    def sampled(cls, steps: int, seed: int, horizon: int = 1000) -> "NoiseSchedule":
        """Draw `steps` distinct labels from 1..horizon-1, as in random step selection"""
        if steps > horizon - 1:
            raise SimulationError("More steps requested than labels available")
        rng = np.random.default_rng(seed)
        labels = np.sort(rng.choice(np.arange(1, horizon), size=steps, replace=False))
        return cls(tuple(1.0 - float(label) / horizon for label in labels))

    @property
    def steps(self) -> int:
        return len(self.sigmas)

    def sigma(self, step: int) -> float:
        return self.sigmas[step]

    def next_sigma(self, step: int) -> float:
        """Noise level after the Euler update of `step`; the path ends at 0"""
        return self.sigmas[step + 1] if step + 1 < self.steps else 0.0


def snr_of_step(step: int, schedule: NoiseSchedule) -> float:
    """SNR of the linear path x = (1 - sigma) x0 + sigma eps"""
    sigma = schedule.sigma(step)
    return ((1.0 - sigma) / sigma) ** 2
