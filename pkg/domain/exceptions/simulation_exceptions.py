from domain.exceptions.base_exceptions import SplitDitError


class SimulationError(SplitDitError):
    error_code = "SIMULATION_ERROR"


class EmptyPrimitivesError(SimulationError):
    error_code = "EMPTY_PRIMITIVES"

    def __init__(self):
        super().__init__("Cross-attention injection needs at least one key token")


class NonFiniteLatentError(SimulationError):
    error_code = "NON_FINITE_LATENT"

    def __init__(self, step: int):
        super().__init__(f"Latent became non-finite at step {step}", {"step": step})
        self.step = step
