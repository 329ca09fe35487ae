from domain.exceptions.base_exceptions import SplitDitError


class TrainingError(SplitDitError):
    error_code = "TRAINING_ERROR"


class NonFiniteLossError(TrainingError):
    error_code = "NON_FINITE_LOSS"

    def __init__(self, step: int):
        super().__init__(f"Loss became non-finite at step {step}", {"step": step})
        self.step = step


class EmptySpanError(TrainingError):
    error_code = "EMPTY_SPAN"

    def __init__(self, span):
        super().__init__(f"Alignment span {span} is empty", {"span": list(span)})
