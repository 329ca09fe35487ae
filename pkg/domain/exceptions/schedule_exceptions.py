from domain.exceptions.base_exceptions import SplitDitError


class ScheduleError(SplitDitError):
    error_code = "SCHEDULE_ERROR"


class ShapeMismatchError(ScheduleError):
    error_code = "SHAPE_MISMATCH"


class InconsistentTracesError(ScheduleError):
    error_code = "INCONSISTENT_TRACES"


class NoConvergenceError(ScheduleError):
    error_code = "NO_CONVERGENCE"

    def __init__(self, tau: float, minimum: float):
        super().__init__(
            f"Moving-average attention change never fell below tau={tau}",
            {"tau": tau, "min_moving_average": minimum},
        )


class DegenerateAxisError(ScheduleError):
    error_code = "DEGENERATE_AXIS"

    def __init__(self, index: int):
        super().__init__(
            f"x[{index - 1}] == x[{index + 1}]; central difference undefined",
            {"index": index},
        )


class TooFewStepsError(ScheduleError):
    error_code = "TOO_FEW_STEPS"

    def __init__(self, available: int, required: int = 3):
        super().__init__(
            f"Curvature needs at least {required} points, got {available}",
            {"available": available, "required": required},
        )


class OrderingViolationError(ScheduleError):
    error_code = "ORDERING_VIOLATION"

    def __init__(self, s_rel: int, s_attr: int):
        super().__init__(
            f"Inflection step {s_rel} is not before convergence step {s_attr}",
            {"s_rel": s_rel, "s_attr": s_attr},
        )
