from domain.exceptions.base_exceptions import SplitDitError


class SplitTextError(SplitDitError):
    error_code = "SPLIT_TEXT_ERROR"


class ArityMismatchError(SplitTextError):
    error_code = "ARITY_MISMATCH"

    def __init__(self, kind: str, expected: int, got: int):
        super().__init__(
            f"{kind} sentence takes {expected} arguments, got {got}",
            {"kind": kind, "expected": expected, "got": got},
        )
