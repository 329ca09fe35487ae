from domain.exceptions.base_exceptions import SplitDitError


class EncodingError(SplitDitError):
    error_code = "ENCODING_ERROR"


class EmptyTextError(EncodingError):
    error_code = "EMPTY_TEXT"

    def __init__(self, encoder: str):
        super().__init__(f"Encoder {encoder} received empty text", {"encoder": encoder})


class DimMismatchError(EncodingError):
    error_code = "DIM_MISMATCH"


class MixedKindsError(EncodingError):
    error_code = "MIXED_KINDS"


class EmptyGroupError(EncodingError):
    error_code = "EMPTY_GROUP"
