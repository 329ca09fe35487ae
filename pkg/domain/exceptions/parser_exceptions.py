from domain.exceptions.base_exceptions import SplitDitError


class ParserError(SplitDitError):
    error_code = "PARSER_ERROR"


class CacheMissError(ParserError):
    error_code = "CACHE_MISS"

    def __init__(self, key: str):
        super().__init__(
            "No cached LLM response and network access is disabled", {"key": key}
        )
        self.key = key


class TransportError(ParserError):
    error_code = "TRANSPORT_ERROR"

    def __init__(self, message: str, attempts: int):
        super().__init__(message, {"attempts": attempts})
        self.attempts = attempts


class AuthMissingError(ParserError):
    error_code = "AUTH_MISSING"

    def __init__(self, variable: str):
        super().__init__(
            f"No LLM credential configured (set {variable})", {"variable": variable}
        )


class UnparseableResponseError(ParserError):
    error_code = "UNPARSEABLE_RESPONSE"

    def __init__(self, attempts: int, last_error: str):
        super().__init__(
            f"LLM response failed schema validation after {attempts} attempts",
            {"attempts": attempts, "last_error": last_error},
        )


class GrammarError(ParserError):
    """Caption outside the controlled mini-grammar; offset is a UTF-8 byte offset"""

    error_code = "GRAMMAR_ERROR"

    def __init__(self, offset: int, token: str, reason: str):
        super().__init__(
            f"Cannot parse token {token!r} at byte {offset}: {reason}",
            {"offset": offset, "token": token},
        )
        self.offset = offset
        self.token = token
