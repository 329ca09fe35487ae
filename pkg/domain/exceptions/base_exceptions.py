"""
Root exception of the split-text toolkit
"""
from typing import Any, Dict, Optional


class SplitDitError(Exception):
    """Base for every error raised by the toolkit"""

    error_code = "SPLITDIT_ERROR"

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def __str__(self) -> str:
        if self.details:
            return f"{self.message} - details: {self.details}"
        return self.message
