from domain.exceptions.base_exceptions import SplitDitError


class PipelineError(SplitDitError):
    error_code = "PIPELINE_ERROR"


class StageFailedError(PipelineError):
    """Wraps the failure of one pipeline stage; the CLI prints `stage`"""

    error_code = "STAGE_FAILED"

    def __init__(self, stage: str, cause: Exception):
        super().__init__(
            f"Stage '{stage}' failed: {cause}",
            {"stage": stage, "cause": type(cause).__name__},
        )
        self.stage = stage
        self.cause = cause


class MissingArtifactError(PipelineError):
    error_code = "MISSING_ARTIFACT"

    def __init__(self, path: str):
        super().__init__(f"Required artifact not found: {path}", {"path": path})


class ConfigurationError(PipelineError):
    error_code = "CONFIGURATION_ERROR"
