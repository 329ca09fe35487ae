from typing import Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Process environment: LLM endpoint, cache location, logging, threads"""

    app_name: str = "split-dit"

    llm_url: Optional[str] = Field(default=None, description="OpenAI-compatible base URL")
    llm_key: Optional[str] = Field(default=None, description="Credential for the LLM endpoint")
    llm_model: str = Field(default="qwen-plus")

    cache: str = Field(default="./storage/llm-cache", description="LLM response cache directory")

    log_level: str = Field(default="INFO")
    external_libs_log_level: str = Field(default="WARNING")

    threads: int = Field(default=1, ge=1)

    model_config = SettingsConfigDict(
        env_prefix="SPLITDIT_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    @field_validator("log_level", "external_libs_log_level")
    @classmethod
    def normalize_level(cls, v: str) -> str:
        level = v.upper()
        if level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"Unknown log level: {v}")
        return level


def get_settings() -> Settings:
    return Settings()
