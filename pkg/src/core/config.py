"""
Core Configuration - runtime settings
"""
from typing import Optional

from pydantic import BaseModel, ConfigDict, ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict

from src.core.exceptions import ConfigError


class Settings(BaseSettings):
    """Application settings loaded from environment variables"""

    model_config = SettingsConfigDict(
        env_prefix="PLANNER_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )

    # Logging
    log_level: str = "INFO"
    log_file: Optional[str] = None

    # Reproducibility
    seed: int = 0
    jobs: int = 1

    @property
    def file_logging_enabled(self) -> bool:
        return bool(self.log_file)


# Global settings instance
settings = Settings()


class ConfigModel(BaseModel):
    """Frozen run-configuration model; validation failures raise ConfigError."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    def __init__(self, **data):
        try:
            super().__init__(**data)
        except ValidationError as e:
            first = e.errors()[0]
            field = ".".join(str(p) for p in first["loc"]) or type(self).__name__
            raise ConfigError(f"{type(self).__name__}.{field}: {first['msg']}") from e
