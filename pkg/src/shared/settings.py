"""Runtime settings read from the environment and from `.env`."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class RuntimeSettings(BaseSettings):
    """Process-level settings that do not change the numerics."""

    model_config = SettingsConfigDict(
        env_prefix="GINIBRE_", env_file=".env", extra="ignore"
    )

    workers: int = Field(
        default=1, ge=1, description="Worker processes for per-x solves and Monte Carlo chunks."
    )
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = Field(
        default="WARNING", description="Level of the stderr log handler."
    )
    output_dir: Optional[str] = Field(
        default=None, description="Directory for output files when --output is a bare name."
    )


def get_settings() -> RuntimeSettings:
    """Read the settings afresh (environment changes are picked up)."""
    return RuntimeSettings()
