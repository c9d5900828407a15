"""Application configuration management."""

from functools import lru_cache
from pathlib import Path

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class GeometrySettings(BaseSettings):
    """Grid, raster and quadrature resolutions."""

    model_config = SettingsConfigDict(env_file=".env", extra="ignore", populate_by_name=True)

    grid_m: int = Field(default=720, ge=8, alias="MINKSYM_GRID_M")
    raster_size: int = Field(default=1024, ge=32, alias="MINKSYM_RASTER_G")
    oracle_size: int = Field(default=128, ge=32, le=160, alias="MINKSYM_ORACLE_G")

    cloud_size_3d: int = 2048
    cloud_size_per_dim: int = 4096  # M = 4096 * n for n >= 4


class ExperimentSettings(BaseSettings):
    """Defaults for runs, sweeps and verification suites."""

    model_config = SettingsConfigDict(env_file=".env", extra="ignore", populate_by_name=True)

    c2: float = Field(default=0.2, gt=0.0, lt=1.0, alias="MINKSYM_C2")
    seed: int = Field(default=0, alias="MINKSYM_SEED")
    jobs: int = Field(default=1, ge=1, alias="MINKSYM_JOBS")

    phase1_max_steps: int = 400
    phase2_max_steps: int = 600
    phase3_max_steps: int = 200

    renormalize_mean_width: bool = True


class Settings(BaseSettings):
    """Main application settings."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
        populate_by_name=True,
    )

    # Logging
    log_level: str = Field(default="INFO", alias="LOG_LEVEL")
    log_format: str = Field(default="console", alias="LOG_FORMAT")

    # Output
    output_dir: Path = Field(default=Path("runs"), alias="MINKSYM_OUTPUT_DIR")

    # Nested settings
    geometry: GeometrySettings = Field(default_factory=GeometrySettings)
    experiment: ExperimentSettings = Field(default_factory=ExperimentSettings)

    def cloud_size(self, n: int) -> int:
        """Default number of quadrature nodes for dimension ``n``."""
        if n == 2:
            return self.geometry.grid_m
        if n == 3:
            return self.geometry.cloud_size_3d
        return self.geometry.cloud_size_per_dim * n


@lru_cache
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()
