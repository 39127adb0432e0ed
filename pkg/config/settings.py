"""
Configuration settings for the twisted KLV toolkit.
"""
from pydantic_settings import BaseSettings
from pydantic import Field
from typing import List
from pathlib import Path


class GroupSettings(BaseSettings):
    """Settings for Weyl group enumeration."""

    max_group_order: int = Field(default=50000, description="Refuse to enumerate Weyl groups larger than this")
    max_roots: int = Field(default=500, description="Root closure bound; exceeding it means the Cartan matrix is not of finite type")


class SolverSettings(BaseSettings):
    """Settings for the bar-operator solvers."""

    # Interpolation oracle
    oracle_first_point: int = Field(default=2, description="First integer value substituted for u")
    oracle_extra_points: int = Field(default=2, description="Samples beyond the degree bound, used as an interpolation check")
    oracle_max_retries: int = Field(default=3, description="Degree-bound doublings before InterpolationMismatch")
    oracle_max_skipped_points: int = Field(default=4, description="Rank-deficient samples tolerated before Underdetermined")


class FqSettings(BaseSettings):
    """Settings for the finite-field models."""

    default_samples: List[int] = Field(default=[3, 5, 7, 9], description="Values of q used by fq derive")
    max_q: int = Field(default=27, description="Largest q accepted by build_scene")


class AppSettings(BaseSettings):
    """Main application settings."""

    # Logging
    log_level: str = Field(default="WARNING", description="Logging level")

    # Data paths
    data_dir: Path = Field(default=Path("data"), description="Base data directory")
    builtin_dir: Path = Field(
        default=Path(__file__).resolve().parent.parent / "data" / "builtin",
        description="Directory holding the built-in datum files"
    )
    derived_dir: Path = Field(default=Path("data/derived"), description="Output directory of fq derive")

    # Sub-settings
    group: GroupSettings = Field(default_factory=GroupSettings)
    solver: SolverSettings = Field(default_factory=SolverSettings)
    fq: FqSettings = Field(default_factory=FqSettings)

    class Config:
        env_file = ".env"
        env_nested_delimiter = "__"


# Global settings instance
settings = AppSettings()


def ensure_directories():
    """Create necessary directories if they don't exist."""
    dirs = [
        settings.data_dir,
        settings.derived_dir,
    ]
    for dir_path in dirs:
        dir_path.mkdir(parents=True, exist_ok=True)
