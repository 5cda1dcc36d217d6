"""Configuration settings for hankel-gm."""

import os
from typing import List, Any
from pydantic import Field, computed_field
from pydantic_settings import BaseSettings, SettingsConfigDict


def parse_comma_separated(value: Any) -> List[str]:
    """Parse comma-separated string into list."""
    if value is None or value == "":
        return []
    if isinstance(value, str):
        return [item.strip() for item in value.split(",") if item.strip()]
    elif isinstance(value, list):
        return value
    return []


class Settings(BaseSettings):
    """Library and harness settings loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_prefix="HANKEL_GM_",
        env_file=".env" if not os.getenv("TESTING") else None,
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra='allow'  # Allow extra fields from environment
    )

    # Application Configuration
    app_name: str = Field(default="hankel-gm")
    app_version: str = Field(default="1.0.0")
    debug: bool = Field(default=False)
    log_level: str = Field(default="INFO")

    # Sampling windows (exponents of 2)
    window_min_exp: int = Field(default=-20)
    window_max_exp: int = Field(default=20)
    nodes_per_octave: int = Field(default=16, ge=1)
    y_min_exp: int = Field(default=-12)
    y_max_exp: int = Field(default=12)
    y_nodes_per_octave: int = Field(default=8, ge=1)
    refine_factor: int = Field(default=8, ge=1, description="Sub-cells per cubic cell for modulus views")

    # Bessel and quadrature
    bessel_tol: float = Field(default=1e-12, gt=0)
    kernel_tol: float = Field(default=1e-10, gt=0)
    bessel_crossover: float = Field(default=10.0, gt=0)
    series_cutoff: float = Field(default=8.0, gt=0)
    lommel_cutoff: float = Field(default=400.0, gt=0)
    lommel_terms: int = Field(default=12, ge=1)
    gauss_order: int = Field(default=20, ge=2)
    panel_max_depth: int = Field(default=12, ge=0)

    # Transform
    transform_tol: float = Field(default=1e-10, gt=0)
    tail_mode: str = Field(default="integrate-by-parts")
    ladder_levels: int = Field(default=4, ge=2)

    # General monotonicity
    gm_safety_factor: float = Field(default=1.05, ge=1.0)
    gm_growth_factor: float = Field(default=8.0, gt=1.0)
    good_number_r: float = Field(default=2.0, gt=0)

    # Norm checks
    cross_formula_rtol: float = Field(default=1e-8, gt=0)
    booton_rtol: float = Field(default=1e-10, gt=0)

    # Harness
    band_max_ratio: float = Field(default=1e3, gt=1.0)
    window_drift_tol: float = Field(default=0.05, gt=0)
    dilation_rtol: float = Field(default=1e-6, gt=0)
    max_workers: int = Field(default=1, ge=1)
    report_schema_version: str = Field(default="1.0")
    output_dir: str = Field(default="./reports")
    dilations_raw: str = Field(
        default="0.03125,0.0625,0.125,0.25,0.5,1,2,4,8,16,32",
        description="Comma-separated dilation ladder",
    )

    @computed_field
    @property
    def dilations(self) -> List[float]:
        """Parse the dilation ladder from comma-separated string."""
        return [float(item) for item in parse_comma_separated(self.dilations_raw)]


# Global settings instance - lazy creation to avoid import-time issues
_settings_instance = None

def get_settings() -> Settings:
    """Get or create the global settings instance."""
    global _settings_instance
    if _settings_instance is None:
        if os.getenv("TESTING"):
            _settings_instance = Settings(
                debug=True,
                window_min_exp=-10,
                window_max_exp=8,
                y_min_exp=-6,
                y_max_exp=6,
                y_nodes_per_octave=4,
                dilations_raw="0.25,0.5,1,2,4",
            )
        else:
            _settings_instance = Settings()
    return _settings_instance

# Module-level instance shared by the package
settings = get_settings()
