"""Runtime configuration."""

from pathlib import Path

import yaml
from pydantic import Field
from pydantic_settings import BaseSettings

from seqshift.errors import SeqshiftValidationError


class SeqshiftSettings(BaseSettings):
    """seqshift configuration.

    Can be set via environment variables with SEQSHIFT_ prefix.
    """

    # Reproducibility and parallelism
    seed: int = Field(default=0, description="Base seed for synthesis and toy worlds")
    threads: int = Field(default=1, ge=1, description="Utterances decoded concurrently")

    # Search defaults
    beam_size: int = Field(default=16, ge=1, description="Default beam size")
    score_pruning: float | None = Field(
        default=None,
        description="Optional log-score margin below the best hypothesis",
    )

    # Language model defaults
    lm_order: int = Field(default=3, ge=1, description="Default n-gram order")
    discount: float = Field(default=0.7, gt=0.0, lt=1.0, description="Absolute discount d")

    # Acoustic defaults
    prior_floor: float = Field(default=1e-8, gt=0.0, description="Prior floor before renormalizing")

    # Emitter defaults
    logit_gain: float = Field(default=4.0, gt=0.0, description="Reference logit gain g")
    frames_per_label: int = Field(default=2, ge=1, description="Fixed duration per label")
    calibration_seeds: int = Field(default=5, ge=1, description="Seeds averaged per tau")
    tau_max: float = Field(default=8.0, gt=0.0, description="Upper end of the tau bracket")

    # Output
    output_dir: Path = Field(default=Path("."), description="Directory for generated artifacts")

    class Config:
        env_prefix = "SEQSHIFT_"
        env_file = ".env"


def load_config(config_path: Path | str | None = None) -> SeqshiftSettings:
    """Load settings.

    Args:
        config_path: Optional path to a JSON or YAML settings file

    Returns:
        SeqshiftSettings instance
    """
    if config_path:
        config_path = Path(config_path)
        if config_path.exists():
            with open(config_path, encoding="utf-8") as f:
                data = yaml.safe_load(f) or {}
            if not isinstance(data, dict):
                raise SeqshiftValidationError(f"config must be a mapping: {config_path}")
            return SeqshiftSettings(**data)

    return SeqshiftSettings()
