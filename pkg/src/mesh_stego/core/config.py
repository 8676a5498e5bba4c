import os
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError

from mesh_stego.core.errors import ConfigError

load_dotenv()

PROFILES = ("ifpd-cs", "ifpd-s1", "ifpd-s2", "ifpd-s3", "vnd", "gcd", "dihedral")


class Settings(BaseModel):
    """Runtime defaults. Every field can be overridden by a CLI flag."""

    k_star: int = Field(6, ge=0, le=15)
    stc_height: int = Field(12, ge=6, le=15)
    seed: int = Field(0, ge=0)
    threads: int = Field(0, ge=0)
    log_level: str = "INFO"
    safety: float = Field(0.95, gt=0.0, le=1.0)
    mu: float = Field(1.0, gt=0.0)
    sigma: float = Field(1e-4, gt=0.0)
    beta: float = Field(1.0, gt=0.0)
    smooth_iterations: int = Field(1, ge=1)
    smooth_factor: float = Field(0.2, gt=0.0, le=1.0)
    profile: str = "ifpd-cs"

    def worker_count(self) -> int:
        return self.threads or (os.cpu_count() or 1)


# env var -> settings field
_ENV_FIELDS = {
    "MESH_STEGO_KSTAR": "k_star",
    "MESH_STEGO_STC_HEIGHT": "stc_height",
    "MESH_STEGO_SEED": "seed",
    "MESH_STEGO_THREADS": "threads",
    "MESH_STEGO_LOG_LEVEL": "log_level",
    "MESH_STEGO_SAFETY": "safety",
    "MESH_STEGO_MU": "mu",
    "MESH_STEGO_SIGMA": "sigma",
    "MESH_STEGO_BETA": "beta",
    "MESH_STEGO_SMOOTH_ITERATIONS": "smooth_iterations",
    "MESH_STEGO_SMOOTH_FACTOR": "smooth_factor",
    "MESH_STEGO_PROFILE": "profile",
}


def load_settings() -> Settings:
    values = {}
    for env_name, field_name in _ENV_FIELDS.items():
        raw = os.getenv(env_name)
        if raw is not None and raw.strip() != "":
            values[field_name] = raw.strip()
    try:
        settings = Settings(**values)
    except ValidationError as e:
        raise ConfigError(f"Invalid MESH_STEGO_* environment: {e}") from e
    if settings.profile not in PROFILES:
        raise ConfigError(f"Unknown profile '{settings.profile}', expected one of {', '.join(PROFILES)}")
    return settings


_settings_instance: Optional[Settings] = None


def get_settings() -> Settings:
    """Get or create the settings singleton."""
    global _settings_instance
    if _settings_instance is None:
        _settings_instance = load_settings()
    return _settings_instance


def reset_settings():
    global _settings_instance
    _settings_instance = None
