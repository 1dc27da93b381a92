"""
Configuration loading for justinf.

Settings come from ``config.yaml`` (or the file named by ``JUSTINF_CONFIG``),
then environment variables (a ``.env`` file is honoured), then explicit
overrides from the command line.
"""
import logging
import os
from pathlib import Path
from typing import Any, Dict, Literal, Optional

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError

from src.errors import MalformedInputError

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = "config.yaml"

# environment variable -> settings field
ENV_OVERRIDES = {
    "JUSTINF_DEPTH_CAP": "depth_cap",
    "JUSTINF_GROUP_LEVEL_CAP": "group_level_cap",
    "JUSTINF_MATRIX_LEVEL_CAP": "matrix_level_cap",
    "JUSTINF_VERTEX_CAP": "enumerate_vertex_cap",
    "JUSTINF_CACHE_SIZE": "trivial_cache_size",
    "JUSTINF_SEED": "seed",
    "JUSTINF_FORMAT": "output_format",
    "JUSTINF_LOG_LEVEL": "log_level",
}


class Settings(BaseModel):
    """Validated runtime settings."""
    depth_cap: int = Field(12, gt=0, description="Maximum psi_pi iteration depth")
    group_level_cap: int = Field(5, gt=0, description="Maximum level for permutation-group computations")
    matrix_level_cap: int = Field(8, gt=0, description="Maximum level for level matrices and orbitals")
    enumerate_vertex_cap: int = Field(20, gt=0, description="Maximum vertex count for brute-force ideal enumeration")
    trivial_cache_size: int = Field(1 << 20, gt=0, description="LRU bound of the word-problem cache")
    seed: int = Field(20240101, description="Seed for randomised property suites")
    output_format: Literal["json", "dot", "plain"] = "json"
    log_level: str = "WARNING"


_active: Optional[Settings] = None


def _flatten(raw: Dict[str, Any]) -> Dict[str, Any]:
    """Map the sectioned yaml layout onto Settings fields."""
    caps = raw.get("caps", {}) or {}
    cli = raw.get("cli", {}) or {}
    log = raw.get("logging", {}) or {}
    flat: Dict[str, Any] = {}
    for key in ("depth_cap", "group_level_cap", "matrix_level_cap",
                "enumerate_vertex_cap", "trivial_cache_size"):
        if key in caps:
            flat[key] = caps[key]
    if "seed" in cli:
        flat["seed"] = cli["seed"]
    if "format" in cli:
        flat["output_format"] = cli["format"]
    if "level" in log:
        flat["log_level"] = log["level"]
    return flat


def load_settings(config_path: Optional[str] = None, **overrides: Any) -> Settings:
    """
    Build settings from the yaml file, the environment and explicit overrides.

    Args:
        config_path: Path to the yaml file; defaults to JUSTINF_CONFIG or config.yaml
        **overrides: Settings fields that take precedence over everything else

    Returns:
        A validated Settings instance
    """
    load_dotenv()

    path = Path(config_path or os.getenv("JUSTINF_CONFIG", DEFAULT_CONFIG_PATH))
    values: Dict[str, Any] = {}
    if path.exists():
        with open(path, "r") as f:
            raw = yaml.safe_load(f) or {}
        if not isinstance(raw, dict):
            raise MalformedInputError(f"Config file {path} must contain a mapping")
        values.update(_flatten(raw))
    elif config_path:
        raise MalformedInputError(f"Config file not found: {path}")
    else:
        logger.debug("No config file at %s, using defaults", path)

    for env_name, field in ENV_OVERRIDES.items():
        env_value = os.getenv(env_name)
        if env_value:
            values[field] = env_value

    values.update({k: v for k, v in overrides.items() if v is not None})

    try:
        return Settings(**values)
    except ValidationError as e:
        raise MalformedInputError(f"Invalid configuration: {e}") from e


def get_settings() -> Settings:
    """Return the active settings, loading them on first use."""
    global _active
    if _active is None:
        _active = load_settings()
    return _active


def set_settings(settings: Optional[Settings]) -> None:
    """Replace the active settings (None resets to lazy loading)."""
    global _active
    _active = settings
