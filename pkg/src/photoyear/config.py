"""Service configuration: JSON file plus environment overrides.

The file holds anything; the environment can override the deploy-sensitive
knobs (PORT, STORAGE_URL, IMAGE_DIR, SESSION_TTL_SECS) without editing it.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Mapping, Optional


class ConfigError(Exception):
    pass


@dataclass
class ApiConfig:
    host: str = "127.0.0.1"
    port: int = 8000
    storage_url: str = "photoyear.db"
    catalog_path: str = "meta.csv"
    image_dir: str = "images"
    static_dir: Optional[str] = None       # built frontend, served under /
    session_ttl_secs: int = 86_400
    demo_enabled: bool = True
    exclusion_window: int = 50
    allow_partial_years: bool = False


_ENV_OVERRIDES = {
    "PORT": ("port", int),
    "STORAGE_URL": ("storage_url", str),
    "IMAGE_DIR": ("image_dir", str),
    "SESSION_TTL_SECS": ("session_ttl_secs", int),
}


def load_config(
    path: Optional[str | Path] = None,
    env: Mapping[str, str] = os.environ,
) -> ApiConfig:
    values = {}
    if path is not None:
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as err:
            raise ConfigError(f"cannot read config file {path}: {err}")
        except json.JSONDecodeError as err:
            raise ConfigError(f"config file {path} is not valid JSON: {err}")
        known = {f.name for f in fields(ApiConfig)}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        values.update(raw)
    for var, (field_name, cast) in _ENV_OVERRIDES.items():
        if var in env:
            try:
                values[field_name] = cast(env[var])
            except ValueError as err:
                raise ConfigError(f"bad value for ${var}: {err}")
    return ApiConfig(**values)


def validate_paths(config: ApiConfig) -> None:
    """Fail loudly before serving if configured paths do not exist."""
    catalog = Path(config.catalog_path)
    if not catalog.is_file():
        raise ConfigError(f"catalog file does not exist: {catalog}")
    image_dir = Path(config.image_dir)
    if not image_dir.is_dir():
        raise ConfigError(f"image directory does not exist: {image_dir}")
    if config.static_dir is not None and not Path(config.static_dir).is_dir():
        raise ConfigError(f"static directory does not exist: {config.static_dir}")
